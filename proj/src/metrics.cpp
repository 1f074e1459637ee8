#include "amrpe/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "amrpe/errors.hpp"

namespace amrpe {

using ordered_json = nlohmann::ordered_json;

namespace {

constexpr double kEpsilon = 1e-9;
constexpr int kBleuOrder = 4;

std::vector<std::string> words(const std::string& text) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        std::size_t start = i;
        while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        if (i > start) out.push_back(text.substr(start, i - start));
    }
    return out;
}

using CountMap = std::unordered_map<std::string, long>;

CountMap word_ngrams(const std::vector<std::string>& tokens, int n) {
    CountMap counts;
    if (static_cast<int>(tokens.size()) < n) return counts;
    for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
        std::string key;
        for (int j = 0; j < n; ++j) {
            if (j) key += '\x1f';
            key += tokens[i + j];
        }
        ++counts[key];
    }
    return counts;
}

CountMap char_ngrams(const std::string& chars, int n) {
    CountMap counts;
    if (static_cast<int>(chars.size()) < n) return counts;
    for (std::size_t i = 0; i + n <= chars.size(); ++i) ++counts[chars.substr(i, n)];
    return counts;
}

long total(const CountMap& counts) {
    long t = 0;
    for (const auto& [key, c] : counts) t += c;
    return t;
}

long clipped_matches(const CountMap& hyp, const CountMap& ref) {
    long m = 0;
    for (const auto& [key, c] : hyp) {
        auto it = ref.find(key);
        if (it != ref.end()) m += std::min(c, it->second);
    }
    return m;
}

void check_corpus(const std::vector<std::string>& refs, const std::vector<std::string>& hyps) {
    if (refs.size() != hyps.size())
        fail(errc::length_mismatch,
             std::to_string(refs.size()) + " references vs " + std::to_string(hyps.size()) +
                 " hypotheses");
    if (refs.empty()) fail(errc::empty_corpus, "no reference/hypothesis pairs");
}

std::string strip_whitespace(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) out += c;
    return out;
}

} // namespace

double bleu(const std::vector<std::string>& refs, const std::vector<std::string>& hyps) {
    check_corpus(refs, hyps);

    long matches[kBleuOrder] = {0, 0, 0, 0};
    long totals[kBleuOrder] = {0, 0, 0, 0};
    long hyp_len = 0, ref_len = 0;
    for (std::size_t i = 0; i < refs.size(); ++i) {
        auto ref_tokens = words(refs[i]);
        auto hyp_tokens = words(hyps[i]);
        ref_len += static_cast<long>(ref_tokens.size());
        hyp_len += static_cast<long>(hyp_tokens.size());
        for (int n = 1; n <= kBleuOrder; ++n) {
            auto hyp_counts = word_ngrams(hyp_tokens, n);
            auto ref_counts = word_ngrams(ref_tokens, n);
            totals[n - 1] += total(hyp_counts);
            matches[n - 1] += clipped_matches(hyp_counts, ref_counts);
        }
    }
    if (hyp_len == 0) return 0.0;

    double log_sum = 0.0;
    for (int n = 0; n < kBleuOrder; ++n) {
        double p;
        if (totals[n] == 0)
            p = 1.0; // no n-grams of this order exist at all
        else if (matches[n] == 0)
            p = kEpsilon / static_cast<double>(totals[n]);
        else
            p = static_cast<double>(matches[n]) / static_cast<double>(totals[n]);
        log_sum += std::log(p);
    }
    double brevity =
        hyp_len >= ref_len
            ? 1.0
            : std::exp(1.0 - static_cast<double>(ref_len) / static_cast<double>(hyp_len));
    return 100.0 * brevity * std::exp(log_sum / kBleuOrder);
}

double chrfpp(const std::vector<std::string>& refs, const std::vector<std::string>& hyps) {
    check_corpus(refs, hyps);
    constexpr int kCharOrder = 6;
    constexpr int kWordOrder = 2;
    constexpr double kBetaSq = 4.0; // beta = 2

    const int orders = kCharOrder + kWordOrder;
    std::vector<long> matches(orders, 0), hyp_totals(orders, 0), ref_totals(orders, 0);

    for (std::size_t i = 0; i < refs.size(); ++i) {
        std::string ref_chars = strip_whitespace(refs[i]);
        std::string hyp_chars = strip_whitespace(hyps[i]);
        auto ref_words = words(refs[i]);
        auto hyp_words = words(hyps[i]);
        for (int n = 1; n <= kCharOrder; ++n) {
            auto h = char_ngrams(hyp_chars, n);
            auto r = char_ngrams(ref_chars, n);
            matches[n - 1] += clipped_matches(h, r);
            hyp_totals[n - 1] += total(h);
            ref_totals[n - 1] += total(r);
        }
        for (int n = 1; n <= kWordOrder; ++n) {
            auto h = word_ngrams(hyp_words, n);
            auto r = word_ngrams(ref_words, n);
            matches[kCharOrder + n - 1] += clipped_matches(h, r);
            hyp_totals[kCharOrder + n - 1] += total(h);
            ref_totals[kCharOrder + n - 1] += total(r);
        }
    }

    double precision_sum = 0.0, recall_sum = 0.0;
    int used = 0;
    for (int o = 0; o < orders; ++o) {
        if (hyp_totals[o] == 0 && ref_totals[o] == 0) continue; // order carries no signal
        ++used;
        if (hyp_totals[o] > 0)
            precision_sum += static_cast<double>(matches[o]) / static_cast<double>(hyp_totals[o]);
        if (ref_totals[o] > 0)
            recall_sum += static_cast<double>(matches[o]) / static_cast<double>(ref_totals[o]);
    }
    if (used == 0) return 0.0;
    double precision = precision_sum / used;
    double recall = recall_sum / used;
    double denom = kBetaSq * precision + recall;
    if (denom == 0.0) return 0.0;
    return 100.0 * (1.0 + kBetaSq) * precision * recall / denom;
}

ScoredCorpus stratify(const ScoredCorpus& corpus, const std::string& feature, long z,
                      StratifyDirection direction) {
    ScoredCorpus out;
    for (const auto& entry : corpus) {
        auto it = entry.features.find(feature);
        if (it == entry.features.end())
            fail(errc::unknown_feature,
                 "entry '" + entry.id + "' has no feature '" + feature + "'");
        bool keep = direction == StratifyDirection::AtLeast ? it->second >= z : it->second <= z;
        if (keep) out.push_back(entry);
    }
    return out;
}

StratifiedReport delta_report(const ScoredCorpus& sys_a, const ScoredCorpus& sys_b,
                              const std::string& feature, long z_min, long z_max,
                              StratifyDirection direction) {
    if (sys_a.size() != sys_b.size())
        fail(errc::id_mismatch, "systems have different entry counts");
    for (std::size_t i = 0; i < sys_a.size(); ++i)
        if (sys_a[i].id != sys_b[i].id)
            fail(errc::id_mismatch,
                 "entry " + std::to_string(i) + ": '" + sys_a[i].id + "' vs '" + sys_b[i].id + "'");

    auto stratum_delta = [&](long z, StratumScores* row) -> bool {
        ScoredCorpus a = stratify(sys_a, feature, z, direction);
        if (a.empty()) return false;
        ScoredCorpus b = stratify(sys_b, feature, z, direction);
        std::vector<std::string> refs, hyp_a, hyp_b;
        for (const auto& e : a) {
            refs.push_back(e.reference);
            hyp_a.push_back(e.hypothesis);
        }
        for (const auto& e : b) hyp_b.push_back(e.hypothesis);
        row->z = z;
        row->bleu_a = bleu(refs, hyp_a);
        row->bleu_b = bleu(refs, hyp_b);
        row->delta = row->bleu_a - row->bleu_b;
        return true;
    };

    StratifiedReport report;
    report.feature = feature;
    report.direction = direction;

    StratumScores base;
    bool has_base = stratum_delta(1, &base);

    for (long z = z_min; z <= z_max; ++z) {
        StratumScores row;
        if (!stratum_delta(z, &row)) continue; // empty strata are absent, never zero
        if (has_base) row.delta1 = row.delta - base.delta;
        report.rows.push_back(row);
    }
    return report;
}

std::string report_to_json(const StratifiedReport& report) {
    ordered_json arr = ordered_json::array();
    for (const auto& row : report.rows) {
        ordered_json j;
        j["z"] = row.z;
        j["bleu_a"] = row.bleu_a;
        j["bleu_b"] = row.bleu_b;
        j["delta"] = row.delta;
        if (row.delta1)
            j["delta1"] = *row.delta1;
        else
            j["delta1"] = nullptr;
        arr.push_back(std::move(j));
    }
    return arr.dump();
}

std::string report_to_csv(const StratifiedReport& report) {
    std::string out = "z,bleu_a,bleu_b,delta,delta1\n";
    char buf[160];
    for (const auto& row : report.rows) {
        if (row.delta1)
            std::snprintf(buf, sizeof buf, "%ld,%.6f,%.6f,%.6f,%.6f\n", row.z, row.bleu_a,
                          row.bleu_b, row.delta, *row.delta1);
        else
            std::snprintf(buf, sizeof buf, "%ld,%.6f,%.6f,%.6f,\n", row.z, row.bleu_a, row.bleu_b,
                          row.delta);
        out += buf;
    }
    return out;
}

} // namespace amrpe
