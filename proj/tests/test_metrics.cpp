#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "amrpe/metrics.hpp"
#include "amrpe/rng.hpp"
#include "support/oracles.hpp"

using namespace amrpe;

namespace {

ScoredCorpus toy_corpus() {
    // depths 1..5, system A perfect on deep graphs only, system B never
    ScoredCorpus corpus;
    const char* sentences[] = {
        "the dog runs", "a child sings a song", "rain falls on the city",
        "the parent believes the child", "music fills the quiet room",
    };
    for (int i = 0; i < 5; ++i) {
        ScoredEntry e;
        e.id = "e" + std::to_string(i);
        e.reference = sentences[i];
        e.features["depth"] = i + 1;
        e.features["node_count"] = 2 * (i + 1);
        corpus.push_back(e);
    }
    return corpus;
}

} // namespace

TEST_SUITE("metrics") {

TEST_CASE("identical corpora score exactly 100") {
    std::vector<std::string> refs = {"the cat sat", "a long sentence with many words here",
                                     "short"};
    CHECK(bleu(refs, refs) == 100.0);
    CHECK(chrfpp(refs, refs) == 100.0);
}

TEST_CASE("clipped counts follow the classic repeated-word example") {
    std::vector<std::string> refs = {"the cat"};
    std::vector<std::string> hyps = {"the the the the"};
    double score = bleu(refs, hyps);
    CHECK(score == doctest::Approx(oracle::bleu_reference(refs, hyps)).epsilon(1e-6));
    // p1 = 1/4 clipped; higher orders fall back to epsilon
    CHECK(score < 1.0);
    CHECK(score > 0.0);
}

TEST_CASE("smoothing keeps single pairs without 4-gram overlap finite") {
    std::vector<std::string> refs = {"the quick brown fox jumps"};
    std::vector<std::string> hyps = {"the quick red fox leaps"};
    double score = bleu(refs, hyps);
    CHECK(score == doctest::Approx(oracle::bleu_reference(refs, hyps)).epsilon(1e-6));
    CHECK(score > 0.0);
}

TEST_CASE("bleu matches the reference implementation on mixed corpora") {
    SplitMix64 rng(13);
    const char* pool[] = {"the", "a", "dog", "cat", "runs", "sits", "fast", "slow", "and"};
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<std::string> refs, hyps;
        int n = 1 + static_cast<int>(rng.next_below(6));
        for (int i = 0; i < n; ++i) {
            auto sentence = [&](int len) {
                std::string s;
                for (int w = 0; w < len; ++w) {
                    if (w) s += ' ';
                    s += pool[rng.next_below(9)];
                }
                return s;
            };
            refs.push_back(sentence(1 + static_cast<int>(rng.next_below(10))));
            hyps.push_back(sentence(1 + static_cast<int>(rng.next_below(10))));
        }
        CHECK(bleu(refs, hyps) ==
              doctest::Approx(oracle::bleu_reference(refs, hyps)).epsilon(1e-6));
        CHECK(chrfpp(refs, hyps) ==
              doctest::Approx(oracle::chrfpp_reference(refs, hyps)).epsilon(1e-4));
    }
}

TEST_CASE("hand-counted bleu example") {
    // ref "the cat sat on the mat" (6 tokens) vs hyp "the cat sat on mat" (5):
    // clipped precisions 5/5, 3/4, 2/3, 1/2; brevity penalty exp(1 - 6/5)
    double expected = 100.0 * std::exp(1.0 - 6.0 / 5.0) *
                      std::pow(1.0 * (3.0 / 4) * (2.0 / 3) * (1.0 / 2), 0.25);
    CHECK(bleu({"the cat sat on the mat"}, {"the cat sat on mat"}) ==
          doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("hand-counted chrf example") {
    // ref "abc" vs hyp "ab": live orders are char 1..3 and word 1-grams;
    // precisions 1, 1, 0, 0 and recalls 2/3, 1/2, 0, 0
    double p = (1.0 + 1.0 + 0.0 + 0.0) / 4.0;
    double r = (2.0 / 3 + 1.0 / 2 + 0.0 + 0.0) / 4.0;
    double expected = 100.0 * 5.0 * p * r / (4.0 * p + r);
    CHECK(chrfpp({"abc"}, {"ab"}) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("bleu and chrf are permutation invariant") {
    std::vector<std::string> refs = {"one two three", "four five", "six seven eight nine"};
    std::vector<std::string> hyps = {"one two four", "four five", "six eight nine"};
    std::vector<std::string> refs_r = {refs[2], refs[0], refs[1]};
    std::vector<std::string> hyps_r = {hyps[2], hyps[0], hyps[1]};
    CHECK(bleu(refs, hyps) == doctest::Approx(bleu(refs_r, hyps_r)).epsilon(1e-12));
    CHECK(chrfpp(refs, hyps) == doctest::Approx(chrfpp(refs_r, hyps_r)).epsilon(1e-12));
}

TEST_CASE("disjoint characters score zero") {
    CHECK(chrfpp({"aaaa"}, {"bbbb"}) == 0.0);
}

TEST_CASE("corpus shape errors") {
    CHECK_THROWS_AS(bleu({"a"}, {"a", "b"}), Error);
    CHECK_THROWS_AS(bleu({}, {}), Error);
    CHECK_THROWS_AS(chrfpp({"a"}, {}), Error);
}

TEST_CASE("stratification filters by feature") {
    ScoredCorpus corpus = toy_corpus();
    CHECK(stratify(corpus, "depth", 1, StratifyDirection::AtLeast).size() == 5);
    CHECK(stratify(corpus, "depth", 4, StratifyDirection::AtLeast).size() == 2);
    CHECK(stratify(corpus, "depth", 99, StratifyDirection::AtLeast).empty());
    CHECK(stratify(corpus, "depth", 2, StratifyDirection::AtMost).size() == 2);
    auto sub = stratify(corpus, "depth", 3, StratifyDirection::AtLeast);
    CHECK(sub.front().id == "e2"); // order preserved
    CHECK_THROWS_AS(stratify(corpus, "missing", 1, StratifyDirection::AtLeast), Error);
}

TEST_CASE("identical systems make an all-zero report") {
    ScoredCorpus corpus = toy_corpus();
    for (auto& e : corpus) e.hypothesis = e.reference;
    StratifiedReport report =
        delta_report(corpus, corpus, "depth", 1, 5, StratifyDirection::AtLeast);
    REQUIRE(report.rows.size() == 5);
    for (const auto& row : report.rows) {
        CHECK(row.delta == 0.0);
        REQUIRE(row.delta1.has_value());
        CHECK(*row.delta1 == 0.0);
    }
    CHECK(report.rows[0].z == 1);
    CHECK(*report.rows[0].delta1 == 0.0); // delta1(1) = 0 by definition
}

TEST_CASE("deep-only improvements grow with the threshold") {
    ScoredCorpus sys_a = toy_corpus(), sys_b = toy_corpus();
    for (int i = 0; i < 5; ++i) {
        // A is perfect on depth >= 3, garbled below; B is garbled everywhere
        sys_a[i].hypothesis = i >= 2 ? sys_a[i].reference : "xxx yyy";
        sys_b[i].hypothesis = "xxx yyy";
    }
    StratifiedReport report =
        delta_report(sys_a, sys_b, "depth", 1, 5, StratifyDirection::AtLeast);
    REQUIRE(report.rows.size() == 5);
    // monotone up to the epsilon-smoothing noise in the garbled system's scores
    for (std::size_t i = 1; i < report.rows.size(); ++i)
        CHECK(report.rows[i].delta >= report.rows[i - 1].delta - 1e-3);
    CHECK(report.rows.back().delta > report.rows.front().delta + 10.0);

    // strata BLEU values match the reference implementation stratum by stratum
    for (const auto& row : report.rows) {
        std::vector<std::string> refs, hyps;
        for (int i = 0; i < 5; ++i) {
            if (sys_a[i].features.at("depth") >= row.z) {
                refs.push_back(sys_a[i].reference);
                hyps.push_back(sys_a[i].hypothesis);
            }
        }
        CHECK(row.bleu_a == doctest::Approx(oracle::bleu_reference(refs, hyps)).epsilon(1e-9));
    }
}

TEST_CASE("empty strata are absent rather than zero") {
    ScoredCorpus corpus = toy_corpus();
    for (auto& e : corpus) e.hypothesis = e.reference;
    StratifiedReport report =
        delta_report(corpus, corpus, "depth", 1, 10, StratifyDirection::AtLeast);
    CHECK(report.rows.size() == 5); // z = 6..10 hold nothing
    for (const auto& row : report.rows) CHECK(row.z <= 5);
}

TEST_CASE("mismatched ids are rejected") {
    ScoredCorpus a = toy_corpus(), b = toy_corpus();
    b[2].id = "other";
    CHECK_THROWS_AS(delta_report(a, b, "depth", 1, 3, StratifyDirection::AtLeast), Error);
}

TEST_CASE("report serialization") {
    ScoredCorpus corpus = toy_corpus();
    for (auto& e : corpus) e.hypothesis = e.reference;
    StratifiedReport report =
        delta_report(corpus, corpus, "depth", 1, 2, StratifyDirection::AtLeast);
    std::string json = report_to_json(report);
    CHECK(json.find("\"z\":1") != std::string::npos);
    CHECK(json.find("\"delta\":0.0") != std::string::npos);
    std::string csv = report_to_csv(report);
    CHECK(csv.rfind("z,bleu_a,bleu_b,delta,delta1\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
}

} // TEST_SUITE
