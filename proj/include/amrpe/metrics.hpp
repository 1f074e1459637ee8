#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace amrpe {

struct ScoredEntry {
    std::string id;
    std::string reference;
    std::string hypothesis;
    std::map<std::string, long> features; // depth, node_count, amr_count, ...
};

using ScoredCorpus = std::vector<ScoredEntry>;

/// Corpus BLEU-4: geometric mean of clipped n-gram precisions with an
/// exponential brevity penalty. Whitespace tokenization. Orders with zero
/// clipped matches use epsilon 1e-9; orders with no hypothesis n-grams at
/// all count as precision 1 so identical corpora score exactly 100.
double bleu(const std::vector<std::string>& refs, const std::vector<std::string>& hyps);

/// chrF++: character 1..6-grams (whitespace stripped) plus word 1..2-grams,
/// micro-averaged over the corpus, F-score with beta = 2.
double chrfpp(const std::vector<std::string>& refs, const std::vector<std::string>& hyps);

enum class StratifyDirection { AtLeast, AtMost };

/// Order-preserving filter to entries whose feature is >= z (or <= z).
ScoredCorpus stratify(const ScoredCorpus& corpus, const std::string& feature, long z,
                      StratifyDirection direction);

struct StratumScores {
    long z = 0;
    double bleu_a = 0.0;
    double bleu_b = 0.0;
    double delta = 0.0;
    std::optional<double> delta1; // delta(z) - delta(1); absent if z=1 stratum empty
};

struct StratifiedReport {
    std::string feature;
    StratifyDirection direction;
    std::vector<StratumScores> rows; // empty strata omitted, never zero
};

/// Per-threshold BLEU of both systems on the stratified subsets. Both
/// corpora must list the same ids in the same order.
StratifiedReport delta_report(const ScoredCorpus& sys_a, const ScoredCorpus& sys_b,
                              const std::string& feature, long z_min, long z_max,
                              StratifyDirection direction);

std::string report_to_json(const StratifiedReport& report);
std::string report_to_csv(const StratifiedReport& report);

} // namespace amrpe
