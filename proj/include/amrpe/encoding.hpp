#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <Eigen/Dense>

#include "amrpe/linearize.hpp"

namespace amrpe {

/// Vocabulary adapter. Two modes:
///   whitespace  — split label text on spaces, token ids assigned in
///                 first-seen order (tokenize calls must stay sequential);
///   greedy      — longest-match against an explicit vocabulary. In strict
///                 mode unmatched input raises unknown_token; otherwise the
///                 offending character becomes a dynamically-added token.
class Tokenizer {
public:
    enum class Mode { whitespace, greedy };

    static Tokenizer whitespace();
    static Tokenizer greedy(std::vector<std::string> vocab, bool strict);
    /// Loads a newline-delimited token list (ids 0..n-1 in file order) or a
    /// JSON object {token: id} whose ids are preserved verbatim, so they can
    /// index a real model's embedding table. Merge rules are ignored.
    static Tokenizer load_vocab(const std::string& path, bool strict);

    std::vector<std::string> split(const std::string& text) const;
    int piece_id(const std::string& piece); // may grow the table
    /// One past the highest assigned id (= row count a compatible embedding
    /// table needs).
    int vocab_size() const { return next_id_; }
    Mode mode() const { return mode_; }
    bool strict() const { return strict_; }

private:
    Tokenizer(Mode mode, bool strict) : mode_(mode), strict_(strict) {}
    void insert_token(const std::string& token, int id);

    Mode mode_;
    bool strict_;
    int next_id_ = 0;
    std::unordered_map<std::string, int> id_of_;
    std::unordered_set<std::string> greedy_vocab_;
    std::size_t max_piece_len_ = 0;
};

/// Per-label tokenization of a whole linearization, concatenated in label
/// order with the token -> label alignment.
struct TokenizedLinearization {
    std::vector<int> tokens;            // token ids, length p
    std::vector<std::string> token_texts;
    std::vector<int> token_to_node;     // per-token label index (non-decreasing)
    std::vector<int> node_token_counts; // p_i per label
    int p() const { return static_cast<int>(tokens.size()); }
};

TokenizedLinearization tokenize_nodewise(const LabelSequence& seq, Tokenizer& tokenizer);

/// Interleaved sinusoid: dims 2m = sin(j / base^{2m/d}), 2m+1 = cos(...).
Eigen::VectorXd sin_pe(int j, int d, double base);

double gelu(double x);      // exact erf form
double gelu_grad(double x);

/// Two-layer GeLU MLP mapping R^{in} -> R^{out} through width h:
/// y = w2 * gelu(w1 * x + b1) + b2.
struct MlpParams {
    Eigen::MatrixXd w1; // h x in
    Eigen::VectorXd b1; // h
    Eigen::MatrixXd w2; // out x h
    Eigen::VectorXd b2; // out

    int in_dim() const { return static_cast<int>(w1.cols()); }
    int hidden_dim() const { return static_cast<int>(w1.rows()); }
    int out_dim() const { return static_cast<int>(w2.rows()); }
};

/// Xavier-uniform weights, zero biases, from a splitmix64 stream (row-major
/// fill of w1 then w2).
MlpParams seeded_mlp_params(int in_dim, int hidden, int out_dim, std::uint64_t seed);

Eigen::VectorXd mlp_forward(const MlpParams& params, const Eigen::VectorXd& x);

struct MlpGradients {
    Eigen::MatrixXd w1;
    Eigen::VectorXd b1;
    Eigen::MatrixXd w2;
    Eigen::VectorXd b2;
    Eigen::VectorXd x;
};

MlpGradients mlp_backward(const MlpParams& params, const Eigen::VectorXd& x,
                          const Eigen::VectorXd& upstream);

struct SinConfig {
    int d = 8;
    double base = 1000.0;
    /// Default indexing is j = 1..p_i for multi-token labels and j = 0 for
    /// single-token labels; zero_based switches to j = 0..p_i-1 uniformly.
    bool zero_based = false;
};

/// Rows of the MLP input, one per token: [node PE of its label || SinPE(j)].
Eigen::MatrixXd build_mlp_inputs(const Eigen::MatrixXd& node_pe,
                                 const TokenizedLinearization& tok,
                                 const SinConfig& sin);

/// Per-token positional encodings, p x out_dim, in token order.
Eigen::MatrixXd assemble_amr_pe(const Eigen::MatrixXd& node_pe,
                                const TokenizedLinearization& tok,
                                const MlpParams& params, const SinConfig& sin);

struct EmbeddingTable {
    Eigen::MatrixXd rows; // vocab_size x d_emb

    int vocab_size() const { return static_cast<int>(rows.rows()); }
    int dim() const { return static_cast<int>(rows.cols()); }
};

/// Uniform(-1, 1) rows from a splitmix64 stream (row-major fill); stands in
/// for a real model's embedding matrix in tests and offline runs.
EmbeddingTable seeded_embedding_table(int vocab_size, int d_emb, std::uint64_t seed);

/// Reads a real table from an SPE1 matrix file (rows = vocab, cols = d_emb).
EmbeddingTable load_embedding_table(const std::string& path);

/// Embeds [prefix || tokens || suffix] and adds pe over the token span only;
/// prompt rows are returned untouched.
Eigen::MatrixXd inject(const EmbeddingTable& table, std::span<const int> prefix,
                       const TokenizedLinearization& tok, std::span<const int> suffix,
                       const Eigen::MatrixXd& pe);

/// Prompt wrapped around the linearized graph; tokenized independently and
/// never positionally encoded.
extern const char* const kPromptPrefix;
extern const char* const kPromptSuffix;

} // namespace amrpe
