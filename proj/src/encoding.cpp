#include "amrpe/encoding.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <nlohmann/json.hpp>

#include "amrpe/matrix_io.hpp"
#include "amrpe/rng.hpp"

namespace amrpe {

const char* const kPromptPrefix =
    "<AMR-to-Text>\n"
    "[Task: AMR-to-Text]\n"
    "[Instruction] Convert the following AMR into natural language text.\n"
    "[Input: AMR]\n";
const char* const kPromptSuffix = "[Output: Text]";

// ---------------------------------------------------------------------------
// Tokenizer

Tokenizer Tokenizer::whitespace() { return Tokenizer(Mode::whitespace, false); }

void Tokenizer::insert_token(const std::string& token, int id) {
    if (token.empty()) fail(errc::duplicate_vocab_entry, "empty vocabulary entry");
    if (!id_of_.emplace(token, id).second)
        fail(errc::duplicate_vocab_entry, "token '" + token + "' listed twice");
    max_piece_len_ = std::max(max_piece_len_, token.size());
    next_id_ = std::max(next_id_, id + 1);
    greedy_vocab_.insert(token);
}

Tokenizer Tokenizer::greedy(std::vector<std::string> vocab, bool strict) {
    if (vocab.empty()) return whitespace(); // empty vocabulary degrades gracefully
    Tokenizer t(Mode::greedy, strict);
    for (auto& token : vocab) t.insert_token(token, static_cast<int>(t.id_of_.size()));
    return t;
}

Tokenizer Tokenizer::load_vocab(const std::string& path, bool strict) {
    std::ifstream in(path);
    if (!in) fail(errc::io_error, "cannot open vocabulary file '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    std::string content = buffer.str();

    std::size_t first = content.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && content[first] == '{') {
        auto j = nlohmann::json::parse(content, nullptr, false);
        if (j.is_discarded() || !j.is_object())
            fail(errc::io_error, "vocabulary file '" + path + "' is not a JSON object");
        if (j.empty()) return whitespace();
        Tokenizer t(Mode::greedy, strict);
        std::unordered_set<long> seen_ids;
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (!it.value().is_number_integer() || it.value().get<long>() < 0)
                fail(errc::io_error,
                     "vocabulary id for '" + it.key() + "' is not a non-negative integer");
            long id = it.value().get<long>();
            if (!seen_ids.insert(id).second)
                fail(errc::duplicate_vocab_entry, "id " + std::to_string(id) + " assigned twice");
            t.insert_token(it.key(), static_cast<int>(id));
        }
        return t;
    }

    std::vector<std::string> tokens;
    std::string line;
    std::istringstream lines(content);
    while (std::getline(lines, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) tokens.push_back(line);
    }
    return greedy(std::move(tokens), strict);
}

std::vector<std::string> Tokenizer::split(const std::string& text) const {
    std::vector<std::string> pieces;
    if (mode_ == Mode::whitespace) {
        std::size_t i = 0;
        while (i < text.size()) {
            while (i < text.size() && text[i] == ' ') ++i;
            std::size_t start = i;
            while (i < text.size() && text[i] != ' ') ++i;
            if (i > start) pieces.push_back(text.substr(start, i - start));
        }
        return pieces;
    }
    // greedy longest match
    std::size_t i = 0;
    while (i < text.size()) {
        std::size_t longest = 0;
        std::size_t cap = std::min(max_piece_len_, text.size() - i);
        for (std::size_t len = cap; len >= 1; --len) {
            if (greedy_vocab_.count(text.substr(i, len))) {
                longest = len;
                break;
            }
        }
        if (longest == 0) {
            if (strict_)
                fail(errc::unknown_token,
                     "no vocabulary entry matches at '" + text.substr(i, 8) + "'");
            pieces.push_back(text.substr(i, 1)); // lenient: single-char fallback
            ++i;
        } else {
            pieces.push_back(text.substr(i, longest));
            i += longest;
        }
    }
    return pieces;
}

int Tokenizer::piece_id(const std::string& piece) {
    auto it = id_of_.find(piece);
    if (it != id_of_.end()) return it->second;
    if (mode_ == Mode::greedy && strict_)
        fail(errc::unknown_token, "token '" + piece + "' not in vocabulary");
    int id = next_id_++;
    id_of_.emplace(piece, id);
    return id;
}

TokenizedLinearization tokenize_nodewise(const LabelSequence& seq, Tokenizer& tokenizer) {
    TokenizedLinearization out;
    out.node_token_counts.reserve(seq.labels.size());
    for (int i = 0; i < seq.size(); ++i) {
        auto pieces = tokenizer.split(seq.labels[i].text);
        if (pieces.empty())
            fail(errc::empty_tokenization,
                 "label " + std::to_string(i) + " ('" + seq.labels[i].text +
                     "') produced no tokens");
        out.node_token_counts.push_back(static_cast<int>(pieces.size()));
        for (auto& piece : pieces) {
            out.tokens.push_back(tokenizer.piece_id(piece));
            out.token_to_node.push_back(i);
            out.token_texts.push_back(std::move(piece));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Sinusoidal and MLP encodings

Eigen::VectorXd sin_pe(int j, int d, double base) {
    if (j < 0 || d <= 0 || d % 2 != 0 || base <= 1.0)
        fail(errc::invariant_violation, "sin_pe requires j >= 0, even d, base > 1");
    Eigen::VectorXd v(d);
    for (int m = 0; m < d / 2; ++m) {
        double angle = static_cast<double>(j) * std::pow(base, -2.0 * m / d);
        v(2 * m) = std::sin(angle);
        v(2 * m + 1) = std::cos(angle);
    }
    return v;
}

double gelu(double x) { return 0.5 * x * (1.0 + std::erf(x / std::numbers::sqrt2)); }

double gelu_grad(double x) {
    double cdf = 0.5 * (1.0 + std::erf(x / std::numbers::sqrt2));
    double pdf = std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
    return cdf + x * pdf;
}

MlpParams seeded_mlp_params(int in_dim, int hidden, int out_dim, std::uint64_t seed) {
    if (in_dim < 1 || hidden < 1 || out_dim < 1)
        fail(errc::dimension_mismatch, "MLP dimensions must be positive");
    SplitMix64 rng(seed);
    MlpParams params;
    params.w1.resize(hidden, in_dim);
    params.w2.resize(out_dim, hidden);
    params.b1 = Eigen::VectorXd::Zero(hidden);
    params.b2 = Eigen::VectorXd::Zero(out_dim);
    double a1 = std::sqrt(6.0 / (in_dim + hidden));
    for (int r = 0; r < hidden; ++r)
        for (int c = 0; c < in_dim; ++c) params.w1(r, c) = rng.next_uniform(-a1, a1);
    double a2 = std::sqrt(6.0 / (hidden + out_dim));
    for (int r = 0; r < out_dim; ++r)
        for (int c = 0; c < hidden; ++c) params.w2(r, c) = rng.next_uniform(-a2, a2);
    return params;
}

namespace {

void check_mlp_dims(const MlpParams& p) {
    if (p.b1.size() != p.w1.rows() || p.w2.cols() != p.w1.rows() || p.b2.size() != p.w2.rows())
        fail(errc::dimension_mismatch, "inconsistent MLP parameter shapes");
}

} // namespace

Eigen::VectorXd mlp_forward(const MlpParams& params, const Eigen::VectorXd& x) {
    check_mlp_dims(params);
    if (x.size() != params.w1.cols())
        fail(errc::dimension_mismatch,
             "input has " + std::to_string(x.size()) + " dims, expected " +
                 std::to_string(params.w1.cols()));
    Eigen::VectorXd z = params.w1 * x + params.b1;
    Eigen::VectorXd a = z.unaryExpr([](double v) { return gelu(v); });
    return params.w2 * a + params.b2;
}

MlpGradients mlp_backward(const MlpParams& params, const Eigen::VectorXd& x,
                          const Eigen::VectorXd& upstream) {
    check_mlp_dims(params);
    if (x.size() != params.w1.cols() || upstream.size() != params.w2.rows())
        fail(errc::dimension_mismatch, "mlp_backward shape mismatch");

    Eigen::VectorXd z = params.w1 * x + params.b1;
    Eigen::VectorXd a = z.unaryExpr([](double v) { return gelu(v); });

    MlpGradients g;
    g.b2 = upstream;
    g.w2 = upstream * a.transpose();
    Eigen::VectorXd da = params.w2.transpose() * upstream;
    Eigen::VectorXd dz = da.cwiseProduct(z.unaryExpr([](double v) { return gelu_grad(v); }));
    g.b1 = dz;
    g.w1 = dz * x.transpose();
    g.x = params.w1.transpose() * dz;
    return g;
}

Eigen::MatrixXd build_mlp_inputs(const Eigen::MatrixXd& node_pe,
                                 const TokenizedLinearization& tok, const SinConfig& sin) {
    const int labels = static_cast<int>(tok.node_token_counts.size());
    if (node_pe.rows() != labels)
        fail(errc::dimension_mismatch,
             "node PE has " + std::to_string(node_pe.rows()) + " rows for " +
                 std::to_string(labels) + " labels");

    Eigen::MatrixXd inputs(tok.p(), node_pe.cols() + sin.d);
    int t = 0;
    for (int i = 0; i < labels; ++i) {
        const int count = tok.node_token_counts[i];
        for (int idx = 0; idx < count; ++idx, ++t) {
            int j;
            if (sin.zero_based)
                j = idx;
            else
                j = count > 1 ? idx + 1 : 0; // single-token labels use SinPE(0)
            inputs.row(t) << node_pe.row(i), sin_pe(j, sin.d, sin.base).transpose();
        }
    }
    return inputs;
}

Eigen::MatrixXd assemble_amr_pe(const Eigen::MatrixXd& node_pe,
                                const TokenizedLinearization& tok, const MlpParams& params,
                                const SinConfig& sin) {
    Eigen::MatrixXd inputs = build_mlp_inputs(node_pe, tok, sin);
    if (params.in_dim() != inputs.cols())
        fail(errc::dimension_mismatch,
             "MLP expects " + std::to_string(params.in_dim()) + " input dims, got " +
                 std::to_string(inputs.cols()));
    Eigen::MatrixXd pe(inputs.rows(), params.out_dim());
    for (Eigen::Index r = 0; r < inputs.rows(); ++r)
        pe.row(r) = mlp_forward(params, inputs.row(r).transpose()).transpose();
    return pe;
}

// ---------------------------------------------------------------------------
// Embedding injection

EmbeddingTable seeded_embedding_table(int vocab_size, int d_emb, std::uint64_t seed) {
    if (vocab_size < 1 || d_emb < 1)
        fail(errc::dimension_mismatch, "embedding table dimensions must be positive");
    SplitMix64 rng(seed);
    EmbeddingTable table;
    table.rows.resize(vocab_size, d_emb);
    for (int r = 0; r < vocab_size; ++r)
        for (int c = 0; c < d_emb; ++c) table.rows(r, c) = rng.next_uniform(-1.0, 1.0);
    return table;
}

EmbeddingTable load_embedding_table(const std::string& path) {
    EmbeddingTable table;
    table.rows = read_matrix(path);
    if (table.rows.rows() < 1 || table.rows.cols() < 1)
        fail(errc::dimension_mismatch, "embedding table in '" + path + "' is empty");
    return table;
}

Eigen::MatrixXd inject(const EmbeddingTable& table, std::span<const int> prefix,
                       const TokenizedLinearization& tok, std::span<const int> suffix,
                       const Eigen::MatrixXd& pe) {
    if (pe.rows() != tok.p())
        fail(errc::length_mismatch,
             "PE matrix has " + std::to_string(pe.rows()) + " rows for " +
                 std::to_string(tok.p()) + " tokens");
    if (pe.cols() != table.dim())
        fail(errc::length_mismatch, "PE width does not match embedding width");

    auto lookup = [&](int id) -> Eigen::RowVectorXd {
        if (id < 0 || id >= table.vocab_size())
            fail(errc::length_mismatch, "token id " + std::to_string(id) + " out of range");
        return table.rows.row(id);
    };

    const Eigen::Index total =
        static_cast<Eigen::Index>(prefix.size() + tok.tokens.size() + suffix.size());
    Eigen::MatrixXd h(total, table.dim());
    Eigen::Index r = 0;
    for (int id : prefix) h.row(r++) = lookup(id);
    for (std::size_t i = 0; i < tok.tokens.size(); ++i, ++r)
        h.row(r) = lookup(tok.tokens[i]) + pe.row(static_cast<Eigen::Index>(i));
    for (int id : suffix) h.row(r++) = lookup(id);
    return h;
}

} // namespace amrpe
