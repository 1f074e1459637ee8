#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <fstream>
#include <sstream>

#include "amrpe/amr.hpp"
#include "amrpe/encoding.hpp"
#include "amrpe/linearize.hpp"
#include "amrpe/matrix_io.hpp"
#include "amrpe/metrics.hpp"
#include "amrpe/pipeline.hpp"
#include "amrpe/spectral.hpp"
#include "amrpe/spg.hpp"

namespace py = pybind11;
using namespace amrpe;

namespace {

std::vector<CorpusEntry> read_corpus_file(const std::string& path, bool strict) {
    std::ifstream in(path);
    if (!in) fail(errc::io_error, "cannot open '" + path + "'");
    CorpusReadOptions opts;
    opts.strict = strict;
    return read_corpus(in, opts);
}

Eigen::MatrixXd inject_py(const EmbeddingTable& table, const std::vector<int>& prefix,
                          const TokenizedLinearization& tok, const std::vector<int>& suffix,
                          const Eigen::MatrixXd& pe) {
    return inject(table, prefix, tok, suffix, pe);
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "AMR positional-encoding toolkit";

    py::register_exception<Error>(m, "Error");

    // amr
    py::class_<AmrNode>(m, "AmrNode")
        .def_readonly("id", &AmrNode::id)
        .def_readonly("concept", &AmrNode::concept_label)
        .def_readonly("is_attribute", &AmrNode::is_attribute);
    py::class_<AmrEdge>(m, "AmrEdge")
        .def_readonly("source", &AmrEdge::source)
        .def_readonly("target", &AmrEdge::target)
        .def_readonly("role", &AmrEdge::role);
    py::class_<AmrGraph>(m, "AmrGraph")
        .def_readonly("nodes", &AmrGraph::nodes)
        .def_readonly("edges", &AmrGraph::edges)
        .def_readonly("root", &AmrGraph::root);
    py::class_<GraphStats>(m, "GraphStats")
        .def_readonly("depth", &GraphStats::depth)
        .def_readonly("node_count", &GraphStats::node_count)
        .def_readonly("edge_count", &GraphStats::edge_count)
        .def_readonly("reentrancy_count", &GraphStats::reentrancy_count);
    py::class_<CorpusEntry>(m, "CorpusEntry")
        .def_readonly("id", &CorpusEntry::id)
        .def_readonly("sentence", &CorpusEntry::sentence)
        .def_readonly("graph", &CorpusEntry::graph)
        .def_readonly("raw_penman", &CorpusEntry::raw_penman);

    m.def("parse_penman", &parse_penman, py::arg("text"), py::arg("strict") = true);
    m.def("serialize_penman", &serialize_penman);
    m.def("read_corpus", &read_corpus_file, py::arg("path"), py::arg("strict") = false);
    m.def("graph_stats", &graph_stats);
    m.def("graph_to_json", &graph_to_json);
    m.def("canonical_signature", &canonical_signature);

    // linearizer
    py::enum_<LabelKind>(m, "LabelKind")
        .value("ConceptWithPointer", LabelKind::ConceptWithPointer)
        .value("Role", LabelKind::Role)
        .value("PointerRef", LabelKind::PointerRef)
        .value("Stop", LabelKind::Stop);
    py::class_<Label>(m, "Label")
        .def_readonly("kind", &Label::kind)
        .def_readonly("text", &Label::text)
        .def_readonly("pointer", &Label::pointer);
    py::class_<LabelSequence>(m, "LabelSequence")
        .def_readonly("labels", &LabelSequence::labels)
        .def_readonly("alignment", &LabelSequence::alignment)
        .def_readonly("source_graph_id", &LabelSequence::source_graph_id)
        .def("__len__", [](const LabelSequence& s) { return s.labels.size(); });

    m.def("bfs_linearize", &bfs_linearize, py::arg("graph"), py::arg("graph_id") = "");
    m.def("render_labels", &render_labels);
    m.def("parse_labels", &parse_labels);
    m.def("labels_to_json", &labels_to_json);

    // spg
    py::class_<Subgraph>(m, "Subgraph")
        .def_readonly("head", &Subgraph::head)
        .def_readonly("role_edges", &Subgraph::role_edges)
        .def_readonly("stop_index", &Subgraph::stop_index);
    py::class_<Spg>(m, "Spg")
        .def_readonly("n", &Spg::n)
        .def_readonly("node_labels", &Spg::node_labels)
        .def_readonly("edges", &Spg::edges)
        .def_readonly("pointer_groups", &Spg::pointer_groups)
        .def("has_edge", &Spg::has_edge);

    m.def("to_subgraphs", &to_subgraphs);
    m.def("transform", [](LabelSequence& seq) { return transform(seq); });
    m.def("spg_to_json", &spg_to_json);
    m.def("spg_to_dot", &spg_to_dot);
    m.def("adjacency_matrix", &adjacency_matrix);

    // spectral
    py::class_<MagneticLaplacian>(m, "MagneticLaplacian")
        .def_readonly("entries", &MagneticLaplacian::entries)
        .def_readonly("q", &MagneticLaplacian::q)
        .def_property_readonly("n", &MagneticLaplacian::n);
    py::class_<Spectrum>(m, "Spectrum")
        .def_readonly("eigenvalues", &Spectrum::eigenvalues)
        .def_readonly("eigenvectors", &Spectrum::eigenvectors)
        .def_readonly("q", &Spectrum::q)
        .def_readonly("k", &Spectrum::k);

    m.def("magnetic_laplacian", &magnetic_laplacian, py::arg("spg"), py::arg("q"));
    m.def("hermitian_eigen", &hermitian_eigen);
    m.def("hermitian_eigen_lowest", &hermitian_eigen_lowest, py::arg("lap"), py::arg("k"));
    m.def("node_pes", &node_pes, py::arg("spectrum"), py::arg("k"));
    m.def("symmetrized_normalized_laplacian", &symmetrized_normalized_laplacian);

    // encoding
    py::class_<Tokenizer>(m, "Tokenizer")
        .def_static("whitespace", &Tokenizer::whitespace)
        .def_static("greedy", &Tokenizer::greedy, py::arg("vocab"), py::arg("strict") = false)
        .def_static("load_vocab", &Tokenizer::load_vocab, py::arg("path"),
                    py::arg("strict") = false)
        .def("split", &Tokenizer::split)
        .def("piece_id", &Tokenizer::piece_id)
        .def("vocab_size", &Tokenizer::vocab_size);
    py::class_<TokenizedLinearization>(m, "TokenizedLinearization")
        .def_readonly("tokens", &TokenizedLinearization::tokens)
        .def_readonly("token_texts", &TokenizedLinearization::token_texts)
        .def_readonly("token_to_node", &TokenizedLinearization::token_to_node)
        .def_readonly("node_token_counts", &TokenizedLinearization::node_token_counts)
        .def_property_readonly("p", &TokenizedLinearization::p);
    py::class_<SinConfig>(m, "SinConfig")
        .def(py::init<>())
        .def(py::init([](int d, double base, bool zero_based) {
                 return SinConfig{d, base, zero_based};
             }),
             py::arg("d") = 8, py::arg("base") = 1000.0, py::arg("zero_based") = false)
        .def_readwrite("d", &SinConfig::d)
        .def_readwrite("base", &SinConfig::base)
        .def_readwrite("zero_based", &SinConfig::zero_based);
    py::class_<MlpParams>(m, "MlpParams")
        .def_readwrite("w1", &MlpParams::w1)
        .def_readwrite("b1", &MlpParams::b1)
        .def_readwrite("w2", &MlpParams::w2)
        .def_readwrite("b2", &MlpParams::b2)
        .def_property_readonly("in_dim", &MlpParams::in_dim)
        .def_property_readonly("hidden_dim", &MlpParams::hidden_dim)
        .def_property_readonly("out_dim", &MlpParams::out_dim);
    py::class_<MlpGradients>(m, "MlpGradients")
        .def_readonly("w1", &MlpGradients::w1)
        .def_readonly("b1", &MlpGradients::b1)
        .def_readonly("w2", &MlpGradients::w2)
        .def_readonly("b2", &MlpGradients::b2)
        .def_readonly("x", &MlpGradients::x);
    py::class_<EmbeddingTable>(m, "EmbeddingTable")
        .def_readonly("rows", &EmbeddingTable::rows)
        .def_property_readonly("vocab_size", &EmbeddingTable::vocab_size)
        .def_property_readonly("dim", &EmbeddingTable::dim);

    m.def("tokenize_nodewise", &tokenize_nodewise, py::arg("seq"), py::arg("tokenizer"));
    m.def("sin_pe", &sin_pe, py::arg("j"), py::arg("d"), py::arg("base"));
    m.def("gelu", &gelu);
    m.def("seeded_mlp_params", &seeded_mlp_params, py::arg("in_dim"), py::arg("hidden"),
          py::arg("out_dim"), py::arg("seed"));
    m.def("mlp_forward", &mlp_forward);
    m.def("mlp_backward", &mlp_backward);
    m.def("build_mlp_inputs", &build_mlp_inputs);
    m.def("assemble_amr_pe", &assemble_amr_pe, py::arg("node_pe"), py::arg("tok"),
          py::arg("params"), py::arg("sin") = SinConfig{});
    m.def("seeded_embedding_table", &seeded_embedding_table, py::arg("vocab_size"),
          py::arg("d_emb"), py::arg("seed"));
    m.def("load_embedding_table", &load_embedding_table, py::arg("path"));
    m.def("inject", &inject_py, py::arg("table"), py::arg("prefix"), py::arg("tok"),
          py::arg("suffix"), py::arg("pe"));
    m.attr("PROMPT_PREFIX") = kPromptPrefix;
    m.attr("PROMPT_SUFFIX") = kPromptSuffix;

    // metrics
    py::class_<ScoredEntry>(m, "ScoredEntry")
        .def(py::init([](std::string id, std::string reference, std::string hypothesis,
                         std::map<std::string, long> features) {
                 return ScoredEntry{std::move(id), std::move(reference),
                                    std::move(hypothesis), std::move(features)};
             }),
             py::arg("id"), py::arg("reference"), py::arg("hypothesis"),
             py::arg("features") = std::map<std::string, long>{})
        .def_readwrite("id", &ScoredEntry::id)
        .def_readwrite("reference", &ScoredEntry::reference)
        .def_readwrite("hypothesis", &ScoredEntry::hypothesis)
        .def_readwrite("features", &ScoredEntry::features);
    py::enum_<StratifyDirection>(m, "StratifyDirection")
        .value("AtLeast", StratifyDirection::AtLeast)
        .value("AtMost", StratifyDirection::AtMost);
    py::class_<StratumScores>(m, "StratumScores")
        .def_readonly("z", &StratumScores::z)
        .def_readonly("bleu_a", &StratumScores::bleu_a)
        .def_readonly("bleu_b", &StratumScores::bleu_b)
        .def_readonly("delta", &StratumScores::delta)
        .def_readonly("delta1", &StratumScores::delta1);
    py::class_<StratifiedReport>(m, "StratifiedReport")
        .def_readonly("feature", &StratifiedReport::feature)
        .def_readonly("direction", &StratifiedReport::direction)
        .def_readonly("rows", &StratifiedReport::rows);

    m.def("bleu", &bleu, py::arg("refs"), py::arg("hyps"));
    m.def("chrfpp", &chrfpp, py::arg("refs"), py::arg("hyps"));
    m.def("stratify", &stratify, py::arg("corpus"), py::arg("feature"), py::arg("z"),
          py::arg("direction") = StratifyDirection::AtLeast);
    m.def("delta_report", &delta_report, py::arg("sys_a"), py::arg("sys_b"),
          py::arg("feature"), py::arg("z_min"), py::arg("z_max"),
          py::arg("direction") = StratifyDirection::AtLeast);
    m.def("report_to_json", &report_to_json);
    m.def("report_to_csv", &report_to_csv);

    // io / pipeline
    py::class_<PipelineConfig>(m, "PipelineConfig")
        .def(py::init<>())
        .def_readwrite("k", &PipelineConfig::k)
        .def_readwrite("q", &PipelineConfig::q)
        .def_readwrite("sin_base", &PipelineConfig::sin_base)
        .def_readwrite("sin_dim", &PipelineConfig::sin_dim)
        .def_readwrite("d_emb", &PipelineConfig::d_emb)
        .def_readwrite("hidden", &PipelineConfig::hidden)
        .def_readwrite("seed", &PipelineConfig::seed)
        .def_readwrite("vocab_path", &PipelineConfig::vocab_path)
        .def_readwrite("strict", &PipelineConfig::strict)
        .def_readwrite("f64", &PipelineConfig::f64)
        .def_readwrite("intra_zero_based", &PipelineConfig::intra_zero_based)
        .def_readwrite("jobs", &PipelineConfig::jobs);
    m.def(
        "run_pipeline",
        [](const std::string& input, const std::string& out_dir, const PipelineConfig& cfg) {
            std::ostringstream log, diag;
            int code = run_pipeline(input, out_dir, cfg, log, diag);
            if (code != 0) fail(errc::io_error, diag.str());
            return log.str();
        },
        py::arg("input"), py::arg("out_dir"), py::arg("config") = PipelineConfig{});
    m.def("read_matrix", &read_matrix);
    m.def("verify_manifest",
          [](const std::string& path) { return verify_manifest(path, nullptr); });
}
