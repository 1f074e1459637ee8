#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "amrpe/errors.hpp"

namespace amrpe {

struct PipelineConfig {
    int k = 30;
    double q = 0.25;
    double sin_base = 1000.0;
    int sin_dim = 8;
    int d_emb = 64;
    int hidden = 0; // 0 = same as d_emb
    std::uint64_t seed = 0;
    std::string vocab_path; // empty = whitespace tokenizer
    bool strict = false;
    bool f64 = false; // export matrices as 64-bit floats
    bool intra_zero_based = false;
    bool emit_spectrum = false; // also export eigenvalues + complex eigenvectors
    int jobs = 1;

    int effective_hidden() const { return hidden > 0 ? hidden : d_emb; }
    void validate() const; // k >= 1, sin_dim even, q >= 0, d_emb >= 1
};

/// Flat "key = value" text (# comments) or a JSON object. Unknown keys fail.
PipelineConfig load_config_file(const std::string& path);

/// Streams one JSON record per corpus entry ({id, sentence, root, nodes,
/// edges, stats}) to `out`; lenient-mode warnings go to `diag`.
/// Returns the process exit code (0 ok, 2 data error).
int run_parse(const std::string& input_path, std::ostream& out, std::ostream& diag,
              bool strict);

/// Full per-entry export: linearization text + label sidecar, SPG JSON/DOT,
/// node-PE and AMR-PE matrices, token alignment, and a checksummed manifest.
/// Deterministic for a fixed config and seed.
int run_pipeline(const std::string& input_path, const std::string& out_dir,
                 const PipelineConfig& cfg, std::ostream& log, std::ostream& diag);

struct EvalOptions {
    std::string feature = "depth";
    long z_min = 1;
    long z_max = -1; // -1 = up to the max feature value present
    bool at_most = false; // direction: default >=, at_most switches to <=
    std::string ids_path; // optional; defaults to line indices "0", "1", ...
};

/// Stratified BLEU delta report between two hypothesis files against shared
/// references; writes <out_base>.json and <out_base>.csv.
int run_eval(const std::string& refs_path, const std::string& hyps_a_path,
             const std::string& hyps_b_path, const std::string& features_path,
             const std::string& out_base, const EvalOptions& opts, std::ostream& log,
             std::ostream& diag);

/// Re-reads a manifest and checks every recorded checksum against the
/// payload files next to it.
bool verify_manifest(const std::string& manifest_path, std::string* first_error = nullptr);

/// Exit-code mapping used by the CLI: 2 for data errors, 3 for numeric
/// failures.
int exit_code_for(const Error& err);

} // namespace amrpe
