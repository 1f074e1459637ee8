#include "amrpe/pipeline.hpp"

#include <atomic>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "amrpe/amr.hpp"
#include "amrpe/encoding.hpp"
#include "amrpe/linearize.hpp"
#include "amrpe/matrix_io.hpp"
#include "amrpe/metrics.hpp"
#include "amrpe/spectral.hpp"
#include "amrpe/spg.hpp"

namespace amrpe {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

void PipelineConfig::validate() const {
    if (k < 1) fail(errc::invariant_violation, "k must be >= 1");
    if (sin_dim < 2 || sin_dim % 2 != 0)
        fail(errc::invariant_violation, "sin_dim must be a positive even number");
    if (q < 0) fail(errc::invariant_violation, "q must be >= 0");
    if (d_emb < 1) fail(errc::invariant_violation, "d_emb must be >= 1");
    if (hidden < 0) fail(errc::invariant_violation, "hidden must be >= 0 (0 means d_emb)");
    if (sin_base <= 1.0) fail(errc::invariant_violation, "sin_base must be > 1");
    if (jobs < 1) fail(errc::invariant_violation, "jobs must be >= 1");
}

namespace {

[[noreturn]] void bad_config(const std::string& key, const std::string& value) {
    fail(errc::io_error, "config key '" + key + "' has a malformed value '" + value + "'");
}

void apply_config_pair(PipelineConfig& cfg, const std::string& key, const std::string& value) {
    auto as_bool = [&]() {
        if (value == "true" || value == "1" || value == "yes") return true;
        if (value == "false" || value == "0" || value == "no") return false;
        bad_config(key, value);
    };
    try {
        if (key == "k") cfg.k = std::stoi(value);
        else if (key == "q") cfg.q = std::stod(value);
        else if (key == "sin_base") cfg.sin_base = std::stod(value);
        else if (key == "sin_dim") cfg.sin_dim = std::stoi(value);
        else if (key == "d_emb") cfg.d_emb = std::stoi(value);
        else if (key == "hidden") cfg.hidden = std::stoi(value);
        else if (key == "seed") cfg.seed = std::stoull(value);
        else if (key == "vocab") cfg.vocab_path = value;
        else if (key == "strict") cfg.strict = as_bool();
        else if (key == "f64") cfg.f64 = as_bool();
        else if (key == "intra_zero_based") cfg.intra_zero_based = as_bool();
        else if (key == "emit_spectrum") cfg.emit_spectrum = as_bool();
        else if (key == "jobs") cfg.jobs = std::stoi(value);
        else fail(errc::io_error, "unknown config key '" + key + "'");
    } catch (const std::invalid_argument&) {
        bad_config(key, value);
    } catch (const std::out_of_range&) {
        bad_config(key, value);
    }
}

std::string trimmed(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string json_scalar_to_string(const nlohmann::json& v) {
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
}

} // namespace

PipelineConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(errc::io_error, "cannot open config file '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    std::string content = buffer.str();

    PipelineConfig cfg;
    std::size_t first = content.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && content[first] == '{') {
        auto j = nlohmann::json::parse(content, nullptr, false);
        if (j.is_discarded() || !j.is_object())
            fail(errc::io_error, "config file '" + path + "' is not a JSON object");
        for (auto it = j.begin(); it != j.end(); ++it)
            apply_config_pair(cfg, it.key(), json_scalar_to_string(it.value()));
        return cfg;
    }

    std::istringstream lines(content);
    std::string line;
    while (std::getline(lines, line)) {
        std::string t = trimmed(line);
        if (t.empty() || t[0] == '#') continue;
        std::size_t eq = t.find('=');
        if (eq == std::string::npos)
            fail(errc::io_error, "config line is not 'key = value': '" + t + "'");
        apply_config_pair(cfg, trimmed(t.substr(0, eq)), trimmed(t.substr(eq + 1)));
    }
    return cfg;
}

// ---------------------------------------------------------------------------
// parse command

namespace {

ordered_json stats_json(const GraphStats& stats) {
    ordered_json j;
    j["depth"] = stats.depth;
    j["node_count"] = stats.node_count;
    j["edge_count"] = stats.edge_count;
    j["reentrancy_count"] = stats.reentrancy_count;
    return j;
}

} // namespace

int run_parse(const std::string& input_path, std::ostream& out, std::ostream& diag,
              bool strict) {
    std::ifstream in(input_path);
    if (!in) {
        diag << "error: cannot open '" << input_path << "'\n";
        return 2;
    }
    CorpusReadOptions opts;
    opts.strict = strict;
    opts.on_warning = [&](long line, const std::string& message) {
        diag << "warning: skipped block at line " << line << ": " << message << "\n";
    };
    std::vector<CorpusEntry> entries;
    try {
        entries = read_corpus(in, opts);
    } catch (const Error& err) {
        diag << "error: " << err.what() << "\n";
        return exit_code_for(err);
    }
    for (const auto& entry : entries) {
        ordered_json record;
        record["id"] = entry.id;
        record["sentence"] = entry.sentence;
        ordered_json graph = ordered_json::parse(graph_to_json(entry.graph));
        record["root"] = graph["root"];
        record["nodes"] = graph["nodes"];
        record["edges"] = graph["edges"];
        record["stats"] = stats_json(graph_stats(entry.graph));
        out << record.dump() << "\n";
    }
    return 0;
}

// ---------------------------------------------------------------------------
// pipeline command

namespace {

std::string sanitize_id(const std::string& id) {
    std::string out;
    for (char c : id)
        out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.')
                   ? c
                   : '_';
    return out.empty() ? "entry" : out;
}

ordered_json config_json(const PipelineConfig& cfg) {
    ordered_json j;
    j["k"] = cfg.k;
    j["q"] = cfg.q;
    j["sin_base"] = cfg.sin_base;
    j["sin_dim"] = cfg.sin_dim;
    j["d_emb"] = cfg.d_emb;
    j["hidden"] = cfg.effective_hidden();
    j["seed"] = cfg.seed;
    j["vocab"] = cfg.vocab_path;
    j["tokenizer"] = cfg.vocab_path.empty() ? "whitespace" : "greedy";
    j["strict"] = cfg.strict;
    j["f64"] = cfg.f64;
    j["intra_zero_based"] = cfg.intra_zero_based;
    j["emit_spectrum"] = cfg.emit_spectrum;
    return j;
}

struct EntryResult {
    std::string id;
    std::string base; // sanitized, de-duplicated filename stem
    std::string linearized, labels_json, spg_json, spg_dot, tokens_json;
    Eigen::MatrixXd node_pe, amr_pe;
    Eigen::MatrixXcd eigenvectors; // only when emit_spectrum is on
    Eigen::MatrixXd eigenvalues;
    GraphStats stats;
    std::string log_line;
};

struct PreparedEntry {
    CorpusEntry entry;
    std::string base;
    LabelSequence seq;
    TokenizedLinearization tok;
};

EntryResult process_entry(PreparedEntry& p, const PipelineConfig& cfg, const MlpParams& params,
                          const SinConfig& sin) {
    EntryResult r;
    r.id = p.entry.id;
    r.base = p.base;
    r.stats = graph_stats(p.entry.graph);

    Spg spg = transform(p.seq);
    MagneticLaplacian lap = magnetic_laplacian(spg, cfg.q);
    Spectrum spectrum = hermitian_eigen_lowest(lap, cfg.k);
    r.node_pe = node_pes(spectrum, cfg.k);
    r.amr_pe = assemble_amr_pe(r.node_pe, p.tok, params, sin);
    if (cfg.emit_spectrum) {
        r.eigenvectors = spectrum.eigenvectors;
        r.eigenvalues = spectrum.eigenvalues;
    }

    r.linearized = render_labels(p.seq) + "\n";
    r.labels_json = labels_to_json(p.seq);
    r.spg_json = spg_to_json(spg);
    r.spg_dot = spg_to_dot(spg);

    ordered_json tokens;
    tokens["tokens"] = p.tok.tokens;
    tokens["texts"] = p.tok.token_texts;
    tokens["token_to_node"] = p.tok.token_to_node;
    tokens["node_token_counts"] = p.tok.node_token_counts;
    tokens["p"] = p.tok.p();
    r.tokens_json = tokens.dump();

    r.log_line = r.id + ": L=" + std::to_string(spg.n) +
                 " edges=" + std::to_string(spg.edges.size()) +
                 " p=" + std::to_string(p.tok.p());
    return r;
}

void write_text(const fs::path& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(errc::io_error, "cannot open '" + path.string() + "' for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) fail(errc::io_error, "short write to '" + path.string() + "'");
}

void write_bundle(const fs::path& dir, const EntryResult& r, const PipelineConfig& cfg) {
    MatDtype dtype = cfg.f64 ? MatDtype::f64 : MatDtype::f32;
    struct Sidecar {
        const char* suffix;
        const std::string* contents;
    };
    const Sidecar sidecars[] = {
        {".linearized.txt", &r.linearized}, {".labels.json", &r.labels_json},
        {".spg.json", &r.spg_json},         {".spg.dot", &r.spg_dot},
        {".tokens.json", &r.tokens_json},
    };
    for (const auto& s : sidecars) write_text(dir / (r.base + s.suffix), *s.contents);
    write_matrix((dir / (r.base + ".node_pe.mat")).string(), r.node_pe, dtype);
    write_matrix((dir / (r.base + ".amr_pe.mat")).string(), r.amr_pe, dtype);
    if (cfg.emit_spectrum) {
        write_complex_matrix((dir / (r.base + ".spectrum")).string(), r.eigenvectors, dtype);
        write_matrix((dir / (r.base + ".eigenvalues.mat")).string(), r.eigenvalues, dtype);
    }

    ordered_json manifest;
    manifest["version"] = 1;
    manifest["graph_id"] = r.id;
    manifest["config"] = config_json(cfg);
    manifest["stats"] = stats_json(r.stats);
    ordered_json matrices = ordered_json::array();
    auto matrix_entry = [&](const std::string& name, Eigen::Index rows, Eigen::Index cols) {
        ordered_json j;
        j["name"] = name;
        j["rows"] = rows;
        j["cols"] = cols;
        j["dtype"] = cfg.f64 ? "f64" : "f32";
        j["checksum"] = fnv1a_file_hex((dir / name).string());
        return j;
    };
    matrices.push_back(
        matrix_entry(r.base + ".node_pe.mat", r.node_pe.rows(), r.node_pe.cols()));
    matrices.push_back(matrix_entry(r.base + ".amr_pe.mat", r.amr_pe.rows(), r.amr_pe.cols()));
    if (cfg.emit_spectrum) {
        Eigen::Index rows = r.eigenvectors.rows(), cols = r.eigenvectors.cols();
        matrices.push_back(matrix_entry(r.base + ".spectrum.re.mat", rows, cols));
        matrices.push_back(matrix_entry(r.base + ".spectrum.im.mat", rows, cols));
        matrices.push_back(matrix_entry(r.base + ".eigenvalues.mat", r.eigenvalues.rows(),
                                        r.eigenvalues.cols()));
    }
    manifest["matrices"] = std::move(matrices);
    ordered_json files = ordered_json::array();
    for (const auto& s : sidecars) {
        ordered_json j;
        j["name"] = r.base + s.suffix;
        j["checksum"] = fnv1a_file_hex((dir / (r.base + s.suffix)).string());
        files.push_back(std::move(j));
    }
    manifest["sidecars"] = std::move(files);
    write_text(dir / (r.base + ".manifest.json"), manifest.dump(2) + "\n");
}

} // namespace

int run_pipeline(const std::string& input_path, const std::string& out_dir,
                 const PipelineConfig& cfg, std::ostream& log, std::ostream& diag) {
    std::ifstream in(input_path);
    if (!in) {
        diag << "error: cannot open '" << input_path << "'\n";
        return 2;
    }

    CorpusReadOptions opts;
    opts.strict = cfg.strict;
    opts.on_warning = [&](long line, const std::string& message) {
        diag << "warning: skipped block at line " << line << ": " << message << "\n";
    };

    try {
        cfg.validate();
        fs::create_directories(out_dir);
        std::vector<CorpusEntry> entries = read_corpus(in, opts);

        Tokenizer tokenizer = cfg.vocab_path.empty()
                                  ? Tokenizer::whitespace()
                                  : Tokenizer::load_vocab(cfg.vocab_path, cfg.strict);
        MlpParams params = seeded_mlp_params(2 * cfg.k + cfg.sin_dim, cfg.effective_hidden(),
                                             cfg.d_emb, cfg.seed);
        SinConfig sin{cfg.sin_dim, cfg.sin_base, cfg.intra_zero_based};

        // stage 1, sequential: the whitespace tokenizer assigns ids in
        // first-seen order, so tokenization must follow input order
        std::vector<PreparedEntry> prepared;
        prepared.reserve(entries.size());
        std::set<std::string> used_bases;
        for (auto& entry : entries) {
            PreparedEntry p;
            p.base = sanitize_id(entry.id);
            while (!used_bases.insert(p.base).second) p.base += "_";
            try {
                p.seq = bfs_linearize(entry.graph, entry.id);
                p.tok = tokenize_nodewise(p.seq, tokenizer);
            } catch (const Error& err) {
                throw Error(err.code(), "entry '" + entry.id + "': " + err.what());
            }
            p.entry = std::move(entry);
            prepared.push_back(std::move(p));
        }

        // stage 2, parallel numeric work; results buffered per input index
        std::vector<EntryResult> results(prepared.size());
        std::vector<std::exception_ptr> errors(prepared.size());
        std::atomic<std::size_t> cursor{0};
        auto worker = [&]() {
            while (true) {
                std::size_t i = cursor.fetch_add(1);
                if (i >= prepared.size()) break;
                try {
                    results[i] = process_entry(prepared[i], cfg, params, sin);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        };
        std::size_t jobs = std::max<std::size_t>(
            1, std::min<std::size_t>(static_cast<std::size_t>(cfg.jobs), prepared.size()));
        if (jobs <= 1) {
            worker();
        } else {
            std::vector<std::thread> pool;
            for (std::size_t t = 0; t < jobs; ++t) pool.emplace_back(worker);
            for (auto& t : pool) t.join();
        }
        for (std::size_t i = 0; i < prepared.size(); ++i) {
            if (!errors[i]) continue;
            try {
                std::rethrow_exception(errors[i]);
            } catch (const Error& err) {
                throw Error(err.code(), "entry '" + prepared[i].entry.id + "': " + err.what());
            }
        }

        // stage 3, sequential: emit in input order
        for (const auto& r : results) {
            write_bundle(out_dir, r, cfg);
            log << r.log_line << "\n";
        }
        log << results.size() << " entries -> " << out_dir << "\n";
        return 0;
    } catch (const Error& err) {
        diag << "error: " << err.what() << "\n";
        return exit_code_for(err);
    }
}

// ---------------------------------------------------------------------------
// eval command

namespace {

std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(errc::io_error, "cannot open '" + path + "'");
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    return lines;
}

} // namespace

int run_eval(const std::string& refs_path, const std::string& hyps_a_path,
             const std::string& hyps_b_path, const std::string& features_path,
             const std::string& out_base, const EvalOptions& opts, std::ostream& log,
             std::ostream& diag) {
    try {
        auto refs = read_lines(refs_path);
        auto hyps_a = read_lines(hyps_a_path);
        auto hyps_b = read_lines(hyps_b_path);
        if (refs.size() != hyps_a.size() || refs.size() != hyps_b.size())
            fail(errc::length_mismatch,
                 "line counts differ: refs=" + std::to_string(refs.size()) +
                     " hyps_a=" + std::to_string(hyps_a.size()) +
                     " hyps_b=" + std::to_string(hyps_b.size()));
        if (refs.empty()) fail(errc::empty_corpus, "no evaluation entries");

        std::vector<std::string> ids;
        if (!opts.ids_path.empty()) {
            ids = read_lines(opts.ids_path);
            if (ids.size() != refs.size())
                fail(errc::length_mismatch, "ids file does not match the text files");
        } else {
            for (std::size_t i = 0; i < refs.size(); ++i) ids.push_back(std::to_string(i));
        }

        std::ifstream fin(features_path);
        if (!fin) fail(errc::io_error, "cannot open '" + features_path + "'");
        auto features = nlohmann::json::parse(fin, nullptr, false);
        if (features.is_discarded() || !features.is_object())
            fail(errc::io_error, "features sidecar is not a JSON object");

        ScoredCorpus sys_a, sys_b;
        long max_feature = 0;
        for (std::size_t i = 0; i < refs.size(); ++i) {
            auto it = features.find(ids[i]);
            if (it == features.end())
                fail(errc::unknown_feature, "no features for entry '" + ids[i] + "'");
            if (!it->is_object() || !it->contains(opts.feature))
                fail(errc::unknown_feature,
                     "entry '" + ids[i] + "' lacks feature '" + opts.feature + "'");
            std::map<std::string, long> feats;
            for (auto f = it->begin(); f != it->end(); ++f)
                if (f.value().is_number_integer()) feats[f.key()] = f.value().get<long>();
            max_feature = std::max(max_feature, feats[opts.feature]);
            sys_a.push_back({ids[i], refs[i], hyps_a[i], feats});
            sys_b.push_back({ids[i], refs[i], hyps_b[i], feats});
        }

        long z_max = opts.z_max >= 0 ? opts.z_max : max_feature;
        auto direction =
            opts.at_most ? StratifyDirection::AtMost : StratifyDirection::AtLeast;
        StratifiedReport report =
            delta_report(sys_a, sys_b, opts.feature, opts.z_min, z_max, direction);

        write_text(out_base + ".json", report_to_json(report) + "\n");
        write_text(out_base + ".csv", report_to_csv(report));
        log << "wrote " << out_base << ".json and " << out_base << ".csv ("
            << report.rows.size() << " strata)\n";
        return 0;
    } catch (const Error& err) {
        diag << "error: " << err.what() << "\n";
        return exit_code_for(err);
    }
}

// ---------------------------------------------------------------------------
// manifest verification

bool verify_manifest(const std::string& manifest_path, std::string* first_error) {
    std::ifstream in(manifest_path);
    if (!in) {
        if (first_error) *first_error = "cannot open " + manifest_path;
        return false;
    }
    auto j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded()) {
        if (first_error) *first_error = "manifest is not valid JSON";
        return false;
    }
    fs::path dir = fs::path(manifest_path).parent_path();
    auto check = [&](const nlohmann::json& rec) {
        std::string name = rec.at("name").get<std::string>();
        std::string expected = rec.at("checksum").get<std::string>();
        std::string actual;
        try {
            actual = fnv1a_file_hex((dir / name).string());
        } catch (const Error& err) {
            if (first_error) *first_error = err.what();
            return false;
        }
        if (actual != expected) {
            if (first_error) *first_error = "checksum mismatch for " + name;
            return false;
        }
        return true;
    };
    for (const char* section : {"matrices", "sidecars"}) {
        if (!j.contains(section)) continue;
        for (const auto& rec : j[section])
            if (!check(rec)) return false;
    }
    return true;
}

int exit_code_for(const Error& err) {
    return err.code() == errc::convergence_failure ? 3 : 2;
}

} // namespace amrpe
