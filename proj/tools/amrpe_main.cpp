#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "amrpe/pipeline.hpp"

namespace {

// exit codes: 0 ok, 1 usage, 2 data error, 3 numeric failure

void add_config_flags(CLI::App* cmd, amrpe::PipelineConfig& cfg, std::string& config_path) {
    cmd->add_option("--config", config_path, "config file (key = value lines or JSON)");
    cmd->add_option("--k", cfg.k, "number of eigenvectors");
    cmd->add_option("--q", cfg.q, "magnetic potential parameter");
    cmd->add_option("--sin-base", cfg.sin_base, "sinusoidal frequency base");
    cmd->add_option("--sin-dim", cfg.sin_dim, "sinusoidal encoding width (even)");
    cmd->add_option("--d-emb", cfg.d_emb, "output embedding width");
    cmd->add_option("--hidden", cfg.hidden, "MLP hidden width (default: d-emb)");
    cmd->add_option("--seed", cfg.seed, "seed for MLP weights and exports");
    cmd->add_option("--vocab", cfg.vocab_path, "vocabulary file (default: whitespace tokenizer)");
    cmd->add_option("--jobs", cfg.jobs, "worker threads for the numeric stage");
    cmd->add_flag("--strict", cfg.strict,
                  "abort on malformed corpus blocks and unknown vocabulary tokens");
    cmd->add_flag("--f64", cfg.f64, "export matrices as 64-bit floats");
    cmd->add_flag("--intra-zero-based", cfg.intra_zero_based,
                  "index intra-node positions from 0 for all labels");
    cmd->add_flag("--emit-spectrum", cfg.emit_spectrum,
                  "also export eigenvalues and complex eigenvectors (re/im pair)");
}

// re-apply CLI values on top of a config file: flags win when given
void merge_config(const CLI::App* cmd, amrpe::PipelineConfig& cli_cfg,
                  amrpe::PipelineConfig& cfg) {
    auto take_if = [&](const char* flag, auto member) {
        if (cmd->count(flag) > 0) cfg.*member = cli_cfg.*member;
    };
    take_if("--k", &amrpe::PipelineConfig::k);
    take_if("--q", &amrpe::PipelineConfig::q);
    take_if("--sin-base", &amrpe::PipelineConfig::sin_base);
    take_if("--sin-dim", &amrpe::PipelineConfig::sin_dim);
    take_if("--d-emb", &amrpe::PipelineConfig::d_emb);
    take_if("--hidden", &amrpe::PipelineConfig::hidden);
    take_if("--seed", &amrpe::PipelineConfig::seed);
    take_if("--vocab", &amrpe::PipelineConfig::vocab_path);
    take_if("--jobs", &amrpe::PipelineConfig::jobs);
    take_if("--strict", &amrpe::PipelineConfig::strict);
    take_if("--f64", &amrpe::PipelineConfig::f64);
    take_if("--intra-zero-based", &amrpe::PipelineConfig::intra_zero_based);
    take_if("--emit-spectrum", &amrpe::PipelineConfig::emit_spectrum);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"AMR positional-encoding toolkit"};
    app.require_subcommand(1);

    // parse
    auto* parse_cmd = app.add_subcommand("parse", "parse a corpus to JSON graphs + stats");
    std::string parse_input, parse_output;
    bool parse_strict = false;
    parse_cmd->add_option("input", parse_input, "corpus file")->required();
    parse_cmd->add_option("-o,--output", parse_output, "output file (default: stdout)");
    parse_cmd->add_flag("--strict", parse_strict, "abort on the first malformed block");

    // pipeline
    auto* pipe_cmd = app.add_subcommand(
        "pipeline", "export linearization, SPG, and positional-encoding bundles");
    std::string pipe_input, pipe_outdir, pipe_config;
    amrpe::PipelineConfig cli_cfg;
    pipe_cmd->add_option("input", pipe_input, "corpus file")->required();
    pipe_cmd->add_option("-o,--out", pipe_outdir, "output directory")->required();
    add_config_flags(pipe_cmd, cli_cfg, pipe_config);

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "stratified BLEU delta report");
    std::string refs, hyps_a, hyps_b, features, out_base;
    amrpe::EvalOptions eval_opts;
    std::string direction = "ge";
    eval_cmd->add_option("--refs", refs, "reference text file")->required();
    eval_cmd->add_option("--hyps-a", hyps_a, "system A hypotheses")->required();
    eval_cmd->add_option("--hyps-b", hyps_b, "system B hypotheses")->required();
    eval_cmd->add_option("--features", features, "features sidecar JSON (id -> {depth, ...})")
        ->required();
    eval_cmd->add_option("--out", out_base, "output base path (.json/.csv appended)")
        ->required();
    eval_cmd->add_option("--feature", eval_opts.feature, "feature to stratify by");
    eval_cmd->add_option("--z-min", eval_opts.z_min, "lowest threshold");
    eval_cmd->add_option("--z-max", eval_opts.z_max, "highest threshold (default: max seen)");
    eval_cmd->add_option("--ids", eval_opts.ids_path, "ids file aligned with the text files");
    eval_cmd->add_option("--direction", direction, "ge (feature >= z) or le (feature <= z)")
        ->check(CLI::IsMember({"ge", "le"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 1;
    }

    try {
        if (*parse_cmd) {
            if (!parse_output.empty()) {
                std::ofstream out(parse_output);
                if (!out) {
                    std::cerr << "error: cannot open '" << parse_output << "'\n";
                    return 2;
                }
                return amrpe::run_parse(parse_input, out, std::cerr, parse_strict);
            }
            return amrpe::run_parse(parse_input, std::cout, std::cerr, parse_strict);
        }
        if (*pipe_cmd) {
            amrpe::PipelineConfig cfg;
            if (!pipe_config.empty()) cfg = amrpe::load_config_file(pipe_config);
            merge_config(pipe_cmd, cli_cfg, cfg);
            return amrpe::run_pipeline(pipe_input, pipe_outdir, cfg, std::cout, std::cerr);
        }
        if (*eval_cmd) {
            eval_opts.at_most = direction == "le";
            return amrpe::run_eval(refs, hyps_a, hyps_b, features, out_base, eval_opts,
                                   std::cout, std::cerr);
        }
    } catch (const amrpe::Error& err) {
        std::cerr << "error: " << err.what() << "\n";
        return amrpe::exit_code_for(err);
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 2;
    }
    return 1;
}
