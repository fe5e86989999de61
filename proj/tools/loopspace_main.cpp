// loopspace: batch driver for the loop-space geometry suites.
//
//   loopspace run --config cfg.json [--report out.json] [--csv out.csv]
//   loopspace gen --kind fourier_random --seed 1 --count 8 --out dir/
//   loopspace charts|transition|mollify|homotopy|fibration [flags]
//   loopspace actions --space c0 --delta 0.3 [--corpus dir/]
//
// Exit codes: 0 all checks pass, 1 check failure, 2 configuration error.

#include <cstdio>
#include <filesystem>
#include <iostream>

#include "CLI11.hpp"

#include "loopspace/actions.hpp"
#include "loopspace/corpus.hpp"
#include "loopspace/io.hpp"
#include "loopspace/suites.hpp"

namespace fs = std::filesystem;
using namespace loopspace;

namespace {

struct CommonFlags {
    std::string manifold = "sphere2";
    std::uint64_t seed = 20240901;
    double epsilon = 0.1;
    int grid_n = 256;
    int quadrature = 0;
    double safety = 0.9;
    int corpus_count = 12;
    std::string report_path;
    std::string csv_path;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--manifold", flags.manifold,
                    "euclidean:<n>, circle, sphere2, flat-torus2");
    cmd->add_option("--seed", flags.seed, "rng seed recorded in the report");
    cmd->add_option("--epsilon", flags.epsilon, "mollifier closeness target");
    cmd->add_option("--grid-n", flags.grid_n, "loop sample resolution");
    cmd->add_option("--quadrature", flags.quadrature,
                    "convolution quadrature resolution (0 = 4N)");
    cmd->add_option("--safety", flags.safety, "diagonal neighbourhood shrink factor");
    cmd->add_option("--corpus-count", flags.corpus_count, "generated corpus size");
    cmd->add_option("--report", flags.report_path, "write the JSON report here");
    cmd->add_option("--csv", flags.csv_path, "also write the residual table as CSV");
}

ExperimentConfig to_config(const CommonFlags& flags, const std::string& suite) {
    ExperimentConfig cfg;
    cfg.manifold = flags.manifold;
    cfg.seed = flags.seed;
    cfg.epsilon = flags.epsilon;
    cfg.grid_n = flags.grid_n;
    cfg.quadrature = flags.quadrature;
    cfg.safety = flags.safety;
    cfg.corpus_count = flags.corpus_count;
    cfg.suites = {suite};
    return cfg;
}

int emit_report(const ResidualReport& report, const std::string& report_path,
                const std::string& csv_path) {
    const std::string payload = report.to_json_string();
    if (report_path.empty())
        std::cout << payload << std::endl;
    else
        write_text_atomic(report_path, payload + "\n");
    if (!csv_path.empty()) write_text_atomic(csv_path, report.to_csv_string());
    std::fprintf(stderr, "%d/%zu checks passed\n", report.passed(),
                 report.checks.size());
    return report.all_pass() ? 0 : 1;
}

std::vector<std::string> corpus_files(const std::string& dir) {
    std::vector<std::string> files;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.path().extension() == ".json") files.push_back(entry.path().string());
    std::sort(files.begin(), files.end());
    if (files.empty()) throw ConfigError("corpus directory has no .json loops: " + dir);
    return files;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical toolkit for loop spaces of embedded manifolds"};
    app.require_subcommand(1);

    // run --config
    auto* run_cmd = app.add_subcommand("run", "run the suites selected by a config file");
    std::string config_path;
    std::string run_report, run_csv;
    run_cmd->add_option("--config", config_path, "experiment config (JSON)")->required();
    run_cmd->add_option("--report", run_report, "write the JSON report here");
    run_cmd->add_option("--csv", run_csv, "also write the residual table as CSV");

    // gen
    auto* gen_cmd = app.add_subcommand("gen", "generate a loop corpus");
    std::string gen_kind = "fourier_random";
    std::string gen_out;
    std::string gen_manifold = "sphere2";
    std::uint64_t gen_seed = 1;
    int gen_count = 1, gen_dim = 1, gen_degree = 5, gen_grid = 256;
    gen_cmd->add_option("--kind", gen_kind,
                        "fourier_random | lipschitz_random | triangle | great_circle");
    gen_cmd->add_option("--seed", gen_seed, "rng seed");
    gen_cmd->add_option("--count", gen_count, "number of loops");
    gen_cmd->add_option("--out", gen_out, "output directory")->required();
    gen_cmd->add_option("--dim", gen_dim, "ambient dimension (random kinds)");
    gen_cmd->add_option("--degree", gen_degree, "fourier degree");
    gen_cmd->add_option("--grid-n", gen_grid, "grid resolution");
    gen_cmd->add_option("--manifold", gen_manifold, "target manifold (great_circle)");

    // suite shorthands
    CommonFlags flags;
    std::vector<std::pair<std::string, CLI::App*>> suite_cmds;
    for (const std::string name : {"charts", "transition", "mollify", "homotopy",
                                   "fibration"}) {
        auto* cmd = app.add_subcommand(name, "run the " + name + " suite");
        add_common(cmd, flags);
        suite_cmds.emplace_back(name, cmd);
    }

    // actions: continuity analyzer
    auto* actions_cmd =
        app.add_subcommand("actions", "analyse the continuity ladder of the rotation action");
    std::string space = "c0";
    double delta = 0.3;
    std::string corpus_dir;
    std::string actions_report;
    std::uint64_t actions_seed = 20240901;
    int actions_count = 12, actions_grid = 256;
    actions_cmd->add_option("--space", space, "c0 | lipschitz | smooth");
    actions_cmd->add_option("--delta", delta, "witness scale for the refutation");
    actions_cmd->add_option("--corpus", corpus_dir, "directory of loop files");
    actions_cmd->add_option("--report", actions_report, "write the JSON report here");
    actions_cmd->add_option("--seed", actions_seed, "rng seed for generated corpora");
    actions_cmd->add_option("--corpus-count", actions_count, "generated corpus size");
    actions_cmd->add_option("--grid-n", actions_grid, "grid resolution");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) {
            const ExperimentConfig cfg = ExperimentConfig::from_json_file(config_path);
            return emit_report(run_experiment(cfg), run_report, run_csv);
        }
        if (gen_cmd->parsed()) {
            CorpusSpec spec;
            spec.kind = parse_corpus_kind(gen_kind);
            spec.seed = gen_seed;
            spec.count = gen_count;
            spec.dim = gen_dim;
            spec.degree = gen_degree;
            spec.grid_n = gen_grid;
            spec.manifold = gen_manifold;
            const auto paths = write_corpus(spec, gen_out);
            std::fprintf(stderr, "wrote %zu loops to %s\n", paths.size(),
                         gen_out.c_str());
            return 0;
        }
        if (actions_cmd->parsed()) {
            ExperimentConfig cfg;
            cfg.suites = {"actions"};
            cfg.space = space;
            cfg.delta = delta;
            cfg.seed = actions_seed;
            cfg.corpus_count = actions_count;
            cfg.grid_n = actions_grid;
            if (!corpus_dir.empty()) cfg.loop_files = corpus_files(corpus_dir);
            const ContinuityReport report = continuity_report(
                parse_space_tag(space), actions_corpus(cfg), delta);
            const std::string payload = report.to_json_string();
            if (actions_report.empty())
                std::cout << payload << std::endl;
            else
                write_text_atomic(actions_report, payload + "\n");
            return 0;
        }
        for (const auto& [name, cmd] : suite_cmds) {
            if (!cmd->parsed()) continue;
            return emit_report(run_experiment(to_config(flags, name)), flags.report_path,
                               flags.csv_path);
        }
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const Error& e) {
        std::fprintf(stderr, "check failure: %s\n", e.what());
        return 1;
    }
    return 2;
}
