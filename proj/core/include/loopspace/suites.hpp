#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "loopspace/actions.hpp"
#include "loopspace/corpus.hpp"
#include "loopspace/manifold.hpp"

namespace loopspace {

/// Batch experiment description.  Parsed from JSON; every field has a
/// default so configs stay small.
struct ExperimentConfig {
    std::uint64_t seed = 20240901;
    std::string manifold = "sphere2";
    std::vector<std::string> suites; ///< nonempty subset of the known suites
    double epsilon = 0.1;
    int grid_n = 256;
    int quadrature = 0; ///< 0 = auto (4N)
    double safety = 0.9;
    std::string space = "c0"; ///< actions suite
    double delta = 0.3;       ///< actions witness scale
    int corpus_count = 12;
    std::vector<std::string> loop_files; ///< optional external corpus

    static ExperimentConfig from_json_string(const std::string& text);
    static ExperimentConfig from_json_file(const std::string& path);
    std::string to_json_string(int indent = 2) const;
    void validate() const;
};

/// One executed check: an identifier, the formula it pins down, the measured
/// residual and its gate.
struct CheckResult {
    std::string check;
    std::string anchor;
    double residual;
    double tolerance;
    bool pass;
};

struct ResidualReport {
    ExperimentConfig config;
    std::vector<CheckResult> checks;

    int passed() const;
    int failed() const;
    bool all_pass() const { return failed() == 0; }
    std::string to_json_string(int indent = 2) const;
    std::string to_csv_string() const;
};

extern const std::vector<std::string> kKnownSuites;

std::vector<CheckResult> suite_charts(const ExperimentConfig& cfg);
std::vector<CheckResult> suite_transition(const ExperimentConfig& cfg);
std::vector<CheckResult> suite_mollify(const ExperimentConfig& cfg);
std::vector<CheckResult> suite_homotopy(const ExperimentConfig& cfg);
std::vector<CheckResult> suite_actions(const ExperimentConfig& cfg);
std::vector<CheckResult> suite_fibration(const ExperimentConfig& cfg);

/// Runs the selected suites and assembles the report.  Deterministic under
/// the config seed; no timestamps enter the payload.
ResidualReport run_experiment(const ExperimentConfig& cfg);

/// Corpus for the actions suite: external files when given, otherwise
/// generated to match the space tag.
std::vector<Loop> actions_corpus(const ExperimentConfig& cfg);

} // namespace loopspace
