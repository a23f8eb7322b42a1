#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "qmoo/common.hpp"
#include "qmoo/landscape.hpp"

namespace qmoo {

/// Parsed, validated experiment description. The JSON schema is documented
/// in the README; any violation throws ConfigError (the CLI maps that to
/// exit code 2).
struct ExperimentSpec {
    nlohmann::json raw;
    std::uint64_t hash = 0;  // of the canonical dump, before seed offsetting

    std::vector<RmnkConfig> instance_configs;          // expanded grid
    std::vector<std::filesystem::path> instance_paths; // pre-built instances
    std::vector<nlohmann::json> algorithms;            // validated blocks
    std::vector<std::uint64_t> run_seeds;
    long max_iterations = 300;
    long max_evaluations = 0;
    double threshold = 0.95;
    bool normalize = true;
    std::vector<long> sweep_shots;
    std::vector<std::string> sweep_most_prob;          // numbers or "<f>*npf"

    static ExperimentSpec parse_file(const std::filesystem::path& path,
                                     std::uint64_t seed_offset = 0);
    static ExperimentSpec parse_json(const nlohmann::json& j, std::uint64_t seed_offset = 0);
};

std::string instance_key(const RmnkConfig& config);

struct GenerateResult {
    std::vector<std::string> files;
};
/// Writes one instance file per grid cell; refuses to overwrite without force.
GenerateResult cmd_generate(const ExperimentSpec& spec, const std::filesystem::path& out_dir,
                            bool force);

struct RunSummary {
    int cells = 0;
    int failed = 0;
    std::vector<std::string> errors;
};
/// Executes every (instance x algorithm x run_seed) cell, cell-parallel,
/// one trace CSV + JSON sidecar each, plus a manifest.
RunSummary cmd_run(const ExperimentSpec& spec, const std::filesystem::path& out_dir, int workers);

struct SweepCell {
    std::string instance;
    long n_shots = 0;
    std::string n_most_prob_spec;
    int n_most_prob = 0;
    std::string status;          // "run" or "superseded"
    std::string representative;  // cell id it defers to, when superseded
    int runs = 0;
    double success_rate = 0.0;
    double median_iterations = 0.0;  // +inf when censored
    double median_fevals = 0.0;
    bool optimal = false;  // best cell per instance among success rates > 50%
};
struct SweepSummary {
    std::vector<SweepCell> cells;
    int failed = 0;
};
/// Hyperparameter grid over (n_shots, n_most_prob) with threshold statistics
/// per cell; cells no larger sample can distinguish are merged into the
/// full-front representative.
SweepSummary cmd_sweep(const ExperimentSpec& spec, const std::filesystem::path& out_dir,
                       int workers);

struct ReportSummary {
    int groups = 0;
    int traces = 0;
    std::vector<std::string> missing;
};
/// Aggregates run directories into summary tables and convergence-curve CSVs
/// (optionally SVG plots).
ReportSummary cmd_report(const std::vector<std::filesystem::path>& run_dirs,
                         const std::filesystem::path& out_dir, bool svg);

/// Connectivity sweep over the spec's instance grid; writes connectivity.csv.
void cmd_analyze(const ExperimentSpec& spec, const std::filesystem::path& out_dir);

}  // namespace qmoo
