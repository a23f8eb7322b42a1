#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qmoo/experiment.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCellFailed = 1;
constexpr int kExitInvalidSpec = 2;

qmoo::ExperimentSpec load_spec(const std::string& path, std::uint64_t seed_offset) {
    return qmoo::ExperimentSpec::parse_file(path, seed_offset);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"RMNK landscape benchmark harness: quantum multi-objective "
                 "optimization vs NSGA-II/III"};
    app.require_subcommand(1);

    std::string spec_path;
    std::string out_dir = "out";
    int workers = 1;
    bool force = false;
    bool svg = false;
    std::uint64_t seed_offset = 0;
    std::vector<std::string> run_dirs;

    auto* generate = app.add_subcommand("generate", "Write instance files for a parameter grid");
    generate->add_option("--spec", spec_path, "experiment spec (JSON)")->required();
    generate->add_option("--out", out_dir, "output directory");
    generate->add_flag("--force", force, "overwrite existing instance files");
    generate->add_option("--seed-offset", seed_offset, "offset added to instance seeds");

    auto* run = app.add_subcommand("run", "Execute all (instance x algorithm x seed) cells");
    run->add_option("--spec", spec_path, "experiment spec (JSON)")->required();
    run->add_option("--out", out_dir, "output directory");
    run->add_option("--workers", workers, "parallel worker threads");
    run->add_option("--seed-offset", seed_offset, "offset added to run seeds");

    auto* sweep = app.add_subcommand("sweep", "Hyperparameter grid with threshold statistics");
    sweep->add_option("--spec", spec_path, "experiment spec (JSON)")->required();
    sweep->add_option("--out", out_dir, "output directory");
    sweep->add_option("--workers", workers, "parallel worker threads");
    sweep->add_option("--seed-offset", seed_offset, "offset added to run seeds");

    auto* report = app.add_subcommand("report", "Aggregate run directories into tables/curves");
    report->add_option("dirs", run_dirs, "run output directories")->required();
    report->add_option("--out", out_dir, "output directory");
    report->add_flag("--svg", svg, "also emit SVG convergence plots");

    auto* analyze = app.add_subcommand("analyze", "Pareto-front connectivity sweep over a grid");
    analyze->add_option("--spec", spec_path, "experiment spec (JSON)")->required();
    analyze->add_option("--out", out_dir, "output directory");
    analyze->add_option("--seed-offset", seed_offset, "offset added to instance seeds");

    CLI11_PARSE(app, argc, argv);

    try {
        if (generate->parsed()) {
            const auto result = qmoo::cmd_generate(load_spec(spec_path, seed_offset), out_dir, force);
            std::printf("wrote %zu instance file(s) to %s\n", result.files.size(), out_dir.c_str());
            return kExitOk;
        }
        if (run->parsed()) {
            const auto summary = qmoo::cmd_run(load_spec(spec_path, seed_offset), out_dir, workers);
            std::printf("ran %d cell(s), %d failed\n", summary.cells, summary.failed);
            for (const auto& e : summary.errors) std::fprintf(stderr, "failed %s\n", e.c_str());
            return summary.failed == 0 ? kExitOk : kExitCellFailed;
        }
        if (sweep->parsed()) {
            const auto summary = qmoo::cmd_sweep(load_spec(spec_path, seed_offset), out_dir, workers);
            std::printf("swept %zu cell(s), %d run(s) failed; table in %s/sweep.csv\n",
                        summary.cells.size(), summary.failed, out_dir.c_str());
            return summary.failed == 0 ? kExitOk : kExitCellFailed;
        }
        if (report->parsed()) {
            std::vector<std::filesystem::path> dirs(run_dirs.begin(), run_dirs.end());
            const auto summary = qmoo::cmd_report(dirs, out_dir, svg);
            std::printf("aggregated %d trace(s) in %d group(s)\n", summary.traces, summary.groups);
            for (const auto& miss : summary.missing)
                std::fprintf(stderr, "missing/unreadable: %s\n", miss.c_str());
            return kExitOk;
        }
        if (analyze->parsed()) {
            qmoo::cmd_analyze(load_spec(spec_path, seed_offset), out_dir);
            std::printf("connectivity table in %s/connectivity.csv\n", out_dir.c_str());
            return kExitOk;
        }
    } catch (const qmoo::ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitInvalidSpec;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitCellFailed;
    }
    return kExitOk;
}
