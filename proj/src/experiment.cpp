#include "qmoo/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "qmoo/analysis.hpp"
#include "qmoo/evolutionary.hpp"
#include "qmoo/pareto.hpp"
#include "qmoo/qmoo.hpp"
#include "qmoo/trace.hpp"

namespace qmoo {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kSpecFormatVersion = 1;
constexpr double kInf = std::numeric_limits<double>::infinity();

[[noreturn]] void spec_error(const std::string& message) {
    throw ConfigError("invalid spec: " + message);
}

std::string iso_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

long elapsed_ms(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::steady_clock::now() - start)
        .count();
}

void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn) {
    if (workers <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    auto loop = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            fn(i);
        }
    };
    std::vector<std::thread> pool;
    const auto n_threads = std::min<std::size_t>(static_cast<std::size_t>(workers), count);
    pool.reserve(n_threads);
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(loop);
    for (auto& th : pool) th.join();
}

// Grid tokens: epistasis entries may be numbers or "n/2" / "n-1".
int resolve_epistasis(const json& token, int n_vars) {
    if (token.is_number_integer()) return token.get<int>();
    if (token.is_string()) {
        const std::string s = token.get<std::string>();
        if (s == "n-1" || s == "N-1") return n_vars - 1;
        if (s == "n/2" || s == "N/2") return n_vars / 2;
        spec_error("unknown epistasis token '" + s + "' (use an integer, \"n/2\" or \"n-1\")");
    }
    spec_error("epistasis entries must be integers or strings");
}

// n_most_prob entries: numbers, or "<factor>*npf" / "npf" resolved against
// the exact-front size.
int resolve_most_prob(const std::string& token, int n_pf) {
    try {
        std::size_t used = 0;
        const int direct = std::stoi(token, &used);
        if (used == token.size()) return direct;
    } catch (const std::exception&) {
    }
    std::string s = token;
    s.erase(std::remove_if(s.begin(), s.end(), [](char c) { return c == ' '; }), s.end());
    if (s == "npf") return std::max(1, n_pf);
    const auto star = s.find("*npf");
    if (star != std::string::npos && star + 4 == s.size()) {
        try {
            std::size_t used = 0;
            const double factor = std::stod(s.substr(0, star), &used);
            if (used == star)
                return std::max(1, static_cast<int>(std::lround(factor * n_pf)));
        } catch (const std::exception&) {
        }
    }
    spec_error("unknown n_most_prob token '" + token + "' (use an integer or \"<f>*npf\")");
}

double resolve_mutation_rate(const json& block, int n_vars) {
    if (!block.contains("mutation_rate")) return 1.0 / n_vars;
    const auto& v = block.at("mutation_rate");
    if (v.is_number()) return v.get<double>();
    if (v.is_string() && (v.get<std::string>() == "1/n" || v.get<std::string>() == "1/N"))
        return 1.0 / n_vars;
    spec_error("mutation_rate must be a number or \"1/n\"");
}

std::string format_rho(double rho) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", rho);
    return buf;
}

struct Instance {
    std::string key;
    RmnkLandscape landscape;
};

std::vector<Instance> resolve_instances(const ExperimentSpec& spec) {
    std::vector<Instance> instances;
    for (const RmnkConfig& config : spec.instance_configs) {
        instances.push_back({instance_key(config), RmnkLandscape::generate(config)});
    }
    for (const fs::path& path : spec.instance_paths) {
        auto landscape = RmnkLandscape::load(path);
        instances.push_back({instance_key(landscape.config()), std::move(landscape)});
    }
    if (instances.empty()) spec_error("no instances requested");
    return instances;
}

std::string algorithm_label(const json& block) {
    if (block.contains("label")) return block.at("label").get<std::string>();
    return block.at("name").get<std::string>();
}

RunTrace run_algorithm(const json& block, const RmnkLandscape& landscape, std::uint64_t run_seed,
                       long max_iterations, long max_evaluations) {
    const std::string name = block.at("name").get<std::string>();
    if (name == "qmoo") {
        QmooHyperparams hp;
        hp.n_shots = block.value("n_shots", 1024L);
        hp.n_most_prob = block.value("n_most_prob", 20);
        hp.layers = block.value("layers", 1);
        hp.use_archive = block.value("archive", true);
        hp.use_substitution = block.value("substitution", true);
        hp.max_iterations = max_iterations;
        hp.max_evaluations = max_evaluations;
        hp.seed = run_seed;
        return qmoo_optimize(landscape, hp);
    }
    GaConfig config;
    config.population_size = block.value("population_size", name == "nsga3" ? 0 : 20);
    config.crossover_probability = block.value("crossover_probability", 1.0);
    config.mutation_rate = resolve_mutation_rate(block, landscape.n_vars());
    config.divisions_outer = block.value("divisions_outer", 12);
    config.max_evaluations = max_evaluations;
    config.seed = run_seed;
    if (name == "nsga2") return nsga2_run(landscape, config);
    return nsga3_run(landscape, config);
}

struct CellResult {
    std::string id;
    bool ok = false;
    std::string error;
    std::string trace_file;
};

// Shared by cmd_run and cmd_sweep: executes one cell and writes its trace
// CSV plus JSON sidecar. Only the sidecar and manifest carry wall time.
CellResult execute_cell(const json& block, const Instance& instance, std::uint64_t run_seed,
                        long max_iterations, long max_evaluations, const ExactFront* front,
                        double threshold, const fs::path& trace_dir) {
    CellResult result;
    result.id = algorithm_label(block) + "_" + instance.key + "_r" + std::to_string(run_seed);
    const auto start = std::chrono::steady_clock::now();
    try {
        RunTrace trace =
            run_algorithm(block, instance.landscape, run_seed, max_iterations, max_evaluations);
        json threshold_info;
        if (front != nullptr) {
            normalize_trace(trace, *front);
            const ThresholdStats stats = threshold_crossing(trace, threshold);
            threshold_info = {{"theta", threshold},
                              {"reached", stats.reached},
                              {"first_iteration", stats.first_iteration},
                              {"first_fevals", stats.first_fevals}};
        }

        const fs::path csv_path = trace_dir / (result.id + ".csv");
        {
            std::ofstream out(csv_path);
            if (!out) throw Error("cannot open " + csv_path.string() + " for writing");
            trace.write_csv(out);
        }
        {
            std::ofstream front_csv(trace_dir / (result.id + ".front.csv"));
            write_front_csv(front_csv, trace.final_front, trace.n_vars);
        }
        json sidecar;
        sidecar["cell"] = result.id;
        sidecar["algorithm"] = block;
        sidecar["algorithm"]["label"] = algorithm_label(block);
        sidecar["instance"] = {{"key", instance.key},
                               {"hash", hex64(trace.instance_hash)},
                               {"n_vars", instance.landscape.n_vars()},
                               {"n_objectives", instance.landscape.n_objectives()},
                               {"epistasis", instance.landscape.epistasis()},
                               {"rho", instance.landscape.config().rho},
                               {"instance_seed", instance.landscape.config().seed}};
        sidecar["run_seed"] = run_seed;
        sidecar["hv_ideal"] = front != nullptr ? json(front->hv_ideal) : json(nullptr);
        sidecar["n_pf"] = front != nullptr ? json(front->n_pf) : json(nullptr);
        sidecar["threshold"] = threshold_info.is_null() ? json(nullptr) : threshold_info;
        long last_iteration = trace.records.empty() ? 0 : trace.records.back().iteration;
        sidecar["totals"] = {{"iterations", last_iteration},
                             {"evaluations", trace.total_evaluations},
                             {"cache_hits", trace.cache_hits},
                             {"final_hv", trace.final_hv()},
                             {"front_size", trace.final_front.size()}};
        if (!trace.records.empty() && trace.algorithm == "qmoo")
            sidecar["final_params"] = trace.records.back().params;
        sidecar["budget_exhausted"] = trace.budget_exhausted;
        sidecar["wall_ms"] = elapsed_ms(start);
        std::ofstream side(trace_dir / (result.id + ".json"));
        side << sidecar.dump(1) << '\n';

        result.ok = true;
        result.trace_file = csv_path.filename().string();
    } catch (const std::exception& e) {
        result.error = e.what();
    }
    return result;
}

const ExactFront* front_for(const std::vector<ExactFront>& fronts, std::size_t index) {
    return fronts.empty() ? nullptr : &fronts[index];
}

}  // namespace

std::string instance_key(const RmnkConfig& config) {
    std::ostringstream os;
    os << "rmnk_n" << config.n_vars << "_m" << config.n_objectives << "_k" << config.epistasis
       << "_rho" << format_rho(config.rho) << "_s" << config.seed;
    return os.str();
}

ExperimentSpec ExperimentSpec::parse_file(const fs::path& path, std::uint64_t seed_offset) {
    std::ifstream in(path);
    if (!in) spec_error("cannot open " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        spec_error(std::string(e.what()));
    }
    return parse_json(j, seed_offset);
}

ExperimentSpec ExperimentSpec::parse_json(const json& j, std::uint64_t seed_offset) {
    ExperimentSpec spec;
    spec.raw = j;
    spec.hash = fnv1a64(j.dump());
    try {
        if (j.value("format_version", kSpecFormatVersion) != kSpecFormatVersion)
            spec_error("unsupported format_version");
        if (!j.contains("instances")) spec_error("missing \"instances\"");
        const auto& inst = j.at("instances");
        if (inst.contains("grid")) {
            const auto& grid = inst.at("grid");
            const auto n_list = grid.at("n_vars").get<std::vector<int>>();
            const auto m_list = grid.at("n_objectives").get<std::vector<int>>();
            const auto rho_list = grid.at("rho").get<std::vector<double>>();
            const auto seed_list = grid.at("seeds").get<std::vector<std::uint64_t>>();
            if (!grid.contains("epistasis")) spec_error("grid needs \"epistasis\"");
            std::set<std::tuple<int, int, int, double, std::uint64_t>> seen;
            for (int n : n_list) {
                for (int m : m_list) {
                    for (const auto& k_token : grid.at("epistasis")) {
                        const int k = resolve_epistasis(k_token, n);
                        for (double rho : rho_list) {
                            for (std::uint64_t s : seed_list) {
                                RmnkConfig config{n, m, k, rho, s + seed_offset};
                                config.validate();
                                if (seen.insert({n, m, k, rho, config.seed}).second)
                                    spec.instance_configs.push_back(config);
                            }
                        }
                    }
                }
            }
        }
        if (inst.contains("paths")) {
            for (const auto& p : inst.at("paths"))
                spec.instance_paths.emplace_back(p.get<std::string>());
        }
        if (spec.instance_configs.empty() && spec.instance_paths.empty())
            spec_error("instances must provide a \"grid\" or \"paths\"");

        if (j.contains("algorithms")) {
            std::set<std::string> labels;
            for (const auto& block : j.at("algorithms")) {
                const std::string name = block.value("name", "");
                if (name != "qmoo" && name != "nsga2" && name != "nsga3")
                    spec_error("algorithm name must be qmoo, nsga2 or nsga3");
                if (!labels.insert(algorithm_label(block)).second)
                    spec_error("duplicate algorithm label '" + algorithm_label(block) + "'");
                spec.algorithms.push_back(block);
            }
        }

        if (j.contains("run_seeds")) {
            spec.run_seeds = j.at("run_seeds").get<std::vector<std::uint64_t>>();
        } else if (j.contains("repetitions")) {
            const long reps = j.at("repetitions").get<long>();
            if (reps < 1) spec_error("repetitions must be positive");
            for (long r = 1; r <= reps; ++r)
                spec.run_seeds.push_back(static_cast<std::uint64_t>(r));
        } else {
            spec.run_seeds = {1};
        }
        if (spec.run_seeds.empty()) spec_error("run_seeds must be nonempty");
        for (auto& s : spec.run_seeds) s += seed_offset;

        if (j.contains("budget")) {
            const auto& budget = j.at("budget");
            spec.max_iterations = budget.value("max_iterations", 300L);
            spec.max_evaluations = budget.value("max_evaluations", 0L);
        }
        if (spec.max_iterations < 1) spec_error("budget.max_iterations must be positive");
        for (const auto& block : spec.algorithms) {
            const std::string name = block.at("name").get<std::string>();
            if (name != "qmoo" && spec.max_evaluations < 1)
                spec_error("nsga runs need budget.max_evaluations");
        }

        spec.threshold = j.value("threshold", 0.95);
        spec.normalize = j.value("normalize", true);

        if (j.contains("sweep")) {
            const auto& sweep = j.at("sweep");
            spec.sweep_shots = sweep.at("n_shots").get<std::vector<long>>();
            for (const auto& token : sweep.at("n_most_prob")) {
                if (token.is_number_integer())
                    spec.sweep_most_prob.push_back(std::to_string(token.get<long>()));
                else
                    spec.sweep_most_prob.push_back(token.get<std::string>());
            }
            if (spec.sweep_shots.empty() || spec.sweep_most_prob.empty())
                spec_error("sweep grids must be nonempty");
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const json::exception& e) {
        spec_error(std::string(e.what()));
    }
    return spec;
}

GenerateResult cmd_generate(const ExperimentSpec& spec, const fs::path& out_dir, bool force) {
    if (spec.instance_configs.empty()) spec_error("generate needs an instance grid");
    fs::create_directories(out_dir);
    GenerateResult result;
    for (const RmnkConfig& config : spec.instance_configs) {
        const fs::path path = out_dir / (instance_key(config) + ".json");
        if (fs::exists(path) && !force)
            throw Error("refusing to overwrite " + path.string() + " (use --force)");
        RmnkLandscape::generate(config).save(path);
        result.files.push_back(path.filename().string());
    }
    return result;
}

namespace {

std::vector<ExactFront> compute_fronts(const std::vector<Instance>& instances,
                                        const fs::path& cache_dir) {
    fs::create_directories(cache_dir);
    std::vector<ExactFront> fronts;
    fronts.reserve(instances.size());
    for (const auto& instance : instances) {
        const auto hash = instance.landscape.content_hash();
        const fs::path cache = cache_dir / ("front_" + hex64(hash) + ".json");
        if (fs::exists(cache)) {
            ExactFront front = ExactFront::load(cache);
            if (front.instance_hash == hash) {
                fronts.push_back(std::move(front));
                continue;
            }
        }
        ExactFront front = exact_front(instance.landscape);
        front.save(cache);
        fronts.push_back(std::move(front));
    }
    return fronts;
}

}  // namespace

RunSummary cmd_run(const ExperimentSpec& spec, const fs::path& out_dir, int workers) {
    if (spec.algorithms.empty()) spec_error("run needs an \"algorithms\" list");
    const auto started_at = iso_timestamp();
    const auto start = std::chrono::steady_clock::now();

    const auto instances = resolve_instances(spec);
    std::vector<ExactFront> fronts;
    if (spec.normalize) fronts = compute_fronts(instances, out_dir / "cache");

    const fs::path trace_dir = out_dir / "traces";
    fs::create_directories(trace_dir);

    struct Cell {
        std::size_t instance;
        std::size_t algorithm;
        std::uint64_t run_seed;
    };
    std::vector<Cell> cells;
    for (std::size_t i = 0; i < instances.size(); ++i) {
        for (std::size_t a = 0; a < spec.algorithms.size(); ++a) {
            for (std::uint64_t s : spec.run_seeds) cells.push_back({i, a, s});
        }
    }

    std::vector<CellResult> results(cells.size());
    parallel_for(cells.size(), workers, [&](std::size_t c) {
        const Cell& cell = cells[c];
        results[c] = execute_cell(spec.algorithms[cell.algorithm], instances[cell.instance],
                                  cell.run_seed, spec.max_iterations, spec.max_evaluations,
                                  front_for(fronts, cell.instance), spec.threshold, trace_dir);
    });

    RunSummary summary;
    summary.cells = static_cast<int>(results.size());
    json manifest;
    manifest["format_version"] = 1;
    manifest["tool_version"] = kVersion;
    manifest["spec_hash"] = hex64(spec.hash);
    manifest["started_at"] = started_at;
    manifest["cells"] = json::array();
    for (const auto& r : results) {
        json cell = {{"id", r.id}, {"status", r.ok ? "ok" : "failed"}};
        if (r.ok) {
            cell["trace"] = r.trace_file;
        } else {
            cell["error"] = r.error;
            ++summary.failed;
            summary.errors.push_back(r.id + ": " + r.error);
        }
        manifest["cells"].push_back(cell);
    }
    manifest["wall_ms"] = elapsed_ms(start);
    std::ofstream mf(out_dir / "manifest.json");
    mf << manifest.dump(1) << '\n';
    return summary;
}

SweepSummary cmd_sweep(const ExperimentSpec& spec, const fs::path& out_dir, int workers) {
    if (spec.sweep_shots.empty()) spec_error("sweep needs a \"sweep\" block");
    const auto instances = resolve_instances(spec);
    const auto fronts = compute_fronts(instances, out_dir / "cache");
    const fs::path trace_dir = out_dir / "traces";
    fs::create_directories(trace_dir);

    // The qmoo block the sweep varies; defaults to archive + substitution.
    json base;
    for (const auto& block : spec.algorithms) {
        if (block.at("name") == "qmoo") base = block;
    }
    if (base.is_null()) base = {{"name", "qmoo"}, {"archive", true}, {"substitution", true}};

    SweepSummary summary;
    struct RunJob {
        std::size_t cell_index;
        json block;
        std::size_t instance;
        std::uint64_t run_seed;
    };
    std::vector<RunJob> jobs;

    for (std::size_t i = 0; i < instances.size(); ++i) {
        const int n_pf = fronts[i].n_pf;
        for (long shots : spec.sweep_shots) {
            // Resolve every token; oversized settings cannot differ from one
            // another, so only the largest runs and the rest defer to it.
            struct Resolved {
                std::string token;
                int value;
                bool superseded = false;
            };
            std::vector<Resolved> resolved;
            for (const auto& token : spec.sweep_most_prob)
                resolved.push_back({token, resolve_most_prob(token, n_pf)});
            int representative = -1;
            for (std::size_t t = 0; t < resolved.size(); ++t) {
                if (resolved[t].value > shots) {
                    if (representative < 0 ||
                        resolved[t].value > resolved[representative].value)
                        representative = static_cast<int>(t);
                }
            }
            for (std::size_t t = 0; t < resolved.size(); ++t) {
                if (resolved[t].value > shots && static_cast<int>(t) != representative)
                    resolved[t].superseded = true;
            }

            for (std::size_t t = 0; t < resolved.size(); ++t) {
                SweepCell cell;
                cell.instance = instances[i].key;
                cell.n_shots = shots;
                cell.n_most_prob_spec = resolved[t].token;
                cell.n_most_prob = resolved[t].value;
                if (resolved[t].superseded) {
                    cell.status = "superseded";
                    cell.representative = "nshots" + std::to_string(shots) + "_nmp" +
                                          std::to_string(resolved[representative].value);
                    summary.cells.push_back(cell);
                    continue;
                }
                cell.status = "run";
                json block = base;
                block["n_shots"] = shots;
                block["n_most_prob"] = resolved[t].value;
                block["label"] = "qmoo_nshots" + std::to_string(shots) + "_nmp" +
                                 std::to_string(resolved[t].value);
                const std::size_t cell_index = summary.cells.size();
                summary.cells.push_back(cell);
                for (std::uint64_t s : spec.run_seeds)
                    jobs.push_back({cell_index, block, i, s});
            }
        }
    }

    std::vector<CellResult> results(jobs.size());
    parallel_for(jobs.size(), workers, [&](std::size_t c) {
        const RunJob& job = jobs[c];
        results[c] = execute_cell(job.block, instances[job.instance], job.run_seed,
                                  spec.max_iterations, spec.max_evaluations, &fronts[job.instance],
                                  spec.threshold, trace_dir);
    });

    // Threshold statistics per cell from the runs' sidecars.
    struct Agg {
        int runs = 0;
        int reached = 0;
        std::vector<double> iters;
        std::vector<double> fevals;
    };
    std::map<std::size_t, Agg> agg;
    for (std::size_t c = 0; c < jobs.size(); ++c) {
        if (!results[c].ok) {
            ++summary.failed;
            continue;
        }
        std::ifstream side(trace_dir / (results[c].id + ".json"));
        json sidecar;
        side >> sidecar;
        Agg& a = agg[jobs[c].cell_index];
        ++a.runs;
        const auto& th = sidecar.at("threshold");
        if (!th.is_null() && th.at("reached").get<bool>()) {
            ++a.reached;
            a.iters.push_back(th.at("first_iteration").get<double>());
            a.fevals.push_back(th.at("first_fevals").get<double>());
        } else {
            a.iters.push_back(kInf);
            a.fevals.push_back(kInf);
        }
    }
    for (auto& [index, a] : agg) {
        SweepCell& cell = summary.cells[index];
        cell.runs = a.runs;
        cell.success_rate = a.runs == 0 ? 0.0 : static_cast<double>(a.reached) / a.runs;
        cell.median_iterations = a.iters.empty() ? kInf : lower_median(a.iters);
        cell.median_fevals = a.fevals.empty() ? kInf : lower_median(a.fevals);
    }

    // Optimal setting per instance: among cells with success rate above 50%,
    // the one with the smallest median evaluation count to the threshold.
    for (const auto& instance : instances) {
        int best = -1;
        for (std::size_t c = 0; c < summary.cells.size(); ++c) {
            const SweepCell& cell = summary.cells[c];
            if (cell.instance != instance.key || cell.status != "run") continue;
            if (cell.success_rate <= 0.5) continue;
            if (best < 0 || cell.median_fevals < summary.cells[best].median_fevals ||
                (cell.median_fevals == summary.cells[best].median_fevals &&
                 cell.median_iterations < summary.cells[best].median_iterations)) {
                best = static_cast<int>(c);
            }
        }
        if (best >= 0) summary.cells[best].optimal = true;
    }

    std::ofstream csv(out_dir / "sweep.csv");
    csv << "instance,n_shots,n_most_prob_spec,n_most_prob,status,representative,runs,"
           "success_rate,median_iterations_to_threshold,median_fevals_to_threshold,optimal\n";
    auto print_median = [](double v) {
        return std::isinf(v) ? std::string("inf") : format_double(v);
    };
    for (const SweepCell& cell : summary.cells) {
        csv << cell.instance << ',' << cell.n_shots << ',' << cell.n_most_prob_spec << ','
            << cell.n_most_prob << ',' << cell.status << ',' << cell.representative << ',';
        if (cell.status == "run") {
            csv << cell.runs << ',' << format_double(cell.success_rate) << ','
                << print_median(cell.median_iterations) << ',' << print_median(cell.median_fevals)
                << ',' << (cell.optimal ? "true" : "false");
        } else {
            csv << ",,,,";
        }
        csv << '\n';
    }
    return summary;
}

namespace {

struct LoadedTrace {
    std::string cell;
    std::string algorithm;
    int n_vars = 0;
    int n_objectives = 0;
    int epistasis = 0;
    double rho = 0.0;
    double hv_ideal = 0.0;
    std::vector<TraceRow> rows;
};

double value_at_iteration(const LoadedTrace& t, long iter) {
    double value = 0.0;
    for (const auto& row : t.rows) {
        if (row.iteration > iter) break;
        value = row.has_norm ? row.hv_norm : row.hv;
    }
    return value;
}

double value_at_fevals(const LoadedTrace& t, long fevals) {
    double value = 0.0;
    for (const auto& row : t.rows) {
        if (row.fevals > fevals) break;
        value = row.has_norm ? row.hv_norm : row.hv;
    }
    return value;
}

std::string svg_plot(const std::string& title,
                     const std::vector<std::pair<std::string, std::vector<std::pair<double, double>>>>&
                         series) {
    const double width = 640, height = 420, left = 70, right = 20, top = 40, bottom = 50;
    double x_max = 1.0;
    for (const auto& [label, points] : series) {
        for (const auto& [x, y] : points) x_max = std::max(x_max, x);
    }
    const auto map_x = [&](double x) {
        return left + (width - left - right) * (std::log10(std::max(1.0, x)) /
                                                std::max(1.0, std::log10(x_max)));
    };
    const auto map_y = [&](double y) { return height - bottom - (height - top - bottom) * y; };
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

    std::ostringstream svg;
    svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width << "' height='" << height
        << "'>\n<rect width='100%' height='100%' fill='white'/>\n";
    svg << "<text x='" << width / 2 << "' y='20' text-anchor='middle' font-size='14'>" << title
        << "</text>\n";
    svg << "<line x1='" << left << "' y1='" << map_y(0) << "' x2='" << width - right << "' y2='"
        << map_y(0) << "' stroke='black'/>\n";
    svg << "<line x1='" << left << "' y1='" << map_y(0) << "' x2='" << left << "' y2='" << map_y(1)
        << "' stroke='black'/>\n";
    for (double tick : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        svg << "<text x='" << left - 8 << "' y='" << map_y(tick) + 4
            << "' text-anchor='end' font-size='10'>" << tick << "</text>\n";
        svg << "<line x1='" << left - 4 << "' y1='" << map_y(tick) << "' x2='" << left << "' y2='"
            << map_y(tick) << "' stroke='black'/>\n";
    }
    for (double decade = 1.0; decade <= x_max * 1.0001; decade *= 10.0) {
        svg << "<line x1='" << map_x(decade) << "' y1='" << map_y(0) << "' x2='" << map_x(decade)
            << "' y2='" << map_y(0) + 4 << "' stroke='black'/>\n";
        svg << "<text x='" << map_x(decade) << "' y='" << map_y(0) + 16
            << "' text-anchor='middle' font-size='10'>1e" << std::log10(decade) << "</text>\n";
    }
    svg << "<text x='" << (width + left - right) / 2 << "' y='" << height - 10
        << "' text-anchor='middle' font-size='11'>function evaluations</text>\n";
    int color_index = 0;
    double legend_y = top + 6;
    for (const auto& [label, points] : series) {
        const char* color = colors[color_index++ % 6];
        svg << "<polyline fill='none' stroke='" << color << "' stroke-width='1.5' points='";
        for (const auto& [x, y] : points) svg << map_x(x) << ',' << map_y(y) << ' ';
        svg << "'/>\n";
        svg << "<text x='" << width - right - 4 << "' y='" << legend_y
            << "' text-anchor='end' font-size='10' fill='" << color << "'>" << label
            << "</text>\n";
        legend_y += 13;
    }
    svg << "</svg>\n";
    return svg.str();
}

}  // namespace

ReportSummary cmd_report(const std::vector<fs::path>& run_dirs, const fs::path& out_dir,
                         bool svg) {
    ReportSummary summary;
    std::vector<LoadedTrace> traces;
    for (const fs::path& dir : run_dirs) {
        const fs::path trace_dir = fs::exists(dir / "traces") ? dir / "traces" : dir;
        if (!fs::exists(trace_dir)) {
            summary.missing.push_back(dir.string() + " (no such directory)");
            continue;
        }
        std::vector<fs::path> sidecars;
        for (const auto& entry : fs::directory_iterator(trace_dir)) {
            if (entry.path().extension() == ".json") sidecars.push_back(entry.path());
        }
        std::sort(sidecars.begin(), sidecars.end());
        for (const fs::path& side_path : sidecars) {
            fs::path csv_path = side_path;
            csv_path.replace_extension(".csv");
            if (!fs::exists(csv_path)) {
                summary.missing.push_back(csv_path.string());
                continue;
            }
            try {
                std::ifstream side(side_path);
                json sidecar;
                side >> sidecar;
                LoadedTrace t;
                t.cell = sidecar.at("cell").get<std::string>();
                t.algorithm = sidecar.at("algorithm").at("label").get<std::string>();
                const auto& inst = sidecar.at("instance");
                t.n_vars = inst.at("n_vars").get<int>();
                t.n_objectives = inst.at("n_objectives").get<int>();
                t.epistasis = inst.at("epistasis").get<int>();
                t.rho = inst.at("rho").get<double>();
                if (!sidecar.at("hv_ideal").is_null())
                    t.hv_ideal = sidecar.at("hv_ideal").get<double>();
                std::ifstream csv(csv_path);
                t.rows = read_trace_csv(csv);
                traces.push_back(std::move(t));
            } catch (const std::exception& e) {
                summary.missing.push_back(side_path.string() + " (" + e.what() + ")");
            }
        }
    }
    summary.traces = static_cast<int>(traces.size());

    // Group by problem setting; compare algorithms inside each group.
    using GroupKey = std::tuple<int, int, int, double>;  // (M, N, K, rho)
    std::map<GroupKey, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < traces.size(); ++i) {
        groups[{traces[i].n_objectives, traces[i].n_vars, traces[i].epistasis, traces[i].rho}]
            .push_back(i);
    }
    summary.groups = static_cast<int>(groups.size());

    fs::create_directories(out_dir);
    std::ofstream summary_csv(out_dir / "report_summary.csv");
    summary_csv << "n_objectives,n_vars,epistasis,rho,algorithm,runs,cap_fevals,"
                   "median_hv_norm_at_cap,median_final_hv_norm,median_final_hv\n";
    std::ofstream iter_csv(out_dir / "report_curves_iterations.csv");
    iter_csv << "n_objectives,n_vars,epistasis,rho,algorithm,iteration,median_hv_norm\n";
    std::ofstream feval_csv(out_dir / "report_curves_fevals.csv");
    feval_csv << "n_objectives,n_vars,epistasis,rho,algorithm,fevals,median_hv_norm\n";

    for (const auto& [key, members] : groups) {
        const auto [m_objs, n_vars, k_epi, rho] = key;
        // Comparison cap: the smallest total evaluation count present, so
        // every algorithm is measured at a budget all of them completed.
        long cap = std::numeric_limits<long>::max();
        long max_iter = 0;
        for (std::size_t i : members) {
            const auto& rows = traces[i].rows;
            if (rows.empty()) continue;
            cap = std::min(cap, rows.back().fevals);
            max_iter = std::max(max_iter, rows.back().iteration);
        }
        if (cap == std::numeric_limits<long>::max()) cap = 0;

        std::map<std::string, std::vector<std::size_t>> by_algorithm;
        for (std::size_t i : members) by_algorithm[traces[i].algorithm].push_back(i);

        const std::string prefix = std::to_string(m_objs) + "," + std::to_string(n_vars) + "," +
                                   std::to_string(k_epi) + "," + format_rho(rho) + ",";
        std::vector<std::pair<std::string, std::vector<std::pair<double, double>>>> svg_series;
        for (const auto& [algorithm, runs] : by_algorithm) {
            std::vector<double> at_cap, final_norm, final_hv;
            for (std::size_t i : runs) {
                at_cap.push_back(value_at_fevals(traces[i], cap));
                const auto& rows = traces[i].rows;
                final_norm.push_back(rows.empty() ? 0.0
                                                  : (rows.back().has_norm ? rows.back().hv_norm
                                                                          : rows.back().hv));
                final_hv.push_back(rows.empty() ? 0.0 : rows.back().hv);
            }
            summary_csv << prefix << algorithm << ',' << runs.size() << ',' << cap << ','
                        << format_double(lower_median(at_cap)) << ','
                        << format_double(lower_median(final_norm)) << ','
                        << format_double(lower_median(final_hv)) << '\n';

            // Median convergence curves, downsampled to at most 200 points.
            const long iter_step = std::max<long>(1, max_iter / 200);
            for (long it = 1; it <= max_iter; it += iter_step) {
                std::vector<double> vals;
                for (std::size_t i : runs) vals.push_back(value_at_iteration(traces[i], it));
                iter_csv << prefix << algorithm << ',' << it << ','
                         << format_double(lower_median(vals)) << '\n';
            }
            std::vector<std::pair<double, double>> curve;
            const long feval_points = 200;
            for (long p = 0; p <= feval_points; ++p) {
                const double frac = static_cast<double>(p) / feval_points;
                const long fe = std::max<long>(
                    1, static_cast<long>(std::llround(std::pow(static_cast<double>(std::max<long>(cap, 1)), frac))));
                std::vector<double> vals;
                for (std::size_t i : runs) vals.push_back(value_at_fevals(traces[i], fe));
                const double med = lower_median(vals);
                feval_csv << prefix << algorithm << ',' << fe << ',' << format_double(med) << '\n';
                curve.emplace_back(static_cast<double>(fe), med);
            }
            svg_series.emplace_back(algorithm, std::move(curve));
        }
        if (svg) {
            std::ostringstream name;
            name << "report_m" << m_objs << "_n" << n_vars << "_k" << k_epi << "_rho"
                 << format_rho(rho) << ".svg";
            std::ofstream out(out_dir / name.str());
            out << svg_plot("M=" + std::to_string(m_objs) + " N=" + std::to_string(n_vars) +
                                " K=" + std::to_string(k_epi) + " rho=" + format_rho(rho),
                            svg_series);
        }
    }
    return summary;
}

void cmd_analyze(const ExperimentSpec& spec, const fs::path& out_dir) {
    if (spec.instance_configs.empty()) spec_error("analyze needs an instance grid");
    // Collapse the expanded grid back to unique cells; the grid's seed list
    // becomes the per-cell seed set.
    std::vector<RmnkConfig> cells;
    std::set<std::tuple<int, int, int, double>> seen;
    std::set<std::uint64_t> seed_set;
    for (const RmnkConfig& config : spec.instance_configs) {
        seed_set.insert(config.seed);
        if (seen.insert({config.n_vars, config.n_objectives, config.epistasis, config.rho}).second) {
            cells.push_back(config);
        }
    }
    const std::vector<std::uint64_t> seeds(seed_set.begin(), seed_set.end());
    const auto table = connectivity_sweep(cells, seeds);

    fs::create_directories(out_dir);
    std::ofstream csv(out_dir / "connectivity.csv");
    csv << "n_vars,n_objectives,epistasis,rho,n_seeds,median_components\n";
    for (const auto& row : table) {
        csv << row.n_vars << ',' << row.n_objectives << ',' << row.epistasis << ','
            << format_rho(row.rho) << ',' << row.n_seeds << ','
            << format_double(row.median_components) << '\n';
    }
}

}  // namespace qmoo
