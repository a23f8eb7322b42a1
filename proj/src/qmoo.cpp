#include "qmoo/qmoo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qmoo/pauli.hpp"
#include "qmoo/powell.hpp"
#include "qmoo/rng.hpp"

namespace qmoo {

void QmooHyperparams::validate() const {
    if (n_shots < 1) throw ConfigError("n_shots must be positive");
    if (n_most_prob < 1) throw ConfigError("n_most_prob must be positive");
    if (layers < 1) throw ConfigError("layers must be positive");
    if (max_iterations < 1) throw ConfigError("max_iterations must be positive");
    if (max_evaluations < 0) throw ConfigError("max_evaluations must be non-negative");
}

SubstitutionResult substitute_candidates(const ShotCounts& counts, int n_most_prob,
                                         const std::function<ObjectiveVector(Bits)>& evaluate,
                                         const std::function<bool(Bits)>& skip) {
    if (counts.counts.empty()) throw InputError("substitution requires a nonempty sample");
    const auto stream = top_candidates(counts, counts.counts.size());
    const int cap = 2 * n_most_prob;

    SubstitutionResult result;
    for (const Bits bits : stream) {
        if (static_cast<int>(result.selected.size()) >= n_most_prob) break;
        if (result.consumed >= cap) break;
        ++result.consumed;
        if (skip && skip(bits)) {
            ++result.skipped;
            continue;
        }
        ObjectiveVector objs = evaluate(bits);
        ++result.evaluations;
        bool dominated = false;
        for (const auto& kept : result.selected) {
            if (dominates(kept.objectives, objs)) {
                dominated = true;
                break;
            }
        }
        if (dominated) continue;
        std::erase_if(result.selected, [&](const ParetoArchive::Entry& kept) {
            return dominates(objs, kept.objectives);
        });
        result.selected.push_back({bits, std::move(objs)});
    }
    return result;
}

QmooSession::QmooSession(const RmnkLandscape& landscape, QmooHyperparams params,
                         ObjectiveVector reference)
    : landscape_(landscape),
      params_(params),
      reference_(reference.empty() ? default_reference(landscape.n_objectives())
                                   : std::move(reference)),
      archive_(reference_),
      best_front_(reference_) {
    params_.validate();
    diagonals_.reserve(landscape.n_objectives());
    for (int m = 0; m < landscape.n_objectives(); ++m) {
        diagonals_.push_back(build_hamiltonian(landscape, m).diagonal());
    }
    trace_.algorithm = "qmoo";
    trace_.instance_hash = landscape.content_hash();
    trace_.run_seed = params_.seed;
    trace_.n_vars = landscape.n_vars();
}

std::size_t QmooSession::n_params() const {
    return 2 * static_cast<std::size_t>(params_.layers) * landscape_.n_objectives();
}

bool QmooSession::evaluation_budget_reached() const {
    return params_.max_evaluations > 0 && evaluation_count_ >= params_.max_evaluations;
}

double QmooSession::iteration(std::span<const double> flat_params) {
    ++iteration_count_;
    const auto ansatz =
        AnsatzParams::from_flat(flat_params, params_.layers, landscape_.n_objectives());
    const auto state = run_ansatz(diagonals_, ansatz);
    const auto counts = sample(state, params_.n_shots,
                               derive_seed(params_.seed, "shots",
                                           static_cast<std::uint64_t>(iteration_count_)));

    auto evaluate_fresh = [&](Bits bits) {
        ++evaluation_count_;
        return landscape_.evaluate(bits);
    };
    auto archived = [&](Bits bits) {
        if (params_.use_archive && archive_.contains(bits)) {
            ++cache_hits_;
            return true;
        }
        return false;
    };

    std::vector<ParetoArchive::Entry> candidates;
    if (params_.use_substitution) {
        candidates =
            substitute_candidates(counts, params_.n_most_prob, evaluate_fresh, archived).selected;
    } else {
        for (const Bits bits : top_candidates(counts, params_.n_most_prob)) {
            if (archived(bits)) continue;
            candidates.push_back({bits, evaluate_fresh(bits)});
        }
    }

    double hv_report;
    double objective_hv;
    if (params_.use_archive) {
        archive_.update(candidates);
        objective_hv = archive_.hypervolume_value();
        hv_report = objective_hv;
    } else {
        // Original selection: this iteration's non-dominated set alone.
        ParetoArchive current(reference_);
        current.update(candidates);
        objective_hv = current.hypervolume_value();
        if (objective_hv > best_hv_ || best_front_.empty()) {
            best_hv_ = objective_hv;
            best_front_ = std::move(current);
        }
        hv_report = best_hv_;
    }

    trace_.records.push_back({iteration_count_, evaluation_count_, hv_report, -objective_hv,
                              std::vector<double>(flat_params.begin(), flat_params.end())});
    return -objective_hv;
}

RunTrace QmooSession::finish() {
    trace_.total_evaluations = evaluation_count_;
    trace_.cache_hits = cache_hits_;
    const ParetoArchive& front = params_.use_archive ? archive_ : best_front_;
    trace_.final_front = front.entries();
    std::sort(trace_.final_front.begin(), trace_.final_front.end(),
              [](const auto& a, const auto& b) { return a.bits < b.bits; });
    return std::move(trace_);
}

RunTrace qmoo_optimize(const RmnkLandscape& landscape, const QmooHyperparams& params,
                       ObjectiveVector reference) {
    QmooSession session(landscape, params, std::move(reference));

    Rng init_rng(derive_seed(params.seed, "init"));
    std::vector<double> x(session.n_params());
    for (double& v : x) v = (init_rng.uniform() - 0.5) * (std::numbers::pi / 2.0);

    auto objective = [&](std::span<const double> p) -> double {
        if (session.evaluation_budget_reached()) throw BudgetExhausted{};
        return session.iteration(p);
    };

    // Powell may converge well before the iteration budget; restart it from
    // the best point so every run spends the same number of objective calls.
    while (session.iterations_run() < params.max_iterations &&
           !session.evaluation_budget_reached()) {
        PowellOptions opts;
        opts.max_fcalls = params.max_iterations - session.iterations_run();
        const PowellResult res = powell_minimize(objective, x, opts);
        if (!res.x.empty()) x = res.x;
    }

    RunTrace trace = session.finish();
    trace.budget_exhausted = session.evaluation_budget_reached();
    return trace;
}

}  // namespace qmoo
