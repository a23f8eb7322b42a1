#pragma once

#include <functional>
#include <span>
#include <vector>

#include "qmoo/common.hpp"
#include "qmoo/landscape.hpp"
#include "qmoo/pareto.hpp"
#include "qmoo/statevector.hpp"
#include "qmoo/trace.hpp"

namespace qmoo {

struct QmooHyperparams {
    long n_shots = 1024;
    int n_most_prob = 20;
    int layers = 1;
    bool use_archive = true;
    bool use_substitution = true;
    long max_iterations = 300;   // objective calls; one call = one iteration
    long max_evaluations = 0;    // classical cost-function budget, 0 = none
    std::uint64_t seed = 0;

    void validate() const;
};

struct SubstitutionResult {
    std::vector<ParetoArchive::Entry> selected;  // mutually non-dominated
    int consumed = 0;     // bitstrings drawn from the sorted stream
    int evaluations = 0;  // fresh cost-function evaluations
    int skipped = 0;      // stream entries rejected by the skip predicate
};

/// Dominated-solution substitution: walks the sampled bitstrings in
/// descending-count order, evaluating each fresh one and keeping a running
/// non-dominated set, until the set holds n_most_prob members, the stream
/// runs out, or 2*n_most_prob stream entries have been consumed. Entries
/// matching `skip` (e.g. already archived) cost neither an evaluation nor a
/// set slot but do advance the stream index.
SubstitutionResult substitute_candidates(
    const ShotCounts& counts, int n_most_prob,
    const std::function<ObjectiveVector(Bits)>& evaluate,
    const std::function<bool(Bits)>& skip = {});

/// One in-flight hybrid run: owns the compiled cost diagonals, the archive,
/// the evaluation counters and the trace. iteration() is the objective the
/// classical optimizer minimizes.
class QmooSession {
  public:
    QmooSession(const RmnkLandscape& landscape, QmooHyperparams params,
                ObjectiveVector reference = {});

    /// One full iteration: run the ansatz, sample, select candidates
    /// (substitution first when enabled), skip already-archived bitstrings,
    /// evaluate the rest, update the archive, return the negative
    /// hypervolume. Appends one trace record.
    double iteration(std::span<const double> flat_params);

    bool evaluation_budget_reached() const;
    long iterations_run() const { return iteration_count_; }
    long evaluations() const { return evaluation_count_; }
    long cache_hits() const { return cache_hits_; }
    const ParetoArchive& archive() const { return archive_; }
    const QmooHyperparams& params() const { return params_; }
    std::size_t n_params() const;

    /// Moves the accumulated trace out, attaching the final front.
    RunTrace finish();

  private:
    const RmnkLandscape& landscape_;
    QmooHyperparams params_;
    ObjectiveVector reference_;
    std::vector<std::vector<double>> diagonals_;
    ParetoArchive archive_;
    // Best per-iteration front, tracked when archiving is off.
    ParetoArchive best_front_;
    double best_hv_ = 0.0;
    long iteration_count_ = 0;
    long evaluation_count_ = 0;
    long cache_hits_ = 0;
    RunTrace trace_;
};

/// Full hybrid run: random small-angle initial parameters, Powell as the
/// outer optimizer (restarted from the best point until the iteration or
/// evaluation budget is spent), one fresh sampling per objective call.
RunTrace qmoo_optimize(const RmnkLandscape& landscape, const QmooHyperparams& params,
                       ObjectiveVector reference = {});

}  // namespace qmoo
