#pragma once

#include <vector>

#include "qmoo/common.hpp"
#include "qmoo/landscape.hpp"
#include "qmoo/trace.hpp"

namespace qmoo {

struct GaConfig {
    int population_size = 20;          // 0 lets NSGA-III derive it from the
                                       // reference-point count (next multiple of 4)
    double crossover_probability = 1.0;
    double mutation_rate = -1.0;       // per-bit; negative means 1/N
    int divisions_outer = 12;          // Das-Dennis parameter (NSGA-III)
    long max_evaluations = 100000;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Deb's fast non-dominated sort: front 0 is the non-dominated set, front k
/// the non-dominated remainder after removing fronts < k.
std::vector<std::vector<int>> fast_nondominated_sort(const std::vector<ObjectiveVector>& objectives);

/// NSGA-II crowding distance within one front; boundary members per
/// objective get +infinity, interior members the sum of normalized
/// neighbor gaps.
std::vector<double> crowding_distance(const std::vector<ObjectiveVector>& front);

/// Das-Dennis simplex lattice: all compositions of p into M non-negative
/// parts scaled by 1/p; C(p+M-1, M-1) points.
std::vector<std::vector<double>> das_dennis(int n_objectives, int divisions);

/// Generational NSGA-II/III over bitstrings with uniform crossover, per-bit
/// mutation and (mu+lambda) environmental selection; every evaluated
/// individual is offered to an unbounded Pareto archive whose hypervolume
/// the trace records per generation.
RunTrace nsga2_run(const RmnkLandscape& landscape, const GaConfig& config,
                   ObjectiveVector reference = {});
RunTrace nsga3_run(const RmnkLandscape& landscape, const GaConfig& config,
                   ObjectiveVector reference = {});

}  // namespace qmoo
