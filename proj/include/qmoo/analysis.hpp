#pragma once

#include <filesystem>
#include <vector>

#include "qmoo/common.hpp"
#include "qmoo/landscape.hpp"
#include "qmoo/trace.hpp"

namespace qmoo {

/// Exhaustive ground truth for one instance: the exact Pareto set/front and
/// its hypervolume at the fixed reference vector.
struct ExactFront {
    std::uint64_t instance_hash = 0;
    int n_vars = 0;
    ObjectiveVector reference;
    std::vector<Bits> pareto_set;                 // ascending bitstring order
    std::vector<ObjectiveVector> pareto_front;    // aligned with pareto_set
    double hv_ideal = 0.0;
    int n_pf = 0;

    void save(const std::filesystem::path& path) const;
    static ExactFront load(const std::filesystem::path& path);
};

/// Brute force over all 2^N bitstrings (guarded at kMaxExhaustiveVars).
ExactFront exact_front(const RmnkLandscape& landscape, ObjectiveVector reference = {});

/// Connected components of the Hamming-distance-1 graph over the set.
int bitflip_components(const std::vector<Bits>& members, int n_bits);

/// One (N, M, K, rho) cell of the connectivity sweep.
struct ConnectivityCell {
    int n_vars = 0;
    int n_objectives = 0;
    int epistasis = 0;
    double rho = 0.0;
    int n_seeds = 0;
    double median_components = 0.0;  // lower median over seeds
};

std::vector<ConnectivityCell> connectivity_sweep(const std::vector<RmnkConfig>& grid,
                                                 const std::vector<std::uint64_t>& seeds);

/// Lower median: for even counts the smaller of the two central values.
double lower_median(std::vector<double> values);

/// Attaches hv_ideal to the trace after checking it belongs to the same
/// instance; write_csv then emits hv_norm = hv / hv_ideal.
void normalize_trace(RunTrace& trace, const ExactFront& front);

struct ThresholdStats {
    bool reached = false;
    long first_iteration = -1;
    long first_fevals = -1;
};

/// First iteration and evaluation count with hv/hv_ideal >= theta.
ThresholdStats threshold_crossing(const RunTrace& trace, double theta);

}  // namespace qmoo
