#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "qmoo/common.hpp"

namespace qmoo {

struct AnsatzParams {
    int layers = 1;
    int n_objectives = 1;
    std::vector<double> gammas;  // layer-major, [l * M + k]
    std::vector<double> betas;   // layer-major, [l * M + k]

    double gamma(int l, int k) const { return gammas[static_cast<std::size_t>(l) * n_objectives + k]; }
    double beta(int l, int k) const { return betas[static_cast<std::size_t>(l) * n_objectives + k]; }

    std::size_t size() const { return gammas.size() + betas.size(); }

    /// Flat layout [gammas..., betas...], both layer-major. Matches to_flat.
    static AnsatzParams from_flat(std::span<const double> flat, int layers, int n_objectives);
    std::vector<double> to_flat() const;

    void validate() const;
};

struct ShotCounts {
    int n_qubits = 0;
    long total = 0;
    std::map<Bits, long> counts;  // ordered: ascending basis-state index
};

/// Exact 2^N-amplitude state, mutated in place by one owner at a time.
class StateVector {
  public:
    /// |+>^N, every amplitude 2^(-N/2). Guarded at kMaxExhaustiveVars.
    static StateVector plus_state(int n_qubits);

    int n_qubits() const { return n_qubits_; }
    std::span<const std::complex<double>> amplitudes() const { return amplitudes_; }
    std::complex<double>& amplitude(std::size_t x) { return amplitudes_[x]; }

    /// exp(-i gamma H) for diagonal H: amplitude[x] *= exp(-i gamma diag[x]).
    void apply_cost_phase(std::span<const double> diag, double gamma);

    /// exp(-i beta sum_j X_j) as N in-place single-qubit rotations.
    void apply_mixer(double beta);

    std::vector<double> probabilities() const;
    double norm() const;

  private:
    StateVector(int n_qubits, std::vector<std::complex<double>> amplitudes)
        : n_qubits_(n_qubits), amplitudes_(std::move(amplitudes)) {}

    int n_qubits_;
    std::vector<std::complex<double>> amplitudes_;
};

/// Full variational state: layers of per-objective blocks applied to |+>^N,
/// each block a cost phase followed by the transversal-X mixer, objectives
/// in fixed order k = 1..M within every layer.
StateVector run_ansatz(const std::vector<std::vector<double>>& diagonals,
                       const AnsatzParams& params);

/// Multinomial measurement of n_shots basis states; deterministic given seed.
ShotCounts sample(const StateVector& state, long n_shots, std::uint64_t rng_seed);

/// Up to n distinct bitstrings by descending count, ties broken by ascending
/// basis-state index.
std::vector<Bits> top_candidates(const ShotCounts& counts, std::size_t n);

}  // namespace qmoo
