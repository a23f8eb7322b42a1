#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "qmoo/common.hpp"
#include "qmoo/landscape.hpp"

namespace qmoo {

/// One tensor product of Pauli-Z operators with a real weight. The support
/// is a qubit-index bitmask; an empty mask is the identity term.
struct PauliZTerm {
    Bits support = 0;
    double coefficient = 0.0;

    std::vector<int> support_indices() const;
    bool operator==(const PauliZTerm&) const = default;
};

/// Weighted Pauli-Z term list, diagonal in the computational basis. Terms
/// have distinct supports and are kept sorted by support mask.
struct PauliZSum {
    int n_qubits = 0;
    std::vector<PauliZTerm> terms;

    /// Eigenvalues over all 2^N basis states (guarded at kMaxExhaustiveVars):
    /// entry x is sum over terms of coeff * (-1)^popcount(x & support).
    std::vector<double> diagonal() const;
};

/// Fourier coefficients of a lookup table over {0,1}^v (table length 2^v):
/// result[mask] = 2^-v * sum_x table[x] * (-1)^popcount(x & mask).
/// Slot j of the local variable ordering is bit j-1 of both row and mask.
/// In-place fast Walsh-Hadamard transform, O(v 2^v).
std::vector<double> component_coefficients(std::span<const double> table);

/// Pauli-Z terms of one fitness component: slot 1 is position i itself,
/// slots 2..K+1 its epistatic partners, so subset masks lift to supports on
/// the actual qubit indices. Zero coefficients are kept out.
std::vector<PauliZTerm> build_component(const RmnkLandscape& landscape, int m, int i);

/// Full cost Hamiltonian of objective m: all component terms merged by
/// support with the global 1/N prefactor folded in; merged coefficients
/// below 1e-14 in magnitude are pruned.
PauliZSum build_hamiltonian(const RmnkLandscape& landscape, int m);

/// Plain-text term list, one "coefficient q_1 q_2 ... q_k" line per term
/// (identity term prints the coefficient alone).
void export_terms(const PauliZSum& sum, std::ostream& out);

}  // namespace qmoo
