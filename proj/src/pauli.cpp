#include "qmoo/pauli.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <ostream>
#include <unordered_map>

namespace qmoo {

namespace {

constexpr double kPruneThreshold = 1e-14;

void fwht_inplace(std::span<double> v) {
    const std::size_t n = v.size();
    for (std::size_t half = 1; half < n; half <<= 1) {
        for (std::size_t block = 0; block < n; block += half << 1) {
            for (std::size_t j = block; j < block + half; ++j) {
                const double lo = v[j];
                const double hi = v[j + half];
                v[j] = lo + hi;
                v[j + half] = lo - hi;
            }
        }
    }
}

}  // namespace

std::vector<int> PauliZTerm::support_indices() const {
    std::vector<int> out;
    for (int q = 0; q < 64; ++q) {
        if ((support >> q) & 1ULL) out.push_back(q);
    }
    return out;
}

std::vector<double> component_coefficients(std::span<const double> table) {
    const std::size_t n = table.size();
    if (n == 0 || (n & (n - 1)) != 0)
        throw InputError("component table length must be a power of two");
    std::vector<double> coeffs(table.begin(), table.end());
    fwht_inplace(coeffs);
    const double scale = 1.0 / static_cast<double>(n);
    for (double& c : coeffs) c *= scale;
    return coeffs;
}

std::vector<PauliZTerm> build_component(const RmnkLandscape& landscape, int m, int i) {
    const auto coeffs = component_coefficients(landscape.table(m, i));
    const auto& partners = landscape.links(m, i);

    // Slot -> qubit map p: slot 1 is i, slot 1+j is partner j.
    std::vector<int> slot_qubit(partners.size() + 1);
    slot_qubit[0] = i;
    std::copy(partners.begin(), partners.end(), slot_qubit.begin() + 1);

    std::vector<PauliZTerm> terms;
    terms.reserve(coeffs.size());
    for (std::size_t mask = 0; mask < coeffs.size(); ++mask) {
        if (coeffs[mask] == 0.0) continue;
        Bits support = 0;
        for (std::size_t slot = 0; slot < slot_qubit.size(); ++slot) {
            if ((mask >> slot) & 1ULL) support |= Bits{1} << slot_qubit[slot];
        }
        terms.push_back({support, coeffs[mask]});
    }
    return terms;
}

PauliZSum build_hamiltonian(const RmnkLandscape& landscape, int m) {
    const int n = landscape.n_vars();
    std::unordered_map<Bits, double> merged;
    for (int i = 0; i < n; ++i) {
        for (const auto& term : build_component(landscape, m, i)) {
            merged[term.support] += term.coefficient;
        }
    }
    PauliZSum sum;
    sum.n_qubits = n;
    sum.terms.reserve(merged.size());
    const double inv_n = 1.0 / n;
    for (const auto& [support, coeff] : merged) {
        const double scaled = coeff * inv_n;
        if (std::abs(scaled) < kPruneThreshold) continue;
        sum.terms.push_back({support, scaled});
    }
    std::sort(sum.terms.begin(), sum.terms.end(),
              [](const PauliZTerm& a, const PauliZTerm& b) { return a.support < b.support; });
    return sum;
}

std::vector<double> PauliZSum::diagonal() const {
    if (n_qubits > kMaxExhaustiveVars)
        throw ResourceError("diagonal requires n_qubits <= " + std::to_string(kMaxExhaustiveVars));
    // Scatter coefficients by support mask and run the same transform: the
    // Walsh-Hadamard kernel (-1)^popcount(x & s) is exactly the Z_S eigenvalue.
    std::vector<double> diag(std::size_t{1} << n_qubits, 0.0);
    for (const auto& term : terms) diag[term.support] += term.coefficient;
    fwht_inplace(diag);
    return diag;
}

void export_terms(const PauliZSum& sum, std::ostream& out) {
    for (const auto& term : sum.terms) {
        out << format_double(term.coefficient);
        for (int q : term.support_indices()) out << ' ' << q;
        out << '\n';
    }
}

}  // namespace qmoo
