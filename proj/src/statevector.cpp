#include "qmoo/statevector.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "qmoo/rng.hpp"

namespace qmoo {

AnsatzParams AnsatzParams::from_flat(std::span<const double> flat, int layers, int n_objectives) {
    const auto half = static_cast<std::size_t>(layers) * n_objectives;
    if (flat.size() != 2 * half) throw InputError("parameter vector has wrong length");
    AnsatzParams p;
    p.layers = layers;
    p.n_objectives = n_objectives;
    p.gammas.assign(flat.begin(), flat.begin() + half);
    p.betas.assign(flat.begin() + half, flat.end());
    return p;
}

std::vector<double> AnsatzParams::to_flat() const {
    std::vector<double> flat(gammas);
    flat.insert(flat.end(), betas.begin(), betas.end());
    return flat;
}

void AnsatzParams::validate() const {
    if (layers < 1) throw InputError("layers must be positive");
    const auto half = static_cast<std::size_t>(layers) * n_objectives;
    if (gammas.size() != half || betas.size() != half)
        throw InputError("parameter arrays must have shape L x M");
    for (double v : gammas) {
        if (!std::isfinite(v)) throw InputError("non-finite gamma parameter");
    }
    for (double v : betas) {
        if (!std::isfinite(v)) throw InputError("non-finite beta parameter");
    }
}

StateVector StateVector::plus_state(int n_qubits) {
    if (n_qubits < 1 || n_qubits > kMaxExhaustiveVars)
        throw ResourceError("state vector requires 1 <= n_qubits <= " +
                            std::to_string(kMaxExhaustiveVars));
    const std::size_t dim = std::size_t{1} << n_qubits;
    const double amp = 1.0 / std::sqrt(static_cast<double>(dim));
    return StateVector(n_qubits, std::vector<std::complex<double>>(dim, {amp, 0.0}));
}

void StateVector::apply_cost_phase(std::span<const double> diag, double gamma) {
    if (diag.size() != amplitudes_.size())
        throw InputError("diagonal length does not match state dimension");
    if (gamma == 0.0) return;
    for (std::size_t x = 0; x < amplitudes_.size(); ++x) {
        amplitudes_[x] *= std::polar(1.0, -gamma * diag[x]);
    }
}

void StateVector::apply_mixer(double beta) {
    if (beta == 0.0) return;
    const double c = std::cos(beta);
    const std::complex<double> ms(0.0, -std::sin(beta));
    const std::size_t dim = amplitudes_.size();
    for (int q = 0; q < n_qubits_; ++q) {
        const std::size_t stride = std::size_t{1} << q;
        for (std::size_t base = 0; base < dim; base += stride << 1) {
            for (std::size_t off = 0; off < stride; ++off) {
                auto& a0 = amplitudes_[base + off];
                auto& a1 = amplitudes_[base + off + stride];
                const auto t0 = c * a0 + ms * a1;
                a1 = ms * a0 + c * a1;
                a0 = t0;
            }
        }
    }
}

std::vector<double> StateVector::probabilities() const {
    std::vector<double> probs(amplitudes_.size());
    for (std::size_t x = 0; x < amplitudes_.size(); ++x) probs[x] = std::norm(amplitudes_[x]);
    return probs;
}

double StateVector::norm() const {
    double acc = 0.0;
    for (const auto& a : amplitudes_) acc += std::norm(a);
    return std::sqrt(acc);
}

StateVector run_ansatz(const std::vector<std::vector<double>>& diagonals,
                       const AnsatzParams& params) {
    params.validate();
    if (diagonals.empty() || static_cast<int>(diagonals.size()) != params.n_objectives)
        throw InputError("need one diagonal per objective");
    const std::size_t dim = diagonals[0].size();
    if (dim == 0 || (dim & (dim - 1)) != 0) throw InputError("diagonal length must be 2^N");
    for (const auto& d : diagonals) {
        if (d.size() != dim) throw InputError("diagonals must share one dimension");
    }
    const int n_qubits = std::countr_zero(dim);

    auto state = StateVector::plus_state(n_qubits);
    for (int l = 0; l < params.layers; ++l) {
        for (int k = 0; k < params.n_objectives; ++k) {
            state.apply_cost_phase(diagonals[k], params.gamma(l, k));
            state.apply_mixer(params.beta(l, k));
        }
    }
    return state;
}

ShotCounts sample(const StateVector& state, long n_shots, std::uint64_t rng_seed) {
    if (n_shots < 1) throw InputError("n_shots must be positive");
    const auto probs = state.probabilities();
    std::vector<double> cdf(probs.size());
    double acc = 0.0;
    for (std::size_t x = 0; x < probs.size(); ++x) {
        acc += probs[x];
        cdf[x] = acc;
    }
    const double total = acc;

    Rng rng(rng_seed);
    ShotCounts out;
    out.n_qubits = state.n_qubits();
    out.total = n_shots;
    for (long s = 0; s < n_shots; ++s) {
        const double u = rng.uniform() * total;
        const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        const auto x = static_cast<Bits>(std::min<std::size_t>(
            static_cast<std::size_t>(it - cdf.begin()), probs.size() - 1));
        ++out.counts[x];
    }
    return out;
}

std::vector<Bits> top_candidates(const ShotCounts& counts, std::size_t n) {
    std::vector<std::pair<Bits, long>> items(counts.counts.begin(), counts.counts.end());
    // Map iteration is ascending by bitstring already; a stable sort on the
    // count leaves that order as the tie-break.
    std::stable_sort(items.begin(), items.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    std::vector<Bits> out;
    out.reserve(std::min(n, items.size()));
    for (const auto& [bits, count] : items) {
        if (out.size() == n) break;
        out.push_back(bits);
    }
    return out;
}

}  // namespace qmoo
