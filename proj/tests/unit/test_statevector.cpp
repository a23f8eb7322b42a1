#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "qmoo/rng.hpp"
#include "qmoo/statevector.hpp"

using namespace qmoo;
using cplx = std::complex<double>;

namespace {

// Dense reference: builds the full 2^N x 2^N mixer unitary by Kronecker
// products and applies matrices explicitly. Only sane for tiny N.
std::vector<cplx> dense_reference_qaoa(const std::vector<double>& diag, double gamma,
                                       double beta) {
    const std::size_t dim = diag.size();
    const int n = static_cast<int>(std::log2(static_cast<double>(dim)) + 0.5);

    std::vector<cplx> state(dim, cplx(1.0 / std::sqrt(static_cast<double>(dim)), 0.0));
    for (std::size_t x = 0; x < dim; ++x) state[x] *= std::exp(cplx(0.0, -gamma * diag[x]));

    // exp(-i beta X) on one qubit.
    const cplx c(std::cos(beta), 0.0), s(0.0, -std::sin(beta));
    std::vector<std::vector<cplx>> u(dim, std::vector<cplx>(dim, 0.0));
    for (std::size_t row = 0; row < dim; ++row) {
        for (std::size_t col = 0; col < dim; ++col) {
            cplx entry(1.0, 0.0);
            for (int q = 0; q < n; ++q) {
                const bool rb = (row >> q) & 1, cb = (col >> q) & 1;
                entry *= (rb == cb) ? c : s;
            }
            u[row][col] = entry;
        }
    }
    std::vector<cplx> out(dim, 0.0);
    for (std::size_t row = 0; row < dim; ++row) {
        for (std::size_t col = 0; col < dim; ++col) out[row] += u[row][col] * state[col];
    }
    return out;
}

AnsatzParams make_params(int layers, int m, std::vector<double> gammas, std::vector<double> betas) {
    AnsatzParams p;
    p.layers = layers;
    p.n_objectives = m;
    p.gammas = std::move(gammas);
    p.betas = std::move(betas);
    return p;
}

}  // namespace

TEST_CASE("statevector: plus state amplitudes and guard") {
    const auto one = StateVector::plus_state(1);
    CHECK(one.amplitudes()[0] == cplx(1.0 / std::numbers::sqrt2, 0.0));
    CHECK(one.amplitudes()[1] == cplx(1.0 / std::numbers::sqrt2, 0.0));

    const auto three = StateVector::plus_state(3);
    for (const auto& a : three.amplitudes()) {
        CHECK(a.real() == doctest::Approx(1.0 / (2.0 * std::numbers::sqrt2)));
        CHECK(a.imag() == 0.0);
    }
    CHECK(three.norm() == doctest::Approx(1.0).epsilon(1e-15));

    CHECK_THROWS_AS(StateVector::plus_state(0), ResourceError);
    CHECK_THROWS_AS(StateVector::plus_state(kMaxExhaustiveVars + 1), ResourceError);
}

TEST_CASE("statevector: cost phase is pure phase") {
    auto state = StateVector::plus_state(4);
    std::vector<double> diag(16);
    Rng rng(3);
    for (double& d : diag) d = rng.uniform();

    const auto before = state.probabilities();
    state.apply_cost_phase(diag, 0.0);
    CHECK(state.amplitudes()[5] == StateVector::plus_state(4).amplitudes()[5]);

    state.apply_cost_phase(diag, 1.7);
    const auto after = state.probabilities();
    for (std::size_t x = 0; x < 16; ++x) CHECK(after[x] == doctest::Approx(before[x]).epsilon(1e-12));
}

TEST_CASE("statevector: constant diagonal is a global phase") {
    auto state = StateVector::plus_state(3);
    const StateVector input = state;
    state.apply_cost_phase(std::vector<double>(8, 0.9), 2.1);
    cplx overlap = 0.0;
    for (std::size_t x = 0; x < 8; ++x)
        overlap += std::conj(input.amplitudes()[x]) * state.amplitudes()[x];
    CHECK(std::abs(overlap) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("statevector: mixer fixes the plus state up to a global phase") {
    auto state = StateVector::plus_state(5);
    state.apply_mixer(0.0);
    CHECK(state.amplitudes()[7] == StateVector::plus_state(5).amplitudes()[7]);

    const double beta = 0.813;
    state.apply_mixer(beta);
    const auto probs = state.probabilities();
    for (double p : probs) CHECK(p == doctest::Approx(1.0 / 32.0).epsilon(1e-12));
    // |+>^N is an eigenvector with eigenvalue e^{-i N beta}.
    const cplx expected =
        std::exp(cplx(0.0, -5.0 * beta)) * StateVector::plus_state(5).amplitudes()[0];
    for (const auto& a : state.amplitudes()) {
        CHECK(a.real() == doctest::Approx(expected.real()).epsilon(1e-12));
        CHECK(a.imag() == doctest::Approx(expected.imag()).epsilon(1e-12));
    }
}

TEST_CASE("statevector: half-pi mixer flips a basis state") {
    auto state = StateVector::plus_state(1);
    // Rebuild |0> by hand.
    state.amplitude(0) = 1.0;
    state.amplitude(1) = 0.0;
    state.apply_mixer(std::numbers::pi / 2.0);
    CHECK(std::abs(state.amplitudes()[0]) < 1e-12);
    CHECK(state.amplitudes()[1].real() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(state.amplitudes()[1].imag() == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("statevector: zero parameters leave the uniform state") {
    const auto params = make_params(2, 2, {0, 0, 0, 0}, {0, 0, 0, 0});
    const auto state = run_ansatz({std::vector<double>(8, 0.3), std::vector<double>(8, 0.6)}, params);
    for (const auto& a : state.amplitudes()) {
        CHECK(std::abs(a - cplx(1.0 / (2.0 * std::numbers::sqrt2), 0.0)) < 1e-12);
    }
}

TEST_CASE("statevector: single-layer ansatz matches the dense reference") {
    Rng rng(100);
    for (int trial = 0; trial < 5; ++trial) {
        const int n = 2 + static_cast<int>(rng.uniform_below(3));  // 2..4
        std::vector<double> diag(std::size_t{1} << n);
        for (double& d : diag) d = rng.uniform();
        const double gamma = 4.0 * rng.uniform() - 2.0;
        const double beta = 4.0 * rng.uniform() - 2.0;

        const auto state = run_ansatz({diag}, make_params(1, 1, {gamma}, {beta}));
        const auto expected = dense_reference_qaoa(diag, gamma, beta);
        for (std::size_t x = 0; x < diag.size(); ++x) {
            CHECK(std::abs(state.amplitudes()[x] - expected[x]) < 1e-11);
        }
    }
}

TEST_CASE("statevector: norm preserved through deep circuits") {
    Rng rng(42);
    std::vector<std::vector<double>> diags(5, std::vector<double>(64));
    for (auto& d : diags) {
        for (double& v : d) v = rng.uniform();
    }
    std::vector<double> gammas(20), betas(20);
    for (double& g : gammas) g = 3.0 * rng.uniform();
    for (double& b : betas) b = 3.0 * rng.uniform();
    const auto state = run_ansatz(diags, make_params(4, 5, gammas, betas));
    CHECK(std::abs(state.norm() - 1.0) < 1e-9);
}

TEST_CASE("statevector: ansatz validates shapes") {
    CHECK_THROWS_AS(run_ansatz({std::vector<double>(8, 0.1)}, make_params(1, 1, {0.1}, {})),
                    InputError);
    CHECK_THROWS_AS(run_ansatz({std::vector<double>(8, 0.1), std::vector<double>(4, 0.1)},
                               make_params(1, 2, {0.1, 0.2}, {0.3, 0.4})),
                    InputError);
    CHECK_THROWS_AS(AnsatzParams::from_flat(std::vector<double>{1.0, 2.0, 3.0}, 1, 2), InputError);
}

TEST_CASE("statevector: flat parameter layout round-trips") {
    const std::vector<double> flat{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8};
    const auto params = AnsatzParams::from_flat(flat, 2, 2);
    CHECK(params.gamma(0, 0) == 0.1);
    CHECK(params.gamma(1, 1) == 0.4);
    CHECK(params.beta(0, 0) == 0.5);
    CHECK(params.beta(1, 1) == 0.8);
    CHECK(params.to_flat() == flat);
}

TEST_CASE("statevector: sampling a deterministic state") {
    auto state = StateVector::plus_state(3);
    for (std::size_t x = 0; x < 8; ++x) state.amplitude(x) = (x == 5) ? 1.0 : 0.0;
    const auto counts = sample(state, 64, 9);
    REQUIRE(counts.counts.size() == 1);
    CHECK(counts.counts.at(5) == 64);
    CHECK(counts.total == 64);
}

TEST_CASE("statevector: sampling is deterministic given the seed") {
    const auto state = run_ansatz({std::vector<double>{0.1, 0.4, 0.3, 0.7}},
                                  make_params(1, 1, {0.8}, {0.4}));
    const auto a = sample(state, 512, 77);
    const auto b = sample(state, 512, 77);
    CHECK(a.counts == b.counts);
    const auto c = sample(state, 512, 78);
    CHECK(a.counts != c.counts);
}

TEST_CASE("statevector: uniform sampling passes a chi-square check") {
    const auto state = StateVector::plus_state(12);
    const auto counts = sample(state, 8192, 123);
    const double expected = 8192.0 / 4096.0;
    double chi2 = 0.0;
    long total = 0;
    for (Bits x = 0; x < 4096; ++x) {
        const auto it = counts.counts.find(x);
        const double observed = it == counts.counts.end() ? 0.0 : static_cast<double>(it->second);
        total += static_cast<long>(observed);
        chi2 += (observed - expected) * (observed - expected) / expected;
    }
    CHECK(total == 8192);
    // Wilson-Hilferty critical value for df=4095 at alpha=0.001.
    const double df = 4095.0;
    const double z = 3.0902;
    const double critical =
        df * std::pow(1.0 - 2.0 / (9.0 * df) + z * std::sqrt(2.0 / (9.0 * df)), 3.0);
    CHECK(chi2 < critical);
}

TEST_CASE("statevector: top candidates order and tie-breaks") {
    ShotCounts counts;
    counts.n_qubits = 2;
    counts.total = 11;
    counts.counts = {{0b00, 5}, {0b01, 3}, {0b10, 3}};
    CHECK(top_candidates(counts, 2) == std::vector<Bits>{0b00, 0b01});
    CHECK(top_candidates(counts, 10) == std::vector<Bits>{0b00, 0b01, 0b10});
}

TEST_CASE("statevector: top-1 of a near-deterministic state is its modal string") {
    Rng rng(55);
    for (int trial = 0; trial < 20; ++trial) {
        // Random state with 60% of the mass pinned on one basis state.
        auto state = StateVector::plus_state(6);
        const Bits mode = rng.uniform_below(64);
        double rest = 0.0;
        std::vector<double> weights(64);
        for (std::size_t x = 0; x < 64; ++x) {
            weights[x] = rng.uniform();
            rest += weights[x];
        }
        for (std::size_t x = 0; x < 64; ++x) {
            const double p = (x == mode) ? 0.6 : 0.4 * weights[x] / rest;
            state.amplitude(x) = std::sqrt(p);
        }
        const auto counts = sample(state, 4096, 1000 + trial);
        CHECK(top_candidates(counts, 1)[0] == mode);
    }
}
