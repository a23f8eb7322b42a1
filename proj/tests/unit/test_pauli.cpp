#include <doctest.h>

#include <bit>
#include <cmath>
#include <sstream>

#include "qmoo/pauli.hpp"
#include "qmoo/rng.hpp"

using namespace qmoo;

namespace {

// Naive character sum: alpha(S) = 2^-v * sum_x f(x) * (-1)^popcount(x & S).
std::vector<double> character_sum_oracle(const std::vector<double>& table) {
    const std::size_t n = table.size();
    std::vector<double> coeffs(n, 0.0);
    for (std::size_t s = 0; s < n; ++s) {
        double acc = 0.0;
        for (std::size_t x = 0; x < n; ++x) {
            acc += table[x] * (std::popcount(x & s) % 2 == 0 ? 1.0 : -1.0);
        }
        coeffs[s] = acc / static_cast<double>(n);
    }
    return coeffs;
}

double term_eigenvalue(const std::vector<PauliZTerm>& terms, Bits x) {
    double acc = 0.0;
    for (const auto& t : terms) {
        acc += t.coefficient * (std::popcount(x & t.support) % 2 == 0 ? 1.0 : -1.0);
    }
    return acc;
}

}  // namespace

TEST_CASE("pauli: two-point transform") {
    const auto coeffs = component_coefficients(std::vector<double>{0.2, 0.8});
    REQUIRE(coeffs.size() == 2);
    CHECK(coeffs[0] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(coeffs[1] == doctest::Approx(-0.3).epsilon(1e-15));
    // Eigenvalue identity at both rows.
    CHECK(coeffs[0] + coeffs[1] == doctest::Approx(0.2));
    CHECK(coeffs[0] - coeffs[1] == doctest::Approx(0.8));
}

TEST_CASE("pauli: constant table collapses to the identity term") {
    const auto coeffs = component_coefficients(std::vector<double>{0.4, 0.4, 0.4, 0.4});
    CHECK(coeffs[0] == doctest::Approx(0.4));
    for (std::size_t s = 1; s < coeffs.size(); ++s) CHECK(coeffs[s] == doctest::Approx(0.0));
}

TEST_CASE("pauli: K=1 table matches the brute-force character sum") {
    const std::vector<double> table{0.1, 0.5, 0.3, 0.9};
    const auto coeffs = component_coefficients(table);
    const auto oracle = character_sum_oracle(table);
    for (std::size_t s = 0; s < 4; ++s) CHECK(coeffs[s] == doctest::Approx(oracle[s]).epsilon(1e-14));
}

TEST_CASE("pauli: fast transform equals the character sum for K <= 4") {
    Rng rng(5);
    for (int k = 0; k <= 4; ++k) {
        std::vector<double> table(std::size_t{1} << (k + 1));
        for (double& v : table) v = rng.uniform();
        const auto fast = component_coefficients(table);
        const auto naive = character_sum_oracle(table);
        for (std::size_t s = 0; s < table.size(); ++s) {
            CHECK(fast[s] == doctest::Approx(naive[s]).epsilon(1e-12));
        }
    }
}

TEST_CASE("pauli: non-power-of-two tables are rejected") {
    CHECK_THROWS_AS(component_coefficients(std::vector<double>{0.1, 0.2, 0.3}), InputError);
    CHECK_THROWS_AS(component_coefficients(std::vector<double>{}), InputError);
}

TEST_CASE("pauli: transform is linear") {
    Rng rng(9);
    std::vector<double> table(8), scaled(8);
    for (std::size_t i = 0; i < 8; ++i) {
        table[i] = rng.uniform();
        scaled[i] = 3.5 * table[i];
    }
    const auto a = component_coefficients(table);
    const auto b = component_coefficients(scaled);
    for (std::size_t s = 0; s < 8; ++s) CHECK(b[s] == doctest::Approx(3.5 * a[s]).epsilon(1e-12));
}

TEST_CASE("pauli: Parseval identity per component") {
    Rng rng(13);
    std::vector<double> table(16);
    for (double& v : table) v = rng.uniform();
    const auto coeffs = component_coefficients(table);
    double sum_alpha2 = 0.0, sum_f2 = 0.0;
    for (double a : coeffs) sum_alpha2 += a * a;
    for (double f : table) sum_f2 += f * f;
    CHECK(sum_alpha2 == doctest::Approx(sum_f2 / 16.0).epsilon(1e-12));
}

TEST_CASE("pauli: K=0 component touches only the identity and its own qubit") {
    const auto ls = RmnkLandscape::generate({6, 1, 0, 0.0, 3});
    const auto terms = build_component(ls, 0, 3);
    REQUIRE(terms.size() == 2);
    CHECK(terms[0].support == 0);
    CHECK(terms[1].support == (Bits{1} << 3));
}

TEST_CASE("pauli: K=2 component has at most 8 terms of locality <= 3") {
    const auto ls = RmnkLandscape::generate({8, 1, 2, 0.0, 4});
    const auto terms = build_component(ls, 0, 2);
    CHECK(terms.size() <= 8);
    for (const auto& t : terms) CHECK(std::popcount(t.support) <= 3);
}

TEST_CASE("pauli: component diagonal reproduces its table on every global state") {
    const auto ls = RmnkLandscape::generate({6, 2, 2, 0.0, 11});
    const int m = 1, i = 4;
    const auto terms = build_component(ls, m, i);
    for (Bits x = 0; x < (1u << 6); ++x) {
        const double expected = ls.table(m, i)[static_cast<std::size_t>(ls.table_row(m, i, x))];
        CHECK(term_eigenvalue(terms, x) == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("pauli: hand-checked two-variable Hamiltonian") {
    const auto ls = RmnkLandscape::from_parts({2, 1, 0, 0.0, 0}, {{{}, {}}},
                                              {{{0.2, 0.8}, {0.4, 0.6}}});
    const auto ham = build_hamiltonian(ls, 0);
    REQUIRE(ham.terms.size() == 3);
    CHECK(ham.terms[0].support == 0);
    CHECK(ham.terms[0].coefficient == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(ham.terms[1].support == 1);
    CHECK(ham.terms[1].coefficient == doctest::Approx(-0.15).epsilon(1e-15));
    CHECK(ham.terms[2].support == 2);
    CHECK(ham.terms[2].coefficient == doctest::Approx(-0.05).epsilon(1e-15));
}

TEST_CASE("pauli: diagonal of simple sums") {
    PauliZSum constant{2, {{0, 0.7}}};
    for (double v : constant.diagonal()) CHECK(v == doctest::Approx(0.7));

    PauliZSum z0{2, {{1, 1.0}}};
    const auto diag = z0.diagonal();
    REQUIRE(diag.size() == 4);
    CHECK(diag[0] == doctest::Approx(1.0));
    CHECK(diag[1] == doctest::Approx(-1.0));
    CHECK(diag[2] == doctest::Approx(1.0));
    CHECK(diag[3] == doctest::Approx(-1.0));
}

TEST_CASE("pauli: compiled diagonal equals the exhaustive objective table") {
    Rng rng(2024);
    for (int trial = 0; trial < 6; ++trial) {
        const int n = 4 + static_cast<int>(rng.uniform_below(7));  // 4..10
        const int m_objs = 1 + static_cast<int>(rng.uniform_below(3));
        const int k = static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(n)));
        const auto ls = RmnkLandscape::generate(
            {n, m_objs, k, 0.0, 1000 + static_cast<std::uint64_t>(trial)});
        const auto all = ls.evaluate_all();
        for (int m = 0; m < m_objs; ++m) {
            const auto diag = build_hamiltonian(ls, m).diagonal();
            for (std::size_t x = 0; x < diag.size(); ++x) {
                CHECK(std::abs(diag[x] - all[x][m]) < 1e-10);
            }
        }
    }
}

TEST_CASE("pauli: merged supports stay within component neighborhoods") {
    const auto ls = RmnkLandscape::generate({8, 1, 3, 0.0, 6});
    std::vector<Bits> neighborhoods;
    for (int i = 0; i < 8; ++i) {
        Bits mask = Bits{1} << i;
        for (int p : ls.links(0, i)) mask |= Bits{1} << p;
        neighborhoods.push_back(mask);
    }
    for (const auto& term : build_hamiltonian(ls, 0).terms) {
        CHECK(std::popcount(term.support) <= 4);
        bool covered = false;
        for (Bits mask : neighborhoods) {
            if ((term.support & ~mask) == 0) {
                covered = true;
                break;
            }
        }
        CHECK(covered);
    }
}

TEST_CASE("pauli: term list export format") {
    PauliZSum sum{3, {{0, 0.25}, {0b101, -0.5}}};
    std::ostringstream out;
    export_terms(sum, out);
    CHECK(out.str() == "0.25\n-0.5 0 2\n");
}
