#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "qmoo/landscape.hpp"
#include "qmoo/rng.hpp"
#include "test_util.hpp"

using namespace qmoo;
using qmoo_test::TempDir;
namespace fs = std::filesystem;

namespace {

// Independent re-summation oracle: recomputes one objective straight from
// links and tables without going through table_row/evaluate.
double component_mean_oracle(const RmnkLandscape& ls, int m, Bits x) {
    double acc = 0.0;
    for (int i = 0; i < ls.n_vars(); ++i) {
        std::size_t row = 0;
        std::size_t weight = 1;
        row += ((x >> i) & 1) * weight;
        weight <<= 1;
        for (int partner : ls.links(m, i)) {
            row += ((x >> partner) & 1) * weight;
            weight <<= 1;
        }
        acc += ls.table(m, i)[row];
    }
    return acc / ls.n_vars();
}

double pearson_oracle(const std::vector<ObjectiveVector>& values, int p, int q) {
    const double n = static_cast<double>(values.size());
    double mp = 0, mq = 0;
    for (const auto& v : values) {
        mp += v[p];
        mq += v[q];
    }
    mp /= n;
    mq /= n;
    double spq = 0, spp = 0, sqq = 0;
    for (const auto& v : values) {
        spq += (v[p] - mp) * (v[q] - mq);
        spp += (v[p] - mp) * (v[p] - mp);
        sqq += (v[q] - mq) * (v[q] - mq);
    }
    return spq / std::sqrt(spp * sqq);
}

RmnkLandscape tiny_two_var_landscape() {
    // N=2, M=1, K=0: f_1 = {0.2, 0.8}, f_2 = {0.4, 0.6}.
    return RmnkLandscape::from_parts({2, 1, 0, 0.0, 0}, {{{}, {}}},
                                     {{{0.2, 0.8}, {0.4, 0.6}}});
}

}  // namespace

TEST_CASE("landscape: config validation names the violated bound") {
    CHECK_THROWS_WITH_AS(RmnkLandscape::generate({0, 1, 0, 0.0, 1}),
                         doctest::Contains("N >= 1"), ConfigError);
    CHECK_THROWS_WITH_AS(RmnkLandscape::generate({4, 0, 0, 0.0, 1}),
                         doctest::Contains("M >= 1"), ConfigError);
    CHECK_THROWS_WITH_AS(RmnkLandscape::generate({4, 2, 4, 0.0, 1}),
                         doctest::Contains("0 <= K <= N-1"), ConfigError);
    CHECK_THROWS_WITH_AS(RmnkLandscape::generate({4, 1, 1, 0.5, 1}),
                         doctest::Contains("rho must be 0 when M = 1"), ConfigError);
    CHECK_THROWS_WITH_AS(RmnkLandscape::generate({4, 3, 1, -0.6, 1}),
                         doctest::Contains("-1/(M-1) <= rho <= 1"), ConfigError);
    CHECK_NOTHROW(RmnkLandscape::generate({4, 3, 1, -0.5, 1}));
}

TEST_CASE("landscape: generated structure matches N, M, K") {
    const auto ls = RmnkLandscape::generate({2, 1, 0, 0.0, 7});
    for (int i = 0; i < 2; ++i) {
        CHECK(ls.table(0, i).size() == 2);
        for (double v : ls.table(0, i)) {
            CHECK(v > 0.0);
            CHECK(v < 1.0);
        }
    }
}

TEST_CASE("landscape: K = N-1 forces full linkage") {
    const auto ls = RmnkLandscape::generate({4, 2, 3, 0.0, 1});
    for (int m = 0; m < 2; ++m) {
        for (int i = 0; i < 4; ++i) {
            auto partners = ls.links(m, i);
            CHECK(partners.size() == 3);
            std::sort(partners.begin(), partners.end());
            std::vector<int> expected;
            for (int v = 0; v < 4; ++v) {
                if (v != i) expected.push_back(v);
            }
            CHECK(partners == expected);
        }
    }
}

TEST_CASE("landscape: partner lists are distinct and never self-referential") {
    const auto ls = RmnkLandscape::generate({10, 3, 4, 0.0, 99});
    for (int m = 0; m < 3; ++m) {
        for (int i = 0; i < 10; ++i) {
            auto partners = ls.links(m, i);
            CHECK(partners.size() == 4);
            std::sort(partners.begin(), partners.end());
            CHECK(std::adjacent_find(partners.begin(), partners.end()) == partners.end());
            CHECK(std::find(partners.begin(), partners.end(), i) == partners.end());
        }
    }
}

TEST_CASE("landscape: evaluate on the hand-built two-variable instance") {
    const auto ls = tiny_two_var_landscape();
    // x_1 = 1, x_2 = 0: (f_1(1) + f_2(0)) / 2 = (0.8 + 0.4) / 2.
    CHECK(ls.evaluate(0b01)[0] == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(ls.evaluate(0b00)[0] == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(ls.evaluate(0b11)[0] == doctest::Approx(0.7).epsilon(1e-15));
    CHECK_THROWS_AS(ls.evaluate(0b100), InputError);
}

TEST_CASE("landscape: constant tables give constant objectives") {
    const auto ls = RmnkLandscape::from_parts(
        {2, 2, 0, 0.0, 0}, {{{}, {}}, {{}, {}}},
        {{{0.5, 0.5}, {0.5, 0.5}}, {{0.5, 0.5}, {0.5, 0.5}}});
    for (Bits x = 0; x < 4; ++x) {
        const auto v = ls.evaluate(x);
        CHECK(v[0] == doctest::Approx(0.5));
        CHECK(v[1] == doctest::Approx(0.5));
    }
}

TEST_CASE("landscape: evaluate agrees with the re-summation oracle over all 2^12 inputs") {
    const auto ls = RmnkLandscape::generate({12, 2, 3, 0.0, 5});
    for (Bits x = 0; x < (1u << 12); ++x) {
        const auto v = ls.evaluate(x);
        for (int m = 0; m < 2; ++m) {
            CHECK(v[m] == doctest::Approx(component_mean_oracle(ls, m, x)).epsilon(1e-14));
        }
    }
}

TEST_CASE("landscape: evaluate_all matches evaluate and the basis ordering") {
    const auto tiny = RmnkLandscape::from_parts({1, 1, 0, 0.0, 0}, {{{}}}, {{{0.3, 0.7}}});
    const auto all = tiny.evaluate_all();
    REQUIRE(all.size() == 2);
    CHECK(all[0][0] == doctest::Approx(0.3));
    CHECK(all[1][0] == doctest::Approx(0.7));

    const auto ls = RmnkLandscape::generate({12, 3, 1, 0.0, 8});
    const auto table = ls.evaluate_all();
    CHECK(table.size() == 4096);
    Rng rng(17);
    for (int trial = 0; trial < 100; ++trial) {
        const Bits x = rng.uniform_below(4096);
        CHECK(table[x] == ls.evaluate(x));
    }
}

TEST_CASE("landscape: evaluate_all guard") {
    RmnkConfig config{kMaxExhaustiveVars + 1, 1, 0, 0.0, 1};
    const auto ls = RmnkLandscape::generate(config);
    CHECK_THROWS_AS(ls.evaluate_all(), ResourceError);
}

TEST_CASE("landscape: measured correlation basics") {
    const auto single = RmnkLandscape::generate({6, 1, 1, 0.0, 2});
    const auto corr1 = single.measured_correlation();
    REQUIRE(corr1.size() == 1);
    CHECK(corr1[0][0] == 1.0);

    const auto ls = RmnkLandscape::generate({10, 3, 2, 0.3, 4});
    const auto corr = ls.measured_correlation();
    for (int p = 0; p < 3; ++p) {
        CHECK(corr[p][p] == 1.0);
        for (int q = 0; q < 3; ++q) CHECK(corr[p][q] == corr[q][p]);
    }
}

TEST_CASE("landscape: measured correlation equals the exhaustive Pearson oracle") {
    const auto ls = RmnkLandscape::generate({10, 2, 1, 0.5, 21});
    const auto corr = ls.measured_correlation();
    const auto values = ls.evaluate_all();
    CHECK(corr[0][1] == doctest::Approx(pearson_oracle(values, 0, 1)).epsilon(1e-12));
}

TEST_CASE("landscape: correlation control hits rho = 0.9 at N=12") {
    const auto ls = RmnkLandscape::generate({12, 2, 2, 0.9, 31});
    const auto corr = ls.measured_correlation();
    CHECK(std::abs(corr[0][1] - 0.9) <= 0.1);
}

TEST_CASE("landscape: degenerate objective reports undefined correlation") {
    const auto ls = RmnkLandscape::from_parts({2, 1, 0, 0.0, 0}, {{{}, {}}},
                                              {{{0.5, 0.5}, {0.5, 0.5}}});
    CHECK_THROWS_WITH_AS(ls.measured_correlation(), doctest::Contains("undefined correlation"),
                         Error);
}

TEST_CASE("landscape: rho = 1 makes all objectives identical") {
    const auto ls = RmnkLandscape::generate({10, 3, 2, 1.0, 13});
    const auto values = ls.evaluate_all();
    for (const auto& v : values) {
        CHECK(std::abs(v[0] - v[1]) < 1e-9);
        CHECK(std::abs(v[0] - v[2]) < 1e-9);
    }
}

TEST_CASE("landscape: deterministic regeneration") {
    const RmnkConfig config{9, 2, 3, -0.5, 12345};
    CHECK(RmnkLandscape::generate(config) == RmnkLandscape::generate(config));
}

TEST_CASE("landscape: objective range stays inside (0,1)") {
    const auto ls = RmnkLandscape::generate({8, 2, 7, 0.0, 77});
    for (const auto& v : ls.evaluate_all()) {
        for (double c : v) {
            CHECK(c > 0.0);
            CHECK(c < 1.0);
        }
    }
}

TEST_CASE("landscape: save/load round-trip is exact") {
    TempDir tmp;
    const auto ls = RmnkLandscape::generate({7, 2, 2, 0.25, 99});
    const auto path = tmp.path / "instance.json";
    ls.save(path);
    CHECK(RmnkLandscape::load(path) == ls);
}

TEST_CASE("landscape: regenerating from a stored config reproduces stored tables") {
    TempDir tmp;
    const auto ls = RmnkLandscape::generate({6, 3, 1, -0.4, 4242});
    const auto path = tmp.path / "instance.json";
    ls.save(path);
    const auto loaded = RmnkLandscape::load(path);
    CHECK(RmnkLandscape::generate(loaded.config()) == loaded);
}

TEST_CASE("landscape: malformed files raise parse errors") {
    TempDir tmp;
    const auto path = tmp.path / "bad.json";

    std::ofstream(path.string()) << "{ not json";
    CHECK_THROWS_AS(RmnkLandscape::load(path), ParseError);

    const auto ls = RmnkLandscape::generate({3, 1, 1, 0.0, 1});
    std::string text = ls.to_json_string();
    // Drop one table entry: structurally valid JSON, wrong table length.
    const auto pos = text.find("0.", text.find("tables"));
    REQUIRE(pos != std::string::npos);
    std::string corrupted = text;
    corrupted.erase(pos, corrupted.find(',', pos) - pos + 1);
    std::ofstream(path.string()) << corrupted;
    CHECK_THROWS_WITH_AS(RmnkLandscape::load(path), doctest::Contains("table length"),
                         ParseError);
}

TEST_CASE("landscape: version mismatch raises a format error") {
    TempDir tmp;
    const auto ls = RmnkLandscape::generate({3, 1, 1, 0.0, 1});
    std::string text = ls.to_json_string();
    const auto pos = text.find("\"format_version\":1");
    REQUIRE(pos != std::string::npos);
    text.replace(pos, 18, "\"format_version\":9");
    const auto path = tmp.path / "future.json";
    std::ofstream(path.string()) << text;
    CHECK_THROWS_AS(RmnkLandscape::load(path), FormatError);
}
