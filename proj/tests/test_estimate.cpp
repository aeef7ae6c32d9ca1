#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>

#include "mfbounds/partition.hpp"
#include "mfbounds/scaling.hpp"
#include "mfbounds/sim.hpp"
#include "support.hpp"

using namespace mfbounds;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

SamplePath from_values(std::vector<double> values, double horizon) {
    SamplePath p;
    p.times = uniform_times(values.size() - 1, horizon);
    p.values = std::move(values);
    return p;
}

SamplePath linear_path(std::size_t n, double c, double horizon) {
    std::vector<double> v(n + 1);
    const double step = horizon / static_cast<double>(n);
    for (std::size_t i = 0; i <= n; ++i) v[i] = c * static_cast<double>(i) * step;
    return from_values(std::move(v), horizon);
}

}  // namespace

TEST_CASE("standard partition function", "[estimate]") {
    SECTION("linear path at lag 2") {
        auto p = linear_path(100, 1.0, 100.0);
        auto t = partition_function(p, MomentGrid({2.0}), ScaleGrid({2}, 1.0));
        CHECK(t.at(0, 0) == 4.0);
    }
    SECTION("moments near zero give values near one") {
        auto p = bm_path(10000, 10000.0, Seed{3});
        auto t = partition_function(p, MomentGrid({-0.01, 0.01}), ScaleGrid::geometric(p, 20));
        for (const auto& row : t.values)
            for (double s : row) CHECK((s >= 0.9 && s <= 1.1));
    }
    SECTION("naive oracle, bit-exact") {
        auto p = bm_path(1024, 1024.0, Seed{7});
        const std::vector<double> qs{-1.0, 1.0, 2.0};
        auto t = partition_function(p, MomentGrid(qs), ScaleGrid({1, 2, 4}, 1.0));
        for (std::size_t qi = 0; qi < qs.size(); ++qi)
            for (std::size_t si = 0; si < 3; ++si) CHECK(t.at(qi, si) == testing::naive_partition(p.values, qs[qi], t.deltas.lags()[si]));
    }
    SECTION("errors") {
        std::vector<double> v(101);
        for (std::size_t i = 0; i <= 100; ++i) v[i] = i < 50 ? static_cast<double>(i) : 49.0;
        auto flat = from_values(v, 100.0);
        try {
            partition_function(flat, MomentGrid({-1.0, 1.0}), ScaleGrid({1}, 1.0));
            FAIL("expected DegenerateIncrement");
        } catch (const DegenerateIncrement& e) {
            CHECK(e.block() == 49);
        }
        CHECK_NOTHROW(partition_function(flat, MomentGrid({1.0}), ScaleGrid({1}, 1.0)));
        CHECK_THROWS_AS(partition_function(flat, MomentGrid({1.0}), ScaleGrid::from_deltas({1.5}, 0.5)), GridError);
        CHECK_THROWS_AS(ScaleGrid::from_deltas({1.5}, 1.0), GridError);
        CHECK_THROWS_AS(partition_function(flat, MomentGrid({1.0}), ScaleGrid({200}, 1.0)), GridError);
        CHECK_THROWS_AS(MomentGrid({0.005}), ValidationError);
    }
}

TEST_CASE("modified partition function", "[estimate]") {
    auto p = bm_path(1024, 1024.0, Seed{7});
    SECTION("m = 1 equals the standard table") {
        MomentGrid qs = MomentGrid::range(-3.0, 3.0, 0.5);
        auto grid = ScaleGrid::geometric(p, 20, 512);
        CHECK(modified_partition_function(p, qs, grid, 1).values == partition_function(p, qs, grid).values);
    }
    SECTION("linear path, any m") {
        auto lin = linear_path(600, 1.0, 600.0);
        for (std::size_t m : {1, 2, 5, 20}) CHECK(modified_partition_function(lin, MomentGrid({1.0}), ScaleGrid({1}, 1.0), m).at(0, 0) == 1.0);
    }
    SECTION("naive oracle, bit-exact") {
        auto t = modified_partition_function(p, MomentGrid({-2.0}), ScaleGrid({2}, 1.0), 3);
        CHECK(t.at(0, 0) == testing::naive_modified_partition(p.values, -2.0, 2, 3));
    }
    SECTION("errors") {
        CHECK_THROWS_AS(modified_partition_function(p, MomentGrid({1.0}), ScaleGrid({30}, 1.0), 20), BlockError);
        CHECK_NOTHROW(modified_partition_function(p, MomentGrid({1.0}), ScaleGrid({25}, 1.0), 20));
        CHECK_THROWS_AS(modified_partition_function(p, MomentGrid({1.0}), ScaleGrid({1}, 1.0), 0), ValidationError);
    }
}

TEST_CASE("randomized oracle equivalence", "[estimate]") {
    std::mt19937_64 gen(2024);
    for (int trial = 0; trial < 25; ++trial) {
        std::uniform_int_distribution<std::size_t> len(100, 4095);
        const std::size_t n = len(gen);
        auto p = generate(trial % 2 ? ProcessSpec{process::StableLevy{1.3, 1.0, 0.0, 0.0}} : ProcessSpec{process::BM{}}, n,
                          static_cast<double>(n), Seed{static_cast<std::uint64_t>(trial)});
        std::uniform_real_distribution<double> qd(-3.0, 3.0);
        std::vector<double> qs;
        while (qs.size() < 4) {
            const double q = qd(gen);
            if (std::abs(q) >= kMomentEpsilon) qs.push_back(q);
        }
        std::sort(qs.begin(), qs.end());
        const std::size_t m = std::array<std::size_t, 4>{1, 2, 5, 20}[trial % 4];
        auto grid = ScaleGrid::geometric(p, 10, n / (2 * m));
        auto std_t = partition_function(p, MomentGrid(qs), grid);
        auto mod_t = modified_partition_function(p, MomentGrid(qs), grid, m);
        for (std::size_t qi = 0; qi < qs.size(); ++qi)
            for (std::size_t si = 0; si < grid.size(); ++si) {
                CHECK(std_t.at(qi, si) == testing::naive_partition(p.values, qs[qi], grid.lags()[si]));
                CHECK(mod_t.at(qi, si) == testing::naive_modified_partition(p.values, qs[qi], grid.lags()[si], m));
            }
    }
}

TEST_CASE("scaling function", "[estimate]") {
    SECTION("exact scaling of a linear path") {
        auto p = linear_path(10000, 2.0, 10000.0);
        for (const auto& grid : {ScaleGrid::geometric(p, 20), ScaleGrid({1, 3, 7, 50}, 1.0)}) {
            auto e = scaling_function(partition_function(p, MomentGrid({0.5, 1.0, 2.0}), grid));
            for (std::size_t i = 0; i < 3; ++i) CHECK_THAT(e.tau[i], WithinAbs(e.qs[i], 1e-12));
        }
    }
    SECTION("Cauchy path at q = 2") {
        std::vector<double> taus;
        for (std::uint64_t s = 1; s <= 10; ++s) {
            auto p = generate(process::StableLevy{1.0, 1.0, 0.0, 0.0}, 10000, 10000.0, Seed{s});
            taus.push_back(scaling_function(partition_function(p, MomentGrid({2.0}), ScaleGrid::geometric(p, 20))).tau[0]);
        }
        CHECK_THAT(testing::median_of(taus), WithinAbs(1.0, 0.15));
    }
    SECTION("slope matches centered least squares") {
        auto p = generate(process::FBM{0.3}, 4096, 1.0, Seed{12});
        auto t = partition_function(p, MomentGrid::range(-2.0, 4.0, 0.5), ScaleGrid::geometric(p, 20));
        auto e = scaling_function(t);
        for (std::size_t qi = 0; qi < t.qs.size(); ++qi) {
            std::vector<double> x, y;
            for (std::size_t si = 0; si < t.deltas.size(); ++si) {
                x.push_back(std::log(t.deltas.delta(si)));
                y.push_back(std::log(t.at(qi, si)));
            }
            const auto line = testing::centered_ols(x, y);
            CHECK_THAT(e.tau[qi], WithinRel(line.slope, 1e-10));
            CHECK_THAT(e.intercept[qi], WithinAbs(line.intercept, 1e-9));
        }
    }
    SECTION("regression preconditions") {
        auto p = bm_path(100, 100.0, Seed{1});
        CHECK_THROWS_AS(scaling_function(partition_function(p, MomentGrid({1.0}), ScaleGrid({1, 2}, 1.0))), RegressionError);
        CHECK_THROWS_WITH(least_squares(std::vector<double>{1.0, 1.0, 1.0}, std::vector<double>{1.0, 2.0, 3.0}),
                          Catch::Matchers::ContainsSubstring("degenerate"));
    }
}

TEST_CASE("scaling invariants", "[estimate]") {
    auto p = bm_path(4096, 4096.0, Seed{5});
    MomentGrid qs = MomentGrid::range(-2.0, 3.0, 0.5);
    auto grid = ScaleGrid::geometric(p, 20, 4096 / 40);

    SECTION("scale covariance") {
        const double lambda = 3.5;
        auto scaled = p;
        for (auto& v : scaled.values) v *= lambda;
        for (bool modified : {false, true}) {
            auto a = scaling_function(modified ? modified_partition_function(p, qs, grid, 20) : partition_function(p, qs, grid));
            auto b = scaling_function(modified ? modified_partition_function(scaled, qs, grid, 20)
                                               : partition_function(scaled, qs, grid));
            for (std::size_t i = 0; i < qs.size(); ++i) {
                CHECK_THAT(b.tau[i], WithinAbs(a.tau[i], 1e-9));
                CHECK_THAT(b.intercept[i] - a.intercept[i], WithinAbs(qs[i] * std::log(lambda), 1e-9));
            }
        }
    }
    SECTION("permuting unit increments leaves the unit-lag value unchanged") {
        auto d = testing::diffs(p.values);
        std::mt19937_64 gen(99);
        std::shuffle(d.begin(), d.end(), gen);
        std::vector<double> v{0.0};
        for (double x : d) v.push_back(v.back() + x);
        auto shuffled = from_values(v, 4096.0);
        auto a = partition_function(p, qs, ScaleGrid({1}, 1.0));
        auto b = partition_function(shuffled, qs, ScaleGrid({1}, 1.0));
        for (std::size_t i = 0; i < qs.size(); ++i) CHECK_THAT(b.at(i, 0), WithinRel(a.at(i, 0), 1e-9));
    }
    SECTION("power-law path t^gamma") {
        const double gamma = 1.5;
        std::vector<double> v(4097);
        for (std::size_t i = 0; i <= 4096; ++i) v[i] = std::pow(static_cast<double>(i), gamma);
        auto path = from_values(v, 4096.0);
        auto t = partition_function(path, MomentGrid({1.0, 2.0}), grid);
        auto e = scaling_function(t);
        for (std::size_t qi = 0; qi < 2; ++qi) {
            std::vector<double> x, y;
            for (std::size_t si = 0; si < grid.size(); ++si) {
                const std::size_t lag = grid.lags()[si], blocks = 4096 / lag;
                double s = 0.0;
                for (std::size_t k = 1; k <= blocks; ++k)
                    s += std::pow(std::pow(static_cast<double>(k * lag), gamma) - std::pow(static_cast<double>((k - 1) * lag), gamma),
                                  t.qs[qi]);
                x.push_back(std::log(static_cast<double>(lag)));
                y.push_back(std::log(s / static_cast<double>(blocks)));
            }
            CHECK_THAT(e.tau[qi], WithinAbs(testing::centered_ols(x, y).slope, 1e-9));
        }
    }
}

TEST_CASE("dyadic estimator", "[estimate]") {
    SECTION("linear path") { CHECK_THAT(dyadic_scaling_estimate(linear_path(8, 1.0, 1.0), 2.0, 3), WithinAbs(2.0, 1e-12)); }
    SECTION("cascade at q = 2") {
        std::vector<double> est;
        for (std::uint64_t s = 1; s <= 10; ++s) est.push_back(dyadic_scaling_estimate(cascade_path(0.025, 16384, 1.0, Seed{s}), 2.0, 10));
        CHECK_THAT(testing::median_of(est), WithinAbs(1.9, 0.15));
    }
    SECTION("matches the partition value oracle") {
        auto p = bm_path(4096, 1.0, Seed{3});
        for (unsigned j : {2u, 5u, 9u}) {
            const double s = testing::naive_partition(p.values, 1.5, 4096 >> j);
            CHECK(dyadic_scaling_estimate(p, 1.5, j) == std::log2(s) / -static_cast<double>(j));
        }
    }
    SECTION("divisibility") { CHECK_THROWS_AS(dyadic_scaling_estimate(bm_path(1000, 1.0, Seed{1}), 1.0, 4), GridError); }
}

TEST_CASE("linearity check", "[estimate]") {
    SECTION("linear path passes with r2 = 1") {
        auto p = linear_path(1000, 2.0, 1000.0);
        for (const auto& r : linearity_check(partition_function(p, MomentGrid::range(-2.0, 4.0, 1.0), ScaleGrid::geometric(p, 20)))) {
            CHECK(r.pass);
            CHECK_THAT(r.r2, WithinAbs(1.0, 1e-12));
        }
    }
    SECTION("BM passes for q in [0.5, 3]") {
        MomentGrid qs = MomentGrid::range(0.5, 3.0, 0.5);
        std::vector<std::vector<double>> r2(qs.size());
        for (std::uint64_t s = 1; s <= 10; ++s) {
            auto p = bm_path(10000, 10000.0, Seed{s});
            auto report = linearity_check(partition_function(p, qs, ScaleGrid::geometric(p, 20, 10000 / (2 * kDefaultBlockSize))));
            for (std::size_t i = 0; i < qs.size(); ++i) r2[i].push_back(report[i].r2);
        }
        for (const auto& col : r2) CHECK(testing::median_of(col) >= kDefaultR2Threshold);
    }
    SECTION("a single large jump breaks linearity at q = 4") {
        auto z = gaussian_variates(10000, Seed{17});
        std::vector<double> v{0.0};
        for (double x : z) v.push_back(v.back() + x);
        for (std::size_t i = 9995; i < v.size(); ++i) v[i] += 1000.0;
        auto p = from_values(v, 10000.0);
        auto report = linearity_check(partition_function(p, MomentGrid({4.0}), ScaleGrid::geometric(p, 20)));
        CHECK_FALSE(report[0].pass);
    }
}

TEST_CASE("table and estimate files", "[estimate]") {
    auto dir = testing::fresh_dir("estimate_files");
    auto p = bm_path(512, 512.0, Seed{4});
    auto grid = ScaleGrid::geometric(p, 10);
    auto t = partition_function(p, MomentGrid({-1.0, 2.0}), grid);
    write_partition(t, dir / "S.csv");
    auto rows = io::read_csv(dir / "S.csv", {"q", "delta_t", "S"});
    REQUIRE(rows.size() == 2 * grid.size());
    CHECK(rows[1][2] == t.at(0, 1));
    auto side = io::read_json(dir / "S.json");
    CHECK(side.at("mode") == "standard");

    auto e = scaling_function(t);
    write_scaling(e, grid, dir / "tau.csv");
    auto tau_rows = io::read_csv(dir / "tau.csv", {"q", "tau_hat", "r2"});
    REQUIRE(tau_rows.size() == 2);
    CHECK(tau_rows[1][1] == e.tau[1]);
}
