#include "doctest.h"

#include "ccfuse/cd/constructors.hpp"
#include "ccfuse/cd/io.hpp"
#include "ccfuse/cd/summary.hpp"
#include "ccfuse/error.hpp"
#include "ccfuse/numerics/rng.hpp"
#include "ccfuse/numerics/special.hpp"
#include "ccfuse/numerics/stats_tests.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>

using namespace ccfuse;
using namespace ccfuse::numerics;

namespace {

// P(Bin(n, 1/2) <= r - 1) by enumerating all 2^n sign patterns.
double enumerate_median_cd(int n, int r) {
    long hits = 0;
    for (long mask = 0; mask < (1L << n); ++mask) {
        if (__builtin_popcountl(static_cast<unsigned long>(mask)) <= r - 1) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(1L << n);
}

ConfidenceDistribution cd_of(std::vector<double> values) {
    std::vector<double> g(values.size());
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = static_cast<double>(i);
    return {ParamGrid(g), values};
}

}  // namespace

// ---------------------------------------------------------------------------
// grid and types

TEST_CASE("ParamGrid invariants") {
    CHECK_THROWS_AS(ParamGrid({1.0}), InvalidArgument);
    CHECK_THROWS_AS(ParamGrid({1.0, 1.0}), InvalidArgument);
    CHECK_THROWS_AS(ParamGrid({0.0, std::nan("")}), InvalidArgument);
    const auto g = ParamGrid::linspace(-1, 1, 5);
    CHECK(g.size() == 5);
    CHECK(g.segment(0.1) == 2);
    CHECK(g.segment(1.0) == 3);
    CHECK(ParamGrid::merged({0, 1, 2}, {1.5, 1.0}).size() == 4);
}

TEST_CASE("ConfidenceLogLik normalisation and -inf flags") {
    const double ninf = -std::numeric_limits<double>::infinity();
    ConfidenceLogLik ll(ParamGrid({0, 1, 2, 3}), {ninf, -3.0, -1.0, -2.0});
    CHECK(ll.argmax == 2);
    CHECK(ll.values[2] == 0.0);
    CHECK(ll.values[1] == -2.0);
    CHECK(ll.at(0.5) == ninf);
    CHECK(ll.at(5.0) == ninf);
    // Interpolation reproduces a quadratic away from its vertex, including
    // at the grid ends, and does not overshoot the maximum node.
    const auto g = ParamGrid({-2, -1.2, -0.6, 0.1, 0.5, 1.2, 1.7, 3});
    std::vector<double> q;
    for (double x : g.values()) q.push_back(-0.5 * (x - 0.3) * (x - 0.3));
    const ConfidenceLogLik lq(g, q);
    for (double x : {-1.9, -0.9, 1.5, 2.9}) {
        CHECK(std::fabs(lq.at(x) - (-0.5 * (x - 0.3) * (x - 0.3) - q[lq.argmax])) < 1e-12);
    }
    for (double x = -2; x <= 3; x += 0.01) CHECK(lq.at(x) <= 0.0);
    CHECK_THROWS_AS(ConfidenceLogLik(ParamGrid({0, 1}), {ninf, ninf}), DegenerateData);
}

// ---------------------------------------------------------------------------
// normal and t

TEST_CASE("normal_cd") {
    const StudySummary skull{2.652, 0.561, {}};
    CHECK(normal_cd(skull).at(2.652) == doctest::Approx(0.5).epsilon(1e-12));
    const auto c01 = normal_cd({0, 1, {}});
    CHECK(std::fabs(c01.at(1.96) - 0.975) < 1e-4);
    const auto c52 = normal_cd({5, 2, {}});
    CHECK(std::fabs(c52.at(5 - 2 * 1.6449) - 0.05) < 1e-4);
    CHECK_THROWS_AS(normal_cd({0, 1, {}}, ParamGrid::linspace(-3, 3, 100)), GridCoverageError);
    // Symmetry about the estimate.
    for (double d : {0.3, 1.1, 2.7}) CHECK(c01.at(d) + c01.at(-d) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("t_cd") {
    const auto grid = ParamGrid::linspace(-10, 10, 2001);
    const auto t1000 = t_cd({0, 1, 1000}, grid);
    const auto n = normal_cd({0, 1, {}}, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) CHECK(std::fabs(t1000.values[i] - n.values[i]) < 1e-3);
    CHECK(std::fabs(t_cd({0, 1, 1}, grid).at(1.0) - 0.75) < 1e-12);
    CHECK(t_cd({3, 2, 5}).at(3.0) == doctest::Approx(0.5));
    // Heavier tails: more mass beyond 2 sd.
    CHECK(t_cd({0, 1, 5}, grid).at(-2.0) > n.at(-2.0));
    CHECK_THROWS_AS(t_cd({0, 1, {}}, grid), InvalidArgument);
}

// ---------------------------------------------------------------------------
// curves and deviances

TEST_CASE("cc_from_cd") {
    const auto cc = cc_from_cd(cd_of({0.1, 0.5, 0.975}));
    CHECK(cc.values[0] == doctest::Approx(0.8));
    CHECK(cc.values[1] == 0.0);
    CHECK(cc.values[2] == doctest::Approx(0.95));
    auto cd = cd_of({0.2, 0.6, 0.9});
    cd.has_boundary_mass = true;
    cd.boundary_mass_at_lo = 0.2;
    const auto cc2 = cc_from_cd(cd);
    CHECK(cc2.has_boundary_mass);
    CHECK(cc2.boundary_mass_at_lo == 0.2);
}

TEST_CASE("deviance and Wilks confidence curve") {
    const auto grid = ParamGrid::linspace(-5, 5, 101);
    std::vector<double> raw(grid.size());
    for (std::size_t i = 0; i < raw.size(); ++i) raw[i] = -0.5 * (grid[i] - 1) * (grid[i] - 1);
    const ConfidenceLogLik ll(grid, raw);
    const auto d = deviance_from_loglik(ll);
    CHECK(d.values[ll.argmax] == 0.0);
    CHECK(d.values[80] == doctest::Approx(4.0));  // ψ = 3
    // D = (ψ - 1)²: twice the curvature of ℓ.
    CHECK(d.values[90] == doctest::Approx(9.0));
    CHECK(d.values[30] == doctest::Approx(9.0));  // ψ = -2
    DevianceCurve dd{ParamGrid({0, 1, 2}), {0.0, 3.8415, 1.0}};
    const auto cc = cc_from_deviance(dd);
    CHECK(cc.values[0] == 0.0);
    CHECK(std::fabs(cc.values[1] - 0.95) < 1e-3);
    CHECK(std::fabs(cc.values[2] - 0.6827) < 1e-3);
}

// ---------------------------------------------------------------------------
// median

TEST_CASE("median_cd small samples") {
    const auto cd = median_cd_distribution({3, 1, 2});
    CHECK(cd.at(2.0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(std::fabs(cd.at(1.0) - 0.125) < 1e-14);
    CHECK(median_cd({1, 2, 3}).at(2.0) == doctest::Approx(0.0).scale(1.0));
    CHECK(cd.at(0.5) == 0.0);
    CHECK(cd.at(3.5) == 1.0);
    CHECK_THROWS_AS(median_cd({1.0}), InvalidArgument);
}

TEST_CASE("median_cd Beta formula equals order-statistic enumeration") {
    for (int n = 2; n <= 8; ++n) {
        std::vector<double> sample;
        for (int i = 0; i < n; ++i) sample.push_back(1.7 * i + std::sin(3.0 * i));
        const auto cd = median_cd_distribution(sample);
        std::sort(sample.begin(), sample.end());
        for (int r = 1; r <= n; ++r) {
            CHECK(std::fabs(cd.at(sample[r - 1]) - enumerate_median_cd(n, r)) < 1e-12);
        }
    }
}

TEST_CASE("median_cd ties are separated deterministically") {
    const auto a = median_cd_distribution({1, 2, 2, 2, 3});
    const auto b = median_cd_distribution({1, 2, 2, 2, 3});
    CHECK(a.values == b.values);
    CHECK(a.grid.values() == b.grid.values());
    CHECK(a.quantile(0.5) == doctest::Approx(2.0).epsilon(1e-6));
}

// ---------------------------------------------------------------------------
// interval summaries

TEST_CASE("cd_from_interval reproduces the 1995 whale summary") {
    const auto r = cd_from_interval(9810, 3439, 21457, 0.95);
    CHECK(std::fabs(r.a - 0.321) < 0.005);
    CHECK(std::fabs(r.s - 2.798) < 0.005);
    CHECK(std::fabs(r.cd.quantile(0.025) / 3439 - 1) < 0.005);
    CHECK(std::fabs(r.cd.quantile(0.5) / 9810 - 1) < 0.005);
    CHECK(std::fabs(r.cd.quantile(0.975) / 21457 - 1) < 0.005);
}

TEST_CASE("cd_from_interval solves the transform equations for 2001") {
    const auto r = cd_from_interval(11319, 6651, 21214, 0.95);
    REQUIRE(r.roots.size() == 1);
    const double z = norm_quantile(0.975);
    const double sg = r.a > 0 ? 1 : -1;
    const auto h = [&](double x) { return sg * std::pow(x, r.a); };
    CHECK(std::fabs(h(6651) - h(11319) + z * r.s) < 1e-12);
    CHECK(std::fabs(h(21214) - h(11319) - z * r.s) < 1e-12);
    for (auto [p, x] : {std::pair{0.025, 6651.0}, std::pair{0.5, 11319.0}, std::pair{0.975, 21214.0}}) {
        CHECK(std::fabs(r.cd.quantile(p) / x - 1) < 0.005);
    }
}

TEST_CASE("cd_from_interval symmetric and failure cases") {
    const auto r = cd_from_interval(10, 5, 15, 0.95);
    CHECK(r.a == 1.0);
    CHECK(r.s == doctest::Approx(5.0 / norm_quantile(0.975)).epsilon(1e-12));
    CHECK(r.cd.at(10) == doctest::Approx(0.5));
    // So skewed that no a in [-2, 2] balances it.
    CHECK_THROWS_AS(cd_from_interval(10, 9.99, 1e6, 0.95), TransformFailure);
    CHECK_THROWS_AS(cd_from_interval(10, 12, 15, 0.95), InvalidArgument);
}

TEST_CASE("cd_from_interval near-logarithmic input uses the log transform") {
    // Exactly symmetric on the log scale: a = 0 is the limiting solution.
    const auto r = cd_from_interval(10, 5, 20, 0.9);
    CHECK(r.log_transform);
    CHECK(std::fabs(r.cd.quantile(0.05) - 5) < 0.01);
    CHECK(std::fabs(r.cd.quantile(0.95) - 20) < 0.05);
}

// ---------------------------------------------------------------------------
// summaries

TEST_CASE("summarize a normal confidence curve") {
    const auto cc = cc_from_cd(normal_cd({0, 1, {}}, ParamGrid::linspace(-6, 6, 1201)));
    const auto s = summarize(cc, 0.95);
    REQUIRE(s.intervals.size() == 1);
    CHECK(std::fabs(s.intervals[0].lo + 1.96) < 0.01);
    CHECK(std::fabs(s.intervals[0].hi - 1.96) < 0.01);
    CHECK(std::fabs(s.point_estimate) < 1e-12);
    CHECK_FALSE(s.intervals[0].lo_open);
    CHECK_THROWS_AS(summarize(cc, 1.5), InvalidArgument);
}

TEST_CASE("summarize disjoint regions, open ends and boundary masses") {
    ConfidenceCurve cc(ParamGrid({0, 1, 2, 3, 4, 5, 6}), {0.5, 0.2, 0.9, 0.95, 0.1, 0.0, 0.3});
    const auto s = summarize(cc, 0.6);
    REQUIRE(s.intervals.size() == 2);
    CHECK(s.intervals[0].lo == 0.0);
    CHECK(s.intervals[0].lo_open);
    CHECK(s.intervals[0].hi == doctest::Approx(1 + 0.4 / 0.7));
    CHECK(s.intervals[1].hi == 6.0);
    CHECK(s.intervals[1].hi_open);
    CHECK(s.point_estimate == 5.0);
    cc.has_boundary_mass = true;
    cc.boundary_mass_at_lo = 0.25;
    const auto sb = summarize(cc, 0.6);
    CHECK_FALSE(sb.intervals[0].lo_open);
    CHECK(sb.has_boundary_mass);
    CHECK(sb.boundary_mass == 0.25);
    CHECK_THROWS_AS(summarize(ConfidenceCurve(ParamGrid({0, 1}), {0.9, 0.8}), 0.5), DegenerateData);
}

// ---------------------------------------------------------------------------
// serialisation

TEST_CASE("curve files round-trip bit-exactly") {
    const auto cd = cd_from_interval(9810, 3439, 21457, 0.95).cd;
    auto f = to_file(cd);
    f.levels = {0.9, 0.95};
    const std::string path = (std::filesystem::temp_directory_path() / "ccfuse_roundtrip.csv").string();
    write_curve(path, f);
    const auto back = read_curve(path);
    CHECK(back.kind == "cd");
    CHECK(back.grid.values() == cd.grid.values());
    CHECK(back.values == cd.values);
    CHECK(back.levels == f.levels);
    std::remove(path.c_str());
    std::remove((path + ".json").c_str());
}

TEST_CASE("read_csv reports the bad row") {
    const std::string path = (std::filesystem::temp_directory_path() / "ccfuse_bad.csv").string();
    {
        std::FILE* fp = std::fopen(path.c_str(), "w");
        std::fputs("estimate,stddev\n1,2\n3,x\n", fp);
        std::fclose(fp);
    }
    try {
        read_csv(path, {"estimate", "stddev"});
        FAIL("expected an exception");
    } catch (const InvalidArgument& e) {
        CHECK(std::string(e.what()).find("row 3") != std::string::npos);
    }
    std::remove(path.c_str());
}

// ---------------------------------------------------------------------------
// validity: cc at the truth is uniform for exact constructors

TEST_CASE("cc at the true value is uniform for normal, t and median CDs") {
    const int reps = 2000;
    Generator g(RngStream{77, 3});
    std::vector<double> u_norm, u_t, u_med;
    const double truth = 1.5;
    for (int r = 0; r < reps; ++r) {
        // normal with known sd
        const double sd = 0.7;
        const double est = g.normal(truth, sd);
        u_norm.push_back(cc_from_cd(normal_cd({est, sd, {}})).at(truth));
        // t with estimated sd from n = 6 observations
        const int n = 6;
        std::vector<double> xs;
        for (int i = 0; i < n; ++i) xs.push_back(g.normal(truth, 2.0));
        const double m = mean(xs);
        const double se = std::sqrt(variance(xs) / n);
        u_t.push_back(cc_from_cd(t_cd({m, se, n - 1})).at(truth));
        // median CD on 51 uniforms, true median 0.5. Interpolating between
        // order statistics leaves a small systematic departure from exact
        // uniformity that shrinks like 1/n; n = 51 keeps it well below what
        // 2000 replications can detect.
        std::vector<double> us;
        for (int i = 0; i < 51; ++i) us.push_back(g.uniform());
        u_med.push_back(median_cd(us).at(0.5));
    }
    CHECK(ks_uniform(u_norm).p_value > 0.01);
    CHECK(ks_uniform(u_t).p_value > 0.01);
    CHECK(ks_uniform(u_med).p_value > 0.01);
}
