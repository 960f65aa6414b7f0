// Unit tests for the numerical substrate. Oracles here are deliberately
// written independently of the library code: plain series, bisection and
// closed forms.

#include "doctest.h"

#include "ccfuse/error.hpp"
#include "ccfuse/numerics/optimize.hpp"
#include "ccfuse/numerics/parallel.hpp"
#include "ccfuse/numerics/quadrature.hpp"
#include "ccfuse/numerics/rng.hpp"
#include "ccfuse/numerics/special.hpp"
#include "ccfuse/numerics/stats_tests.hpp"

#include <cmath>
#include <limits>
#include <vector>

using namespace ccfuse;
using namespace ccfuse::numerics;

namespace {

// Φ(x) = ½ + φ(x) Σ x^(2n+1) / (2n+1)!!  (converges for all x).
double phi_series(double x) {
    double term = x, sum = x;
    for (int n = 1; n < 500; ++n) {
        term *= x * x / (2.0 * n + 1.0);
        sum += term;
        if (std::fabs(term) < 1e-18 * std::fabs(sum)) break;
    }
    return 0.5 + std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI) * sum;
}

// Lower regularized gamma by its power series only.
double gamma_p_series_oracle(double a, double x) {
    double term = 1.0 / a, sum = term;
    for (int n = 1; n < 10000; ++n) {
        term *= x / (a + n);
        sum += term;
        if (term < 1e-18 * sum) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double bisect(const std::function<double(double)>& f, double lo, double hi) {
    double flo = f(lo);
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if ((fm > 0) == (flo > 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace

// ---------------------------------------------------------------------------
// special functions

TEST_CASE("log_gamma agrees with the C library") {
    for (double x : {0.01, 0.3, 0.5, 1.0, 1.5, 2.0, 7.25, 30.0, 171.3, 1e4}) {
        CHECK(log_gamma(x) == doctest::Approx(std::lgamma(x)).epsilon(1e-13).scale(1.0));
    }
    CHECK(log_gamma(0.5) == doctest::Approx(0.5 * std::log(M_PI)).epsilon(1e-14));
    CHECK_THROWS_AS(log_gamma(0.0), InvalidArgument);
}

TEST_CASE("norm_cdf and norm_quantile") {
    CHECK(norm_cdf(0.0) == 0.5);
    CHECK(std::fabs(norm_cdf(1.96) - 0.9750) < 1e-4);
    for (double x : {-5.0, -2.3, -0.7, 0.1, 1.0, 1.96, 3.3}) {
        CHECK(std::fabs(norm_cdf(x) - phi_series(x)) < 1e-13);
    }
    CHECK(norm_quantile(0.5) == 0.0);
    // Above x = 3 the probability itself carries an absolute rounding error
    // of 1e-16, so the round trip is limited by conditioning, not the code.
    for (double x = -6.0; x <= 3.0; x += 0.37) {
        CHECK(std::fabs(norm_quantile(norm_cdf(x)) - x) < 1e-12 * (1.0 + std::fabs(x)));
    }
    CHECK(std::isinf(norm_quantile(0.0)));
    CHECK(norm_quantile(0.0) < 0);
    CHECK(norm_quantile(1.0) > 0);
    CHECK_THROWS_AS(norm_quantile(1.5), InvalidArgument);
    CHECK(std::fabs(norm_sf(8.0) - 6.22096057427178e-16) < 1e-25);
}

TEST_CASE("chi-squared distribution") {
    CHECK(chi2_cdf(0.0, 1) == 0.0);
    const double q95 = bisect([](double x) { return gamma_p_series_oracle(0.5, 0.5 * x) - 0.95; },
                              0.0, 20.0);
    CHECK(std::fabs(chi2_quantile(0.95, 1) - q95) < 1e-9);
    CHECK(std::fabs(chi2_quantile(0.95, 1) - 3.8415) < 1e-3);
    CHECK(std::fabs(chi2_cdf(1.0, 1) - (2.0 * phi_series(1.0) - 1.0)) < 1e-12);
    CHECK(std::fabs(chi2_cdf(1.0, 1) - 0.6827) < 1e-3);
    for (double df : {2.0, 3.0, 7.0, 19.0}) {
        for (double x : {0.1, 1.0, 4.0, 12.0}) {
            CHECK(std::fabs(chi2_cdf(x, df) - gamma_p_series_oracle(0.5 * df, 0.5 * x)) < 1e-12);
        }
    }
    CHECK_THROWS_AS(chi2_cdf(1.0, 0.0), InvalidArgument);
    CHECK_THROWS_AS(chi2_quantile(0.5, -1.0), InvalidArgument);
}

TEST_CASE("beta_cdf closed forms") {
    CHECK(beta_cdf(0.5, 2, 2) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(std::fabs(beta_cdf(0.5, 1, 3) - 0.875) < 1e-14);
    CHECK(beta_cdf(1.0, 3, 5) == 1.0);
    for (double x : {0.05, 0.3, 0.77}) {
        // I_x(1, b) = 1 - (1-x)^b and I_x(a, 1) = x^a.
        CHECK(std::fabs(beta_cdf(x, 1, 4.5) - (1 - std::pow(1 - x, 4.5))) < 1e-13);
        CHECK(std::fabs(beta_cdf(x, 2.5, 1) - std::pow(x, 2.5)) < 1e-13);
    }
    CHECK_THROWS_AS(beta_cdf(0.5, 0.0, 1.0), InvalidArgument);
    CHECK_THROWS_AS(beta_cdf(0.5, 1.0, -2.0), InvalidArgument);
}

TEST_CASE("Student t") {
    CHECK(std::fabs(t_cdf(1.0, 1.0) - 0.75) < 1e-13);
    CHECK(t_cdf(0.0, 5.0) == doctest::Approx(0.5));
    // df = 2 closed form: F(x) = ½ + x / (2√(x²+2)).
    for (double x : {-3.0, -0.4, 0.9, 2.5}) {
        CHECK(std::fabs(t_cdf(x, 2.0) - (0.5 + x / (2 * std::sqrt(x * x + 2)))) < 1e-13);
    }
    for (double df : {1.0, 3.0, 10.0, 200.0}) {
        for (double p : {0.001, 0.025, 0.3, 0.5, 0.8, 0.999}) {
            CHECK(std::fabs(t_cdf(t_quantile(p, df), df) - p) < 1e-10);
        }
    }
}

TEST_CASE("cdfs are monotone and quantiles invert them on (0.001, 0.999)") {
    double prev_n = 0, prev_c = 0, prev_t = 0, prev_b = 0;
    for (int i = 0; i <= 400; ++i) {
        const double x = -8 + 0.04 * i;
        const double n = norm_cdf(x), c = chi2_cdf(std::fabs(x) * 3, 3), t = t_cdf(x, 4),
                     b = beta_cdf(i / 400.0, 2.2, 0.7);
        CHECK(n >= prev_n);
        CHECK(t >= prev_t);
        if (x >= 0) CHECK(c >= prev_c);
        CHECK(b >= prev_b);
        prev_n = n;
        prev_c = x >= 0 ? c : 0;
        prev_t = t;
        prev_b = b;
    }
    for (int i = 1; i < 999; i += 7) {
        const double p = i / 1000.0;
        CHECK(std::fabs(norm_cdf(norm_quantile(p)) - p) < 1e-8);
        for (double df : {1.0, 2.0, 5.0, 30.0}) {
            CHECK(std::fabs(chi2_cdf(chi2_quantile(p, df), df) - p) < 1e-8);
        }
        CHECK(std::fabs(t_cdf(t_quantile(p, 7.0), 7.0) - p) < 1e-8);
    }
}

// ---------------------------------------------------------------------------
// root finding and optimisation

TEST_CASE("find_root") {
    CHECK(find_root([](double x) { return x - 1; }, {0, 2}) == doctest::Approx(1.0).epsilon(1e-12));
    const auto f = [](double x) { return x * x - 2; };
    CHECK(std::fabs(find_root(f, {0, 2}) - bisect(f, 0, 2)) < 1e-10);
    CHECK_THROWS_AS(find_root([](double x) { return x + 3; }, {0, 1}), BracketError);
}

TEST_CASE("scan_sign_changes finds every crossing") {
    const auto roots = scan_sign_changes([](double x) { return std::sin(x); }, {0.5, 10.0}, 100);
    REQUIRE(roots.size() == 3);
    CHECK(roots[0].contains(M_PI));
    CHECK(roots[2].contains(3 * M_PI));
}

TEST_CASE("minimize_scalar") {
    auto r = minimize_scalar([](double x) { return (x - 3) * (x - 3); }, {0, 10});
    CHECK(std::fabs(r.x - 3) < 1e-6);
    CHECK(std::fabs(r.value) < 1e-12);
    r = minimize_scalar([](double x) { return x - std::log(x); }, {0.1, 10});
    CHECK(std::fabs(r.x - 1) < 1e-6);
    CHECK(std::fabs(r.value - 1) < 1e-12);
    // Boundary minimum.
    r = minimize_scalar([](double x) { return x; }, {2, 5});
    CHECK(r.x == 2.0);
    CHECK_THROWS_AS(minimize_scalar([](double x) { return x > 4 ? NAN : x * x; }, {-1, 10}),
                    NumericalError);
    // +inf marks infeasible points and is allowed.
    r = minimize_scalar([](double x) { return x < 1 ? INFINITY : (x - 2) * (x - 2); }, {0, 5});
    CHECK(std::fabs(r.x - 2) < 1e-6);
}

TEST_CASE("minimize_multivariate") {
    const auto f = [](const std::vector<double>& v) { return v[0] * v[0] + 2 * v[1] * v[1]; };
    const auto r = minimize_multivariate(f, {5, 5});
    CHECK(std::fabs(r.x[0]) < 1e-3);
    CHECK(std::fabs(r.x[1]) < 1e-3);
    CHECK(std::fabs(r.value) < 1e-6);
    CHECK(r.value <= f({5, 5}));
    // Rosenbrock: the minimum at (1, 1).
    const auto rosen = [](const std::vector<double>& v) {
        return 100 * std::pow(v[1] - v[0] * v[0], 2) + std::pow(1 - v[0], 2);
    };
    NelderMeadOptions opt;
    opt.tol = 1e-10;
    opt.max_iter = 5000;
    const auto rr = minimize_multivariate(rosen, {-1.2, 1.0}, opt);
    CHECK(std::fabs(rr.x[0] - 1) < 1e-4);
    CHECK(std::fabs(rr.x[1] - 1) < 1e-4);
}

// ---------------------------------------------------------------------------
// quadrature

TEST_CASE("Gauss-Hermite rule integrates polynomials exactly") {
    const auto& rule = gauss_hermite_rule(12);
    double m0 = 0, m2 = 0, m4 = 0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double w = std::exp(rule.log_weights[i]), x = rule.nodes[i];
        m0 += w;
        m2 += w * x * x;
        m4 += w * x * x * x * x;
    }
    CHECK(std::fabs(m0 - std::sqrt(M_PI)) < 1e-13);
    CHECK(std::fabs(m2 - std::sqrt(M_PI) / 2) < 1e-13);
    CHECK(std::fabs(m4 - 3 * std::sqrt(M_PI) / 4) < 1e-12);
}

TEST_CASE("integrate_gauss_hermite normalisation") {
    const auto std_normal = [](double u) { return norm_log_pdf(u); };
    CHECK(std::fabs(integrate_gauss_hermite(std_normal, 0, 1)) < 1e-8);
    const auto n32 = [](double u) { return norm_log_pdf((u - 3) / 2) - std::log(2.0); };
    GaussHermiteOptions opt;
    opt.nodes = 20;
    CHECK(std::fabs(integrate_gauss_hermite(n32, 3, 2, opt)) < 1e-12);
}

TEST_CASE("indicator integrands are rejected") {
    const auto indicator = [](double u) {
        return std::fabs(u) <= 1 ? 0.0 : -std::numeric_limits<double>::infinity();
    };
    CHECK_THROWS_AS(integrate_gauss_hermite(indicator, 0, 1), QuadratureError);
    // A steep logistic smoothing of the same indicator stays finite but is
    // caught by the node-doubling check.
    const auto smooth = [](double u) { return -std::log1p(std::exp(40 * (std::fabs(u) - 1))); };
    GaussHermiteOptions opt;
    opt.verify = true;
    CHECK_THROWS_AS(integrate_gauss_hermite(smooth, 0, 1, opt), QuadratureError);
}

TEST_CASE("laplace_log_integral") {
    const auto std_normal = [](double u) { return norm_log_pdf(u); };
    CHECK(std::fabs(laplace_log_integral(std_normal, 0.7)) < 1e-8);
    // Gamma(5, 1) density: mode 4, ℓ'' = -4/16. Stirling-type error of the
    // Laplace approximation is about -0.0208.
    const auto g5 = [](double u) { return gamma_log_pdf(u, 5.0, 1.0); };
    const double oracle = 4 * std::log(4.0) - 4 - std::log(24.0) + 0.5 * std::log(2 * M_PI) -
                          0.5 * std::log(0.25);
    const double got = laplace_log_integral(g5, 2.0);
    CHECK(std::fabs(got - oracle) < 1e-4);
    CHECK(std::fabs(got - (-0.02079)) < 1e-4);
    CHECK_THROWS_AS(laplace_log_integral([](double u) { return u; }, 0.0), FlatModeError);
}

TEST_CASE("Gauss-Hermite and Laplace agree on Gaussian integrands") {
    for (double m : {-2.0, 0.0, 1.5}) {
        for (double s : {0.1, 1.0, 4.0}) {
            const auto f = [=](double u) { return -0.5 * (u - m) * (u - m) / (s * s) + 0.3; };
            const double gh = integrate_adaptive(f, 0.0, 1.0).log_integral;
            const double lp = laplace_log_integral(f, 0.0);
            CHECK(std::fabs(gh - lp) < 1e-8);
            CHECK(std::fabs(gh - (0.3 + std::log(s * std::sqrt(2 * M_PI)))) < 1e-8);
        }
    }
}

TEST_CASE("adaptive quadrature of a skewed integrand") {
    // ∫ u^4 e^{-u} du over u > 0 is 24.
    const auto g = [](double u) {
        return u <= 0 ? -std::numeric_limits<double>::infinity() : 4 * std::log(u) - u;
    };
    AdaptiveQuadratureOptions opt;
    opt.allow_zero_integrand = true;
    opt.nodes = 60;
    const auto r = integrate_adaptive(g, 1.0, 1.0, opt);
    CHECK(std::fabs(r.log_integral - std::log(24.0)) < 2e-3);
    CHECK(std::fabs(r.mode - 4.0) < 1e-4);
    CHECK_FALSE(r.used_laplace);
    opt.max_evaluations = 10;
    CHECK(integrate_adaptive(g, 1.0, 1.0, opt).used_laplace);
}

// ---------------------------------------------------------------------------
// random numbers

TEST_CASE("Philox known-answer vector") {
    // Random123 KAT: counter and key all zero.
    Generator g(RngStream{0, 0});
    CHECK(g.next_u32() == 0x6627e8d5u);
    CHECK(g.next_u32() == 0xe169c58du);
    CHECK(g.next_u32() == 0xbc57ac4cu);
    CHECK(g.next_u32() == 0x9b00dbd8u);
}

TEST_CASE("streams are reproducible and distinct") {
    const RngStream s{42, 7};
    Generator a(s), b(s), c(s.child(1));
    bool differs = false;
    for (int i = 0; i < 100; ++i) {
        const double x = a.normal();
        CHECK(x == b.normal());
        differs |= (x != c.normal());
    }
    CHECK(differs);
    CHECK(s.child(3) == s.child(3));
    CHECK_FALSE(s.child(3) == s.child(4));
}

TEST_CASE("variates follow their laws") {
    Generator g(RngStream{2024, 1});
    std::vector<double> u, z, ga, ch;
    for (int i = 0; i < 4000; ++i) {
        u.push_back(g.uniform());
        z.push_back(g.normal());
        ga.push_back(g.gamma(2.5, 2.0));
        ch.push_back(g.chi_squared(3.0));
    }
    CHECK(ks_uniform(u).p_value > 0.01);
    CHECK(ks_test(z, [](double x) { return norm_cdf(x); }).p_value > 0.01);
    CHECK(ks_test(ga, [](double x) { return gamma_cdf(x, 2.5, 2.0); }).p_value > 0.01);
    CHECK(ks_test(ch, [](double x) { return chi2_cdf(x, 3.0); }).p_value > 0.01);
    std::vector<double> small;
    for (int i = 0; i < 4000; ++i) small.push_back(g.gamma(0.4));
    CHECK(ks_test(small, [](double x) { return gamma_cdf(x, 0.4); }).p_value > 0.01);
}

TEST_CASE("binomial sampler matches the exact pmf") {
    Generator g(RngStream{5, 5});
    for (auto [n, p] : {std::pair{10, 0.3}, std::pair{50, 0.005}, std::pair{40, 0.93}}) {
        const int reps = 20000;
        std::vector<int> counts(n + 1, 0);
        for (int i = 0; i < reps; ++i) {
            const auto x = g.binomial(n, p);
            REQUIRE(x >= 0);
            REQUIRE(x <= n);
            ++counts[x];
        }
        // Chi-square goodness of fit over cells with expected count >= 5.
        double stat = 0;
        int cells = 0;
        for (int k = 0; k <= n; ++k) {
            const double e = reps * std::exp(log_choose(n, k) + k * std::log(p) + (n - k) * std::log1p(-p));
            if (e < 5) continue;
            stat += (counts[k] - e) * (counts[k] - e) / e;
            ++cells;
        }
        CHECK(chi2_sf(stat, cells - 1) > 0.001);
    }
}

TEST_CASE("uniform_int covers its range") {
    Generator g(RngStream{1, 2});
    std::vector<int> seen(21, 0);
    for (int i = 0; i < 5000; ++i) ++seen[g.uniform_int(30, 50) - 30];
    for (int c : seen) CHECK(c > 150);
}

TEST_CASE("parallel_for results do not depend on thread count") {
    const RngStream base{99, 0};
    auto run = [&](int threads) {
        std::vector<double> out(64);
        parallel_for(out.size(), threads, [&](std::size_t i) {
            Generator g(base.child(i));
            double s = 0;
            for (int j = 0; j < 100; ++j) s += g.normal();
            out[i] = s;
        });
        return out;
    };
    CHECK(run(1) == run(4));
    CHECK_THROWS_AS(parallel_for(10, 3, [](std::size_t i) {
                        if (i == 7) throw NumericalError("boom");
                    }),
                    NumericalError);
}

TEST_CASE("ks statistics") {
    CHECK(kolmogorov_sf(0.0) == 1.0);
    CHECK(std::fabs(kolmogorov_sf(1.3581) - 0.05) < 1e-3);
    std::vector<double> bad(200);
    for (std::size_t i = 0; i < bad.size(); ++i) bad[i] = 0.5 * (i + 0.5) / bad.size();
    CHECK(ks_uniform(bad).p_value < 1e-6);
    CHECK(median({3, 1, 2}) == 2.0);
    CHECK(median({4, 1, 2, 3}) == 2.5);
}
