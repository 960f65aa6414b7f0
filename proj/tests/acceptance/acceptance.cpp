// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit when any
// criterion fails. Every criterion also has a wall-clock budget.

#include "ccfuse/bench/benchmark.hpp"
#include "ccfuse/bench/gamma.hpp"
#include "ccfuse/bench/neyman_scott.hpp"
#include "ccfuse/cd/constructors.hpp"
#include "ccfuse/cd/convert.hpp"
#include "ccfuse/cd/summary.hpp"
#include "ccfuse/fuse/fixed.hpp"
#include "ccfuse/fuse/random.hpp"
#include "ccfuse/meta/normal_re.hpp"
#include "ccfuse/meta/tables.hpp"
#include "ccfuse/numerics/rng.hpp"
#include "ccfuse/numerics/special.hpp"
#include "ccfuse/numerics/stats_tests.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <string>
#include <vector>

using namespace ccfuse;
using namespace ccfuse::bench;
using namespace ccfuse::numerics;

namespace {

const std::string kData = CCFUSE_DATA_DIR;

std::string fmt(const char* f, double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

class Criterion {
public:
    Criterion(int id, std::string title, double budget_s)
        : id_(id), title_(std::move(title)), budget_(budget_s), start_(std::chrono::steady_clock::now()) {}

    void require(bool ok, const std::string& what) {
        ok_ = ok_ && ok;
        items_.push_back(std::string(ok ? "" : "!") + what);
    }
    // name=value in [lo, hi]
    void within(const std::string& name, double v, double lo, double hi) {
        require(v >= lo && v <= hi, name + "=" + fmt("%.4g", v) + " in [" + fmt("%.4g", lo) + "," + fmt("%.4g", hi) + "]");
    }
    void near(const std::string& name, double v, double target, double tol) {
        require(std::abs(v - target) <= tol,
                name + "=" + fmt("%.4g", v) + " vs " + fmt("%.4g", target) + "±" + fmt("%.3g", tol));
    }

    bool finish() {
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        require(secs < budget_, "runtime=" + fmt("%.1f", secs) + "s<" + fmt("%.0f", budget_) + "s");
        std::string line = std::string(ok_ ? "PASS" : "FAIL") + " " + std::to_string(id_) + " " + title_ + ":";
        for (const auto& it : items_) line += " " + it + ";";
        std::printf("%s\n", line.c_str());
        std::fflush(stdout);
        return ok_;
    }

private:
    int id_;
    std::string title_;
    double budget_;
    std::chrono::steady_clock::time_point start_;
    bool ok_ = true;
    std::vector<std::string> items_;
};

bool run_criterion(int id, const std::string& title, double budget_s, const std::function<void(Criterion&)>& body) {
    Criterion c(id, title, budget_s);
    try {
        body(c);
    } catch (const std::exception& e) {
        c.require(false, std::string("exception: ") + e.what());
    }
    return c.finish();
}

double width95(const FusionResult& r) {
    const auto& iv = r.interval(0.95).intervals;
    return iv.back().hi - iv.front().lo;
}

// ---------------------------------------------------------------------------
// 1

void whales(Criterion& c) {
    const auto w95 = cd_from_interval(9810, 3439, 21457, 0.95);
    const auto w01 = cd_from_interval(11319, 6651, 21214, 0.95);
    c.near("a_1995", w95.a, 0.321, 0.005);
    c.near("s_1995", w95.s, 2.798, 0.005);
    c.near("a_2001", w01.a, 0.019, 0.005);
    c.near("s_2001", w01.s, 0.007, 0.002);

    const std::vector<ConfidenceLogLik> lls = {chi2_convert(cc_from_cd(w95.cd)), chi2_convert(cc_from_cd(w01.cd))};
    const auto r = fuse_fixed(lls, FocusMap::expression("(p2-p1)/(6*p1)", 2), ParamGrid::linspace(-0.4, 1.5, 381));
    c.near("rho_hat", r.estimate, 0.026, 0.003);
    const auto& iv = r.interval(0.95).intervals;
    c.require(iv.size() == 1, "one 95% piece");
    c.near("rho_lo", iv.front().lo, -0.094, 0.01);
    c.near("rho_hi", iv.back().hi, 0.454, 0.01);

    const double prior_sd = 0.12;
    const auto prior = chi2_convert(cc_from_cd(normal_cd({0.07, prior_sd, {}}, ParamGrid::linspace(-0.8, 0.94, 697))));
    const auto rp = add_prior(r, prior);
    const double w = width95(rp);
    c.require(w < width95(r) && w < 2 * norm_quantile(0.975) * prior_sd,
              "prior width=" + fmt("%.4f", w) + " < data " + fmt("%.4f", width95(r)) + " and prior " +
                  fmt("%.4f", 2 * norm_quantile(0.975) * prior_sd));
}

// ---------------------------------------------------------------------------
// 2

void skulls(Criterion& c) {
    const auto in = NormalREInput::read_csv(kData + "/skulls.csv");
    const auto psi = profile_psi0(in, true);
    c.near("psi0_hat", psi.estimate, 1.980, 0.01);
    const auto& iv = psi.interval(0.90).intervals;
    c.near("psi0_lo90", iv.front().lo, 1.662, 0.015);
    c.near("psi0_hi90", iv.back().hi, 2.480, 0.015);

    const auto grid = default_tau_grid(in);
    const ExactTauOptions opts{10000, {0x5C011, 0}, 0};
    const auto cml = exact_cc_tau(in, TauVariant::cml, grid, opts);
    const auto ml = exact_cc_tau(in, TauVariant::ml, grid, opts);
    const auto s_cml = summarize(cml, 0.90);
    c.near("tau_corrected", s_cml.point_estimate, 0.272, 0.03);
    c.near("tau_direct", summarize(ml, 0.90).point_estimate, 0.006, 0.03);
    c.near("tau_qk", qk_tau_quantile(in, 0.5), 0.390, 0.005);
    c.near("C(0)", cml.boundary_mass_at_lo, 0.123, 0.02);
    c.near("tau_hi90", s_cml.intervals.back().hi, 1.085, 0.03);
    c.require(s_cml.intervals.front().lo == 0.0, "tau_lo90=0");
}

// ---------------------------------------------------------------------------
// 3

void neyman_scott_criterion(Criterion& c) {
    const auto fixture = read_neyman_scott_csv(kData + "/neyman_scott_k20.csv");
    c.require(fixture.size() == 20, "fixture k=20");
    const double d20 = sup_distance(neyman_scott(fixture, NeymanScottVariant::corrected),
                                    neyman_scott(fixture, NeymanScottVariant::gold));
    c.within("sup_k20", d20, 0.0, 0.05);

    const double sigma = 2.0;
    Generator big({0x55, 5000});
    const auto d5000 = neyman_scott_sample(5000, sigma, -3, 3, big);
    const double est = neyman_scott_estimate(d5000, NeymanScottVariant::standard);
    c.near("standard_k5000/(sigma/sqrt2)", est / (sigma / std::sqrt(2.0)), 1.0, 0.02);

    Generator g50({0x55, 50});
    const auto d50 = neyman_scott_sample(50, sigma, -3, 3, g50);
    const double s50 = sup_distance(neyman_scott(d50, NeymanScottVariant::corrected),
                                    neyman_scott(d50, NeymanScottVariant::gold));
    c.within("sup_k50", s50, 0.0, 0.02);
}

// ---------------------------------------------------------------------------
// 4

std::vector<GammaSource> draw_gamma(const std::vector<double>& shapes, double theta, Generator& g) {
    std::vector<GammaSource> s;
    for (double a : shapes) s.push_back({a, g.gamma(a, theta)});
    return s;
}

void gamma_proto(Criterion& c) {
    const std::vector<double> shapes = {0.5, 0.8, 1.0, 1.2, 1.5, 0.6, 0.9, 1.1, 1.4, 2.0};
    double a_dot = 0.0;
    for (double a : shapes) a_dot += a;

    // validity of the fused CD
    Generator g({0x6A, 1});
    std::vector<double> u;
    for (int r = 0; r < 1000; ++r) u.push_back(std::abs(1.0 - 2.0 * gamma_fused_cdf(draw_gamma(shapes, 1.3, g), 1.3)));
    c.within("ks_p_fused", ks_uniform(u).p_value, 0.01, 1.0);

    // χ²₁ against the simulated deviance law
    double worst = 0.0;
    for (double ad : {6.0, 10.0, 25.0}) {
        const GammaDevianceLaw law(ad, 200000, {0x6A, static_cast<std::uint64_t>(ad)});
        for (double d = 0.0; d <= 15.0; d += 0.005) worst = std::max(worst, std::abs(law.cdf(d) - chi2_cdf(d, 1.0)));
    }
    c.within("sup_chi2(a>=6)", worst, 0.0, 0.02);

    // risk
    const auto r0 = gamma_r0(a_dot, 400000, {0x6A, 3});
    for (double theta : {0.5, 1.0, 2.0}) {
        const std::string t = fmt("%.1f", theta);
        const auto opt = gamma_risk(GammaMethod::optimal, shapes, theta, 20000, {0x6B, 0});
        const auto sxs = gamma_risk(GammaMethod::sxs, shapes, theta, 20000, {0x6B, 1});
        const auto den = gamma_risk(GammaMethod::density, shapes, theta, 20000, {0x6B, 2});
        const double se = std::hypot(opt.se, r0.se * theta);
        c.near("risk_opt(" + t + ")", opt.risk, r0.risk * theta, 2 * se);
        c.require(opt.risk <= sxs.risk, "opt<=sxs(" + t + ") " + fmt("%.4f", opt.risk) + "<=" + fmt("%.4f", sxs.risk));
        c.require(opt.risk <= den.risk,
                  "opt<=density(" + t + ") " + fmt("%.4f", opt.risk) + "<=" + fmt("%.4f", den.risk));
    }

    // θ̃/θ̂ = (a·−k)/a·
    double dev = 0.0;
    for (int r = 0; r < 200; ++r) {
        const auto src = draw_gamma(shapes, 0.7, g);
        const double ratio = gamma_density_estimator(src).value / gamma_ml(src);
        dev = std::max(dev, std::abs(ratio - (a_dot - static_cast<double>(shapes.size())) / a_dot));
    }
    c.within("identity_dev", dev, 0.0, 1e-12);
}

// ---------------------------------------------------------------------------
// 5, 6, 7

BenchmarkReport bench_file(const std::string& name, bool keep = false) {
    BenchOptions o;
    o.keep_replications = keep;
    return run_benchmark(Scenario::load(kData + "/scenarios/" + name), {}, o);
}

void basic_re(Criterion& c) {
    const double tol = 0.015;
    for (const char* f : {"basic_re_small.json", "basic_re_small_k20.json"}) {
        const auto r = bench_file(f);
        const std::string k = "k" + std::to_string(r.scenario.k);
        for (const auto& m : r.reports) c.within(m.method + "_" + k, m.coverage, 0.93 - tol, 0.98 + tol);
    }
    const auto big = bench_file("basic_re_large.json");
    const double corr = big.method("corrected").coverage;
    c.within("corrected_tau.44", corr, 0.92 - tol, 0.97 + tol);
    c.require(corr > big.method("standard").coverage && corr > big.method("sxs").coverage,
              "corrected " + fmt("%.4f", corr) + " > standard " + fmt("%.4f", big.method("standard").coverage) +
                  ", sxs " + fmt("%.4f", big.method("sxs").coverage));
    c.within("hksj_tau.44", big.method("hksj").coverage, 0.94 - tol, 0.965 + tol);
}

void fixed_2x2(Criterion& c) {
    const auto r = bench_file("fixed_2x2_or_k50.json");
    const double st = r.method("standard").coverage, ex = r.method("exact").coverage;
    c.within("standard", st, 0.93, 0.965);
    c.within("exact", ex, 0.93, 0.965);
    c.within("|standard-exact|", std::abs(st - ex), 0.0, 0.02);
    c.within("mh_width/standard_width", r.method("mh").median_width / r.method("standard").median_width, 0.85, 1.15);

    const auto k5 = bench_file("fixed_2x2_or_k5.json");
    c.within("fair_drop_k5", static_cast<double>(k5.dropped_rounds) / static_cast<double>(k5.scenario.reps), 0.05,
             0.09);
}

void random_2x2(Criterion& c) {
    const auto r = bench_file("random_2x2_k20.json", true);
    const double corr = r.method("corrected").coverage, plain = r.method("standard").coverage;
    c.within("corrected", corr, 0.93, 0.97);
    c.require(corr > plain, "corrected " + fmt("%.4f", corr) + " > standard " + fmt("%.4f", plain));

    const auto is = static_cast<std::size_t>(std::find(r.methods.begin(), r.methods.end(), "standard") - r.methods.begin());
    const auto ic = static_cast<std::size_t>(std::find(r.methods.begin(), r.methods.end(), "corrected") - r.methods.begin());
    std::size_t both = 0, good = 0;
    for (const auto& rep : r.replications) {
        const auto& s = rep[is];
        const auto& k = rep[ic];
        if (s.status != Outcome::Status::ok || k.status != Outcome::Status::ok) continue;
        ++both;
        double step = 0.0;
        for (const auto& [key, v] : k.extras) {
            if (key == "grid_step") step = v;
        }
        const bool widens = k.width >= s.width - 1e-9;
        const bool still = std::abs(k.estimate - s.estimate) <= step + 1e-12;
        good += widens && still ? 1 : 0;
    }
    c.require(both > 0, "paired successes=" + std::to_string(both));
    c.within("widen_and_argmax_within_step", both ? static_cast<double>(good) / static_cast<double>(both) : 0.0, 0.95,
             1.0);
}

// ---------------------------------------------------------------------------
// 8

double median_enumeration(int n, int r) {
    long hits = 0;
    for (long mask = 0; mask < (1L << n); ++mask) hits += __builtin_popcountl(static_cast<unsigned long>(mask)) <= r - 1;
    return static_cast<double>(hits) / static_cast<double>(1L << n);
}

// P(Y1 = y | Y0 + Y1 = z) by summing Bernoulli outcome sequences.
std::vector<double> conditional_enumeration(long m0, long m1, long z, double psi) {
    const double p0 = 0.35, p1 = 1.0 / (1.0 + (1.0 - p0) / p0 * std::exp(-psi));
    std::vector<double> joint(static_cast<std::size_t>(m1 + 1), 0.0);
    const long n = m0 + m1;
    for (unsigned long mask = 0; mask < (1UL << n); ++mask) {
        long y0 = 0, y1 = 0;
        double p = 1.0;
        for (long i = 0; i < n; ++i) {
            const bool ev = (mask >> i) & 1UL;
            const double q = i < m0 ? p0 : p1;
            p *= ev ? q : 1.0 - q;
            if (ev) (i < m0 ? y0 : y1) += 1;
        }
        if (y0 + y1 == z) joint[static_cast<std::size_t>(y1)] += p;
    }
    double s = 0.0;
    for (double v : joint) s += v;
    for (double& v : joint) v /= s;
    return joint;
}

ConfidenceLogLik quadratic_ll(double y, double sd) {
    const auto g = ParamGrid::linspace(y - 8 * sd, y + 8 * sd, 161);
    std::vector<double> v;
    for (double x : g.values()) v.push_back(-0.5 * (x - y) * (x - y) / (sd * sd));
    return {g, v};
}

std::vector<double> least_squares_quadratic(const std::vector<double>& x, const std::vector<double>& y) {
    double a[3][4] = {};
    for (std::size_t j = 0; j < x.size(); ++j) {
        const double f[3] = {1.0, x[j], x[j] * x[j]};
        for (int r = 0; r < 3; ++r) {
            for (int q = 0; q < 3; ++q) a[r][q] += f[r] * f[q];
            a[r][3] += f[r] * y[j];
        }
    }
    for (int p = 0; p < 3; ++p) {
        for (int r = p + 1; r < 3; ++r) {
            const double f = a[r][p] / a[p][p];
            for (int q = p; q < 4; ++q) a[r][q] -= f * a[p][q];
        }
    }
    std::vector<double> b(3);
    for (int r = 2; r >= 0; --r) {
        double s = a[r][3];
        for (int q = r + 1; q < 3; ++q) s -= a[r][q] * b[static_cast<std::size_t>(q)];
        b[static_cast<std::size_t>(r)] = s / a[r][r];
    }
    return b;
}

void properties(Criterion& c) {
    // (a) cc at the truth is uniform, R = 2000 per constructor
    {
        const int reps = 2000;
        Generator g({0x8A, 0});
        std::vector<double> u_norm, u_t, u_med, u_gamma, u_fused, u_qk, u_gold;
        const double truth = 1.5;
        const NormalREInput re_base({0, 0, 0, 0, 0, 0}, {0.2, 0.5, 0.3, 0.8, 0.4, 0.6});
        const double tau = 0.45;
        const ParamGrid tau_grid({0.0, tau, 2.0});
        const std::vector<double> shapes = {0.6, 1.4, 2.5};
        for (int r = 0; r < reps; ++r) {
            const double est = g.normal(truth, 0.7);
            u_norm.push_back(cc_from_cd(normal_cd({est, 0.7, {}})).at(truth));

            std::vector<double> xs;
            for (int i = 0; i < 6; ++i) xs.push_back(g.normal(truth, 2.0));
            u_t.push_back(cc_from_cd(t_cd({mean(xs), std::sqrt(variance(xs) / 6.0), 5})).at(truth));

            std::vector<double> us;
            for (int i = 0; i < 51; ++i) us.push_back(g.uniform());
            u_med.push_back(median_cd(us).at(0.5));

            const double y = g.gamma(1.7, 0.8);
            u_gamma.push_back(cc_from_cd(gamma_cd(1.7, y, ParamGrid::merged(ParamGrid::linspace(0.01, 40.0, 400).values(), {0.8}))).at(0.8));
            u_fused.push_back(std::abs(1.0 - 2.0 * gamma_fused_cdf(draw_gamma(shapes, 0.8, g), 0.8)));

            NormalREInput in = re_base;
            for (std::size_t j = 0; j < in.k(); ++j) in.y[j] = g.normal(1.0, std::hypot(in.sigma[j], tau));
            u_qk.push_back(cc_from_cd(qk_cd_tau(in, tau_grid)).at(tau));

            const auto ns = neyman_scott_sample(8, 1.3, -2, 2, g);
            const auto gold = neyman_scott(ns, NeymanScottVariant::gold,
                                           ParamGrid::merged(ParamGrid::linspace(0.1, 10.0, 100).values(), {1.3}));
            u_gold.push_back(gold.at(1.3));
        }
        const std::vector<std::pair<const char*, std::vector<double>*>> all = {
            {"normal", &u_norm}, {"t", &u_t},       {"median", &u_med},           {"gamma", &u_gamma},
            {"gamma_fused", &u_fused}, {"qk_tau", &u_qk}, {"neyman_scott_gold", &u_gold}};
        for (const auto& [name, v] : all) c.within(std::string("a_ks_p_") + name, ks_uniform(*v).p_value, 0.01, 1.0);
    }

    // (b) chi2_convert ∘ cc_from_deviance = −D/2
    {
        const auto grid = ParamGrid::linspace(-3, 3, 241);
        std::vector<double> d;
        for (double x : grid.values()) d.push_back(3.0 * x * x + 0.5 * std::sin(x) * x);
        const auto ll = chi2_convert(cc_from_deviance({grid, d}));
        double worst = 0.0;
        for (std::size_t i = 0; i < d.size(); ++i) worst = std::max(worst, std::abs(ll.values[i] + 0.5 * d[i]));
        c.within("b_roundtrip", worst, 0.0, 1e-9);
    }

    // (c) fuse_random at τ = 0 is the fixed-effect sum
    {
        const std::vector<double> y = {2.652, 2.117, 1.564, 2.914, 1.764}, s = {0.561, 0.444, 0.331, 0.620, 0.373};
        std::vector<ConfidenceLogLik> lls;
        for (std::size_t j = 0; j < y.size(); ++j) lls.push_back(quadratic_ll(y[j], s[j]));
        const auto f = RandomFusion::from_logliks(lls);
        const auto grid = ParamGrid::linspace(1.0, 3.0, 41);
        const auto fixed = fuse_fixed(lls, FocusMap::common_parameter(lls.size()), grid);
        double worst = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double raw = f.loglik(grid[i], 0.0);
            worst = std::max(worst, std::abs((raw - fixed.max_loglik) - fixed.profile.at(grid[i])));
        }
        c.within("c_random_tau0_vs_fixed", worst, 0.0, 1e-6);
    }

    // (d) median CD vs order-statistic enumeration
    {
        double worst = 0.0;
        for (int n = 2; n <= 8; ++n) {
            std::vector<double> sample;
            for (int i = 0; i < n; ++i) sample.push_back(std::cos(2.3 * i) * 5.0 + 0.1 * i);
            const auto cd = median_cd_distribution(sample);
            std::sort(sample.begin(), sample.end());
            for (int r = 1; r <= n; ++r) {
                worst = std::max(worst, std::abs(cd.at(sample[static_cast<std::size_t>(r - 1)]) - median_enumeration(n, r)));
            }
        }
        c.within("d_median_enum", worst, 0.0, 1e-12);
    }

    // (e) eccentric hypergeometric vs enumeration
    {
        Generator g({0x8E, 0});
        double worst = 0.0;
        for (int rep = 0; rep < 40; ++rep) {
            const long m0 = g.uniform_int(1, 7), m1 = g.uniform_int(1, 7);
            const long z = g.uniform_int(0, m0 + m1);
            const double psi = g.uniform(-3, 3);
            const auto oracle = conditional_enumeration(m0, m1, z, psi);
            for (long y = 0; y <= m1; ++y) {
                worst = std::max(worst, std::abs(nchg_pmf(y, psi, m0, m1, z) - oracle[static_cast<std::size_t>(y)]));
            }
        }
        c.within("e_nchg_enum", worst, 0.0, 1e-12);
    }

    // (f) parabola vertex: 90% coverage over 500 synthetic data sets
    {
        std::vector<double> x;
        for (int j = 0; j < 10; ++j) x.push_back(4.0 * j);
        Generator g({0x8F, 0});
        int covered = 0;
        const int reps = 500;
        for (int rep = 0; rep < reps; ++rep) {
            std::vector<double> y;
            std::vector<ConfidenceLogLik> lls;
            for (double xj : x) {
                y.push_back(1 + 0.4 * xj - 0.01 * xj * xj + g.normal());
                lls.push_back(quadratic_ll(y.back(), 1.0));
            }
            const auto m = parabola_vertex_model(x, least_squares_quadratic(x, y), {{-20, 20}, {-5, 5}, {-1, 1}});
            const auto r = fuse_linked(lls, m, ParamGrid::linspace(5, 40, 141));
            covered += r.cc.at(20.0) <= 0.90 ? 1 : 0;
        }
        c.within("f_parabola_cov90", static_cast<double>(covered) / reps, 0.88, 1.0);
    }
}

}  // namespace

int main() {
    int passed = 0, total = 0;
    const auto tally = [&](bool ok) {
        ++total;
        passed += ok ? 1 : 0;
    };
    tally(run_criterion(1, "whales", 10, whales));
    tally(run_criterion(2, "skulls", 300, skulls));
    tally(run_criterion(3, "neyman-scott", 30, neyman_scott_criterion));
    tally(run_criterion(4, "gamma prototype", 120, gamma_proto));
    tally(run_criterion(5, "basic random-effects coverage", 600, basic_re));
    tally(run_criterion(6, "fixed-effect 2x2 coverage", 900, fixed_2x2));
    tally(run_criterion(7, "random-effect 2x2", 1800, random_2x2));
    tally(run_criterion(8, "property suites", 600, properties));
    std::printf("%d/%d criteria passed\n", passed, total);
    return passed == total ? 0 : 1;
}
