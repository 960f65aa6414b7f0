#include "ccfuse/meta/normal_re.hpp"

#include "ccfuse/cd/io.hpp"
#include "ccfuse/error.hpp"
#include "ccfuse/numerics/optimize.hpp"
#include "ccfuse/numerics/parallel.hpp"
#include "ccfuse/numerics/special.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace ccfuse {

using namespace numerics;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Minimum of f on [0, hi]: a scan that resolves both the region near 0
// and the bulk, then Brent between the neighbours of the best scan point.
// The profiles depend on τ², so the Brent step works in τ²; at the border
// f has a nonzero slope in τ² and the search ends next to 0, which is then
// taken exactly.
ScalarMinimum minimize_tau(const ScalarFn& f, double hi) {
    std::vector<double> pts = {0.0};
    for (int m = 12; m >= 1; --m) pts.push_back(hi * std::ldexp(1.0, -m));
    for (int i = 1; i <= 8; ++i) pts.push_back(hi * i / 8.0);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    std::size_t best = 0;
    std::vector<double> v(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        v[i] = f(pts[i]);
        if (v[i] < v[best]) best = i;
    }
    const double lo_b = pts[best == 0 ? 0 : best - 1];
    const double hi_b = pts[std::min(best + 1, pts.size() - 1)];
    const auto g = [&](double s) { return f(std::sqrt(s)); };
    auto m = minimize_scalar(g, {lo_b * lo_b, hi_b * hi_b}, 1e-12 * (1.0 + hi_b * hi_b));
    m.x = std::sqrt(m.x);
    m.evaluations += static_cast<int>(pts.size());
    if (best == 0 && v[0] <= m.value) return {0.0, v[0], m.evaluations};
    if (m.value > v[best]) return {pts[best], v[best], m.evaluations};
    return m;
}

// A_k for raw arrays; used in the simulation loop.
double a_k_raw(const double* y, const double* s2, std::size_t k, double tau) {
    const double t2 = tau * tau;
    double sw = 0.0, swy = 0.0, slog = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
        const double v = s2[j] + t2;
        sw += 1.0 / v;
        swy += y[j] / v;
        slog += std::log(v);
    }
    const double m = swy / sw;
    double q = 0.0;
    for (std::size_t j = 0; j < k; ++j) q += (y[j] - m) * (y[j] - m) / (s2[j] + t2);
    return slog + q;
}

double b_k_raw(const double* y, const double* s2, std::size_t k, double tau) {
    double sw = 0.0;
    for (std::size_t j = 0; j < k; ++j) sw += 1.0 / (s2[j] + tau * tau);
    return a_k_raw(y, s2, k, tau) + std::log(sw);
}

double deviance_raw(const double* y, const double* s2, std::size_t k, TauVariant variant, double tau,
                    double tau_max) {
    const auto f = [&](double t) {
        return variant == TauVariant::ml ? a_k_raw(y, s2, k, t) : b_k_raw(y, s2, k, t);
    };
    const auto m = minimize_tau(f, tau_max);
    return std::max(0.0, f(tau) - m.value);
}

}  // namespace

// ---------------------------------------------------------------------------
// input

NormalREInput::NormalREInput(std::vector<double> y_, std::vector<double> sigma_)
    : y(std::move(y_)), sigma(std::move(sigma_)) {
    if (y.size() != sigma.size()) throw InvalidArgument("NormalREInput: estimate and stddev counts differ");
}

NormalREInput::NormalREInput(const std::vector<StudySummary>& studies) {
    for (const auto& s : studies) {
        s.validate();
        y.push_back(s.estimate);
        sigma.push_back(s.stddev);
    }
}

NormalREInput NormalREInput::read_csv(const std::string& path) {
    const auto t = ccfuse::read_csv(path, {"estimate", "stddev"}, {"df"});
    NormalREInput in;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const double e = t.rows[r][0], s = t.rows[r][1];
        if (!std::isfinite(e) || !(s > 0.0) || !std::isfinite(s)) {
            std::ostringstream os;
            os << path << ": row " << r + 2 << ": estimate must be finite and stddev positive";
            throw InvalidArgument(os.str());
        }
        in.y.push_back(e);
        in.sigma.push_back(s);
    }
    return in;
}

double NormalREInput::max_sigma() const { return *std::max_element(sigma.begin(), sigma.end()); }

void NormalREInput::validate(std::size_t min_k) const {
    if (y.size() != sigma.size()) throw InvalidArgument("NormalREInput: estimate and stddev counts differ");
    if (y.size() < min_k) {
        std::ostringstream os;
        os << "NormalREInput: need at least " << min_k << " studies, got " << y.size();
        throw InvalidArgument(os.str());
    }
    for (std::size_t j = 0; j < y.size(); ++j) {
        if (!std::isfinite(y[j]) || !(sigma[j] > 0.0) || !std::isfinite(sigma[j])) {
            std::ostringstream os;
            os << "NormalREInput: study " << j + 1 << " needs a finite estimate and positive stddev";
            throw InvalidArgument(os.str());
        }
    }
}

// ---------------------------------------------------------------------------
// ψ0 profile

double loglik_re(const NormalREInput& in, double psi0, double tau) {
    if (!(tau >= 0.0)) throw InvalidArgument("loglik_re: tau must be >= 0");
    double l = 0.0;
    for (std::size_t j = 0; j < in.k(); ++j) {
        const double v = in.sigma[j] * in.sigma[j] + tau * tau;
        l += -0.5 * std::log(v) - 0.5 * (in.y[j] - psi0) * (in.y[j] - psi0) / v;
    }
    return l;
}

double weighted_mean(const NormalREInput& in, double tau) {
    double sw = 0.0, swy = 0.0;
    for (std::size_t j = 0; j < in.k(); ++j) {
        const double w = 1.0 / (in.sigma[j] * in.sigma[j] + tau * tau);
        sw += w;
        swy += w * in.y[j];
    }
    return swy / sw;
}

double default_tau_max(const NormalREInput& in) { return 10.0 * in.max_sigma(); }

double tau_hat_at(const NormalREInput& in, double psi0, double tau_max) {
    return minimize_tau([&](double t) { return -loglik_re(in, psi0, t); }, tau_max).x;
}

double tau2_information(const NormalREInput& in, double psi0, double tau) {
    double j = 0.0;
    for (std::size_t i = 0; i < in.k(); ++i) {
        const double v = in.sigma[i] * in.sigma[i] + tau * tau;
        j += -0.5 / (v * v) + (in.y[i] - psi0) * (in.y[i] - psi0) / (v * v * v);
    }
    return j;
}

bool border_condition(const NormalREInput& in, double psi0) {
    double s = 0.0;
    for (std::size_t j = 0; j < in.k(); ++j) {
        const double s2 = in.sigma[j] * in.sigma[j];
        s += ((in.y[j] - psi0) * (in.y[j] - psi0) / s2 - 1.0) / s2;
    }
    return s <= 0.0;
}

double border_psi0(const NormalREInput& in) {
    double a = 0.0, b = 0.0;
    for (std::size_t j = 0; j < in.k(); ++j) {
        const double w = 1.0 / std::pow(in.sigma[j], 4);
        a += w * in.y[j];
        b += w;
    }
    return a / b;
}

ParamGrid default_psi0_grid(const NormalREInput& in, std::size_t points) {
    in.validate();
    const double t = tau_estimate(in, TauVariant::cml, default_tau_max(in)).tau;
    const double center = weighted_mean(in, t);
    const double wide = std::max(t, in.max_sigma());
    double sw = 0.0;
    for (double s : in.sigma) sw += 1.0 / (s * s + wide * wide);
    const double se = std::sqrt(1.0 / sw);
    return ParamGrid::linspace(center - 8.0 * se, center + 8.0 * se, points);
}

FusionResult profile_psi0(const NormalREInput& in, bool corrected, const std::optional<ParamGrid>& grid,
                          const std::vector<double>& levels) {
    in.validate();
    const ParamGrid g = grid ? *grid : default_psi0_grid(in);
    const double tau_max = default_tau_max(in);
    FusionDiagnostics diag;
    diag.border_rule_triggered = border_condition(in, border_psi0(in));
    const bool apply = corrected && !diag.border_rule_triggered;
    if (corrected && diag.border_rule_triggered) {
        diag.notes.push_back("border condition holds for some psi0; correction set to zero");
    }
    bool skipped_any = false;
    const auto value = [&](double psi0, bool record) {
        const double t = tau_hat_at(in, psi0, tau_max);
        double l = loglik_re(in, psi0, t);
        if (apply) {
            const double j = tau2_information(in, psi0, t);
            if (j > 0.0) {
                l += -0.5 * std::log(j);
            } else if (record) {
                diag.correction_skipped_at.push_back(psi0);
                skipped_any = true;
            }
        }
        return l;
    };
    std::vector<double> raw(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) raw[i] = value(g[i], true);
    if (skipped_any) diag.notes.push_back("tau^2 information not positive at some psi0; correction skipped there");
    diag.correction_applied = apply;
    const ScalarFn exact = [&](double x) { return value(x, false); };
    return finish_profile(g, std::move(raw), &exact, levels, std::move(diag));
}

// ---------------------------------------------------------------------------
// τ profiles

double a_k(const NormalREInput& in, double tau) {
    std::vector<double> s2(in.k());
    for (std::size_t j = 0; j < in.k(); ++j) s2[j] = in.sigma[j] * in.sigma[j];
    return a_k_raw(in.y.data(), s2.data(), in.k(), tau);
}

double b_k(const NormalREInput& in, double tau) {
    std::vector<double> s2(in.k());
    for (std::size_t j = 0; j < in.k(); ++j) s2[j] = in.sigma[j] * in.sigma[j];
    return b_k_raw(in.y.data(), s2.data(), in.k(), tau);
}

TauEstimate tau_estimate(const NormalREInput& in, TauVariant variant, double tau_max) {
    in.validate();
    const auto f = [&](double t) { return variant == TauVariant::ml ? a_k(in, t) : b_k(in, t); };
    const auto m = minimize_tau(f, tau_max);
    return {m.x, m.x < tau_max * (1.0 - 1e-6)};
}

TauProfiles tau_profiles(const NormalREInput& in, const std::optional<ParamGrid>& grid) {
    in.validate();
    const double tau_max = default_tau_max(in);
    TauProfiles p;
    p.tau_ml = tau_estimate(in, TauVariant::ml, tau_max).tau;
    p.tau_cml = tau_estimate(in, TauVariant::cml, tau_max).tau;
    p.tau = grid ? *grid : default_tau_grid(in, 201);
    for (double t : p.tau.values()) {
        p.a.push_back(a_k(in, t));
        p.b.push_back(b_k(in, t));
    }
    return p;
}

ParamGrid default_tau_grid(const NormalREInput& in, std::size_t points) {
    const double t = tau_estimate(in, TauVariant::cml, default_tau_max(in)).tau;
    return ParamGrid::linspace(0.0, std::max(3.0 * t, 2.0 * in.max_sigma()), points);
}

// ---------------------------------------------------------------------------
// exact simulated curves for τ

ConfidenceCurve exact_cc_tau(const NormalREInput& in, TauVariant variant, const ParamGrid& grid,
                             const ExactTauOptions& options) {
    in.validate();
    if (options.sims < 1000) throw InvalidArgument("exact_cc_tau: at least 1000 simulations are required");
    if (grid.front() < 0.0) throw InvalidArgument("exact_cc_tau: tau grid must be non-negative");
    const std::size_t k = in.k();
    std::vector<double> s2(k);
    for (std::size_t j = 0; j < k; ++j) s2[j] = in.sigma[j] * in.sigma[j];
    const double tau_max = std::max(default_tau_max(in), 2.0 * grid.back());

    std::vector<double> cc(grid.size());
    parallel_for(grid.size(), options.threads, [&](std::size_t i) {
        const double tau = grid[i];
        const double d_obs = deviance_raw(in.y.data(), s2.data(), k, variant, tau, tau_max);
        Generator gen(options.rng.child(i));
        std::vector<double> ys(k);
        std::size_t below = 0;
        for (std::size_t r = 0; r < options.sims; ++r) {
            for (std::size_t j = 0; j < k; ++j) ys[j] = gen.normal() * std::sqrt(s2[j] + tau * tau);
            if (deviance_raw(ys.data(), s2.data(), k, variant, tau, tau_max) <= d_obs) ++below;
        }
        cc[i] = static_cast<double>(below) / static_cast<double>(options.sims);
    });
    ConfidenceCurve out(grid, cc);
    if (grid.front() == 0.0) {
        // C(0) read off the curve: left of the median-confidence estimate
        // C = (1 − cc)/2, at the estimate itself C(0) >= ½.
        const std::size_t im = out.argmin();
        out.boundary_mass_at_lo = im == 0 ? 0.5 * (1.0 + cc[0]) : 0.5 * (1.0 - cc[0]);
        out.has_boundary_mass = true;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Q_k

double q_k(const NormalREInput& in, double tau) {
    const double m = weighted_mean(in, tau);
    double q = 0.0;
    for (std::size_t j = 0; j < in.k(); ++j) q += (in.y[j] - m) * (in.y[j] - m) / (in.sigma[j] * in.sigma[j] + tau * tau);
    return q;
}

ConfidenceDistribution qk_cd_tau(const NormalREInput& in, const ParamGrid& grid) {
    in.validate();
    if (grid.front() < 0.0) throw InvalidArgument("qk_cd_tau: tau grid must be non-negative");
    const double df = static_cast<double>(in.k() - 1);
    std::vector<double> c(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) c[i] = chi2_sf(q_k(in, grid[i]), df);
    ConfidenceDistribution cd(grid, c);
    if (grid.front() == 0.0) {
        cd.boundary_mass_at_lo = c[0];
        cd.has_boundary_mass = true;
    }
    return cd;
}

double qk_tau_quantile(const NormalREInput& in, double p) {
    in.validate();
    if (!(p > 0.0 && p < 1.0)) throw InvalidArgument("qk_tau_quantile: p outside (0, 1)");
    const double df = static_cast<double>(in.k() - 1);
    const auto f = [&](double t) { return chi2_sf(q_k(in, t), df) - p; };
    if (f(0.0) >= 0.0) return 0.0;
    double hi = std::max(1e-3, in.max_sigma());
    while (f(hi) < 0.0) {
        hi *= 2.0;
        if (hi > 1e12) throw NumericalError("qk_tau_quantile: no upper bracket");
    }
    return find_root(f, {0.0, hi}, 1e-12);
}

// ---------------------------------------------------------------------------
// baselines

PooledEstimate inverse_variance(const NormalREInput& in) {
    in.validate(1);
    double sw = 0.0, swy = 0.0;
    for (std::size_t j = 0; j < in.k(); ++j) {
        const double w = 1.0 / (in.sigma[j] * in.sigma[j]);
        sw += w;
        swy += w * in.y[j];
    }
    return {swy / sw, 1.0 / sw};
}

double tau2_dersimonian_laird(const NormalREInput& in) {
    in.validate();
    double sw = 0.0, sw2 = 0.0;
    for (double s : in.sigma) {
        const double w = 1.0 / (s * s);
        sw += w;
        sw2 += w * w;
    }
    const double m = inverse_variance(in).estimate;
    double q = 0.0;
    for (std::size_t j = 0; j < in.k(); ++j) q += (in.y[j] - m) * (in.y[j] - m) / (in.sigma[j] * in.sigma[j]);
    return std::max(0.0, (q - static_cast<double>(in.k() - 1)) / (sw - sw2 / sw));
}

HksjResult hksj_interval(const NormalREInput& in, double level, std::optional<double> tau) {
    in.validate();
    if (!(level > 0.0 && level < 1.0)) throw InvalidArgument("hksj_interval: level outside (0, 1)");
    HksjResult r{};
    if (tau) {
        if (!(*tau >= 0.0)) throw InvalidArgument("hksj_interval: tau must be >= 0");
        r.tau = *tau;
    } else {
        const auto est = tau_estimate(in, TauVariant::cml, default_tau_max(in));
        r.used_dl = !est.converged;
        r.tau = r.used_dl ? std::sqrt(tau2_dersimonian_laird(in)) : est.tau;
    }
    double sw = 0.0;
    for (double s : in.sigma) sw += 1.0 / (s * s + r.tau * r.tau);
    r.estimate = weighted_mean(in, r.tau);
    double num = 0.0;
    for (std::size_t j = 0; j < in.k(); ++j) {
        num += (in.y[j] - r.estimate) * (in.y[j] - r.estimate) / (in.sigma[j] * in.sigma[j] + r.tau * r.tau);
    }
    r.variance = num / (static_cast<double>(in.k() - 1) * sw);
    const double half = t_quantile(0.5 + 0.5 * level, static_cast<double>(in.k() - 1)) * std::sqrt(r.variance);
    r.lo = r.estimate - half;
    r.hi = r.estimate + half;
    return r;
}

ConfidenceDistribution sxs_combine(const std::vector<ConfidenceDistribution>& cds, const std::vector<double>& weights,
                                   const ParamGrid& grid) {
    if (cds.empty() || cds.size() != weights.size()) throw InvalidArgument("sxs_combine: one weight per CD required");
    double ss = 0.0;
    for (double w : weights) {
        if (!std::isfinite(w)) throw InvalidArgument("sxs_combine: weights must be finite");
        ss += w * w;
    }
    if (std::fabs(ss - 1.0) > 1e-9) {
        std::ostringstream os;
        os << "sxs_combine: squared weights sum to " << ss << ", not 1";
        throw InvalidArgument(os.str());
    }
    // Clamped so that a 0 and a 1 from different sources cannot produce
    // -inf + inf.
    constexpr double kTiny = 1e-300;
    std::vector<double> c(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double z = 0.0;
        for (std::size_t j = 0; j < cds.size(); ++j) {
            const double cj = std::clamp(cds[j].at(grid[i]), kTiny, 1.0 - 1e-16);
            z += weights[j] * norm_quantile(cj);
        }
        c[i] = norm_cdf(z);
    }
    return {grid, std::move(c)};
}

}  // namespace ccfuse
