#include "ccfuse/fuse/random.hpp"

#include "ccfuse/error.hpp"
#include "ccfuse/numerics/optimize.hpp"
#include "ccfuse/numerics/special.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace ccfuse {

using namespace numerics;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Half the width of {ℓ >= max - ½} on the grid, a curvature-free scale.
double half_unit_width(const ConfidenceLogLik& ll) {
    const auto& g = ll.grid;
    const auto& v = ll.values;
    std::size_t lo = ll.argmax, hi = ll.argmax;
    while (lo > 0 && v[lo - 1] >= -0.5) --lo;
    while (hi + 1 < v.size() && v[hi + 1] >= -0.5) ++hi;
    const double left = lo > 0 ? g[lo - 1] : g[lo];
    const double right = hi + 1 < v.size() ? g[hi + 1] : g[hi];
    return std::max(0.5 * (right - left), 1e-6 * (g.back() - g.front()));
}

}  // namespace

void RandomEffectSpec::validate() const {
    if (!std::isfinite(psi0)) throw InvalidArgument("RandomEffectSpec: psi0 must be finite");
    if (!(tau >= 0.0) || !std::isfinite(tau)) throw InvalidArgument("RandomEffectSpec: tau must be >= 0");
}

SourceIntegral normal_kernel_integral(std::function<double(double)> loglik, double mode, double scale,
                                      const AdaptiveQuadratureOptions& options) {
    if (!(scale > 0.0) || !std::isfinite(mode)) throw InvalidArgument("normal_kernel_integral: bad mode or scale");
    return [loglik = std::move(loglik), mode, scale, options](double psi0, double tau) {
        RandomEffectSpec{psi0, tau}.validate();
        if (tau == 0.0) return loglik(psi0);
        const double w1 = 1.0 / (scale * scale), w2 = 1.0 / (tau * tau);
        const double start = (mode * w1 + psi0 * w2) / (w1 + w2);
        const double sc = 1.0 / std::sqrt(w1 + w2);
        const double log_norm = std::log(tau) + kLogSqrt2Pi;
        const ScalarFn f = [&](double u) {
            const double l = loglik(u);
            if (l == -kInf) return l;
            const double z = (u - psi0) / tau;
            return l - 0.5 * z * z - log_norm;
        };
        return integrate_adaptive(f, start, sc, options).log_integral;
    };
}

SourceIntegral normal_kernel_integral(const ConfidenceLogLik& ll, const AdaptiveQuadratureOptions& options) {
    auto opts = options;
    opts.allow_zero_integrand = true;
    return normal_kernel_integral([ll](double u) { return ll.at(u); }, ll.argmax_value(), half_unit_width(ll), opts);
}

RandomFusion::RandomFusion(std::vector<SourceIntegral> terms) : terms_(std::move(terms)) {
    if (terms_.empty()) throw InvalidArgument("RandomFusion: no sources");
}

RandomFusion RandomFusion::from_logliks(const std::vector<ConfidenceLogLik>& lls,
                                        const AdaptiveQuadratureOptions& options) {
    std::vector<SourceIntegral> t;
    for (const auto& ll : lls) t.push_back(normal_kernel_integral(ll, options));
    return RandomFusion(std::move(t));
}

double RandomFusion::loglik(double psi0, double tau) const {
    double s = 0.0;
    for (const auto& t : terms_) {
        s += t(psi0, tau);
        if (s == -kInf) break;
    }
    if (std::isnan(s)) throw NumericalError("RandomFusion: NaN log-likelihood");
    return s;
}

RandomSurface fuse_random(const RandomFusion& fusion, const ParamGrid& psi0, const ParamGrid& tau) {
    if (tau.front() < 0.0) throw InvalidArgument("fuse_random: tau grid must be non-negative");
    RandomSurface s{psi0, tau, std::vector<double>(psi0.size() * tau.size()), 0.0};
    for (std::size_t i = 0; i < psi0.size(); ++i) {
        for (std::size_t j = 0; j < tau.size(); ++j) s.values[i * tau.size() + j] = fusion.loglik(psi0[i], tau[j]);
    }
    const double mx = *std::max_element(s.values.begin(), s.values.end());
    if (mx == -kInf) throw DegenerateData("fuse_random: every source integral underflows on the grid");
    s.max_loglik = mx;
    for (double& v : s.values) v -= mx;
    return s;
}

RandomSurface fuse_random(const std::vector<ConfidenceLogLik>& lls, const ParamGrid& psi0, const ParamGrid& tau,
                          const AdaptiveQuadratureOptions& options) {
    return fuse_random(RandomFusion::from_logliks(lls, options), psi0, tau);
}

// ---------------------------------------------------------------------------
// profiling over τ

TauFit profile_tau(const RandomFusion& fusion, double psi0, double tau_max) {
    if (!(tau_max > 0.0)) throw InvalidArgument("profile_tau: tau_max must be positive");
    int evals = 0;
    const ScalarFn neg = [&](double t) {
        ++evals;
        const double v = fusion.loglik(psi0, t);
        return v == -kInf ? kInf : -v;
    };
    // Coarse geometric scan first: the profile is often flat near 0 and the
    // maximum may sit on the border.
    std::vector<double> pts = {0.0};
    for (double f = 1.0 / 256.0; f <= 1.0; f *= 2.0) pts.push_back(f * tau_max);
    std::size_t best = 0;
    std::vector<double> vals;
    for (double t : pts) vals.push_back(neg(t));
    for (std::size_t i = 1; i < pts.size(); ++i) {
        if (vals[i] < vals[best]) best = i;
    }
    if (vals[best] == kInf) return {0.0, -kInf, evals};
    const double lo = pts[best == 0 ? 0 : best - 1];
    const double hi = pts[std::min(best + 1, pts.size() - 1)];
    const auto m = minimize_scalar(neg, {lo, hi}, 1e-9 * (1.0 + hi));
    if (m.value <= vals[best]) return {m.x, -m.value, evals};
    return {pts[best], -vals[best], evals};
}

RandomProfile profile_random(const RandomFusion& fusion, const ParamGrid& psi0, double tau_max) {
    RandomProfile p{psi0, {}, {}, 0};
    for (std::size_t i = 0; i < psi0.size(); ++i) {
        const auto fit = profile_tau(fusion, psi0[i], tau_max);
        p.loglik.push_back(fit.loglik);
        p.tau_hat.push_back(fit.tau);
        p.evaluations += fit.evaluations;
    }
    return p;
}

namespace {

bool correction_blocked(const RandomProfile& p, FusionDiagnostics& diag) {
    for (std::size_t i = 0; i < p.tau_hat.size(); ++i) {
        if (std::isfinite(p.loglik[i]) && p.tau_hat[i] < kTauCorrectionFloor) {
            diag.correction_skipped_at.push_back(p.psi0[i]);
        }
    }
    return !diag.correction_skipped_at.empty();
}

}  // namespace

FusionResult cox_reid_random(const RandomProfile& profile, const std::vector<double>& levels) {
    FusionDiagnostics diag;
    diag.optimizer_evaluations = profile.evaluations;
    std::vector<double> raw = profile.loglik;
    if (correction_blocked(profile, diag)) {
        diag.notes.push_back("tau estimate below the correction floor; correction skipped");
        diag.correction_skipped_at = profile.psi0.values();
    } else {
        for (std::size_t i = 0; i < raw.size(); ++i) raw[i] += std::log(profile.tau_hat[i]);
        diag.correction_applied = true;
    }
    return finish_profile(profile.psi0, std::move(raw), nullptr, levels, std::move(diag));
}

FusionResult random_effects_psi0(const RandomFusion& fusion, const ParamGrid& psi0, double tau_max,
                                 bool corrected, const std::vector<double>& levels) {
    const auto prof = profile_random(fusion, psi0, tau_max);
    FusionDiagnostics diag;
    diag.optimizer_evaluations = prof.evaluations;
    std::vector<double> raw = prof.loglik;
    bool apply = false;
    if (corrected) {
        if (correction_blocked(prof, diag)) {
            diag.notes.push_back("tau estimate below the correction floor; correction skipped");
            diag.correction_skipped_at = psi0.values();
        } else {
            apply = true;
            for (std::size_t i = 0; i < raw.size(); ++i) raw[i] += std::log(prof.tau_hat[i]);
        }
    }
    diag.correction_applied = apply;
    const ScalarFn exact = [&](double x) {
        const auto fit = profile_tau(fusion, x, tau_max);
        if (!apply) return fit.loglik;
        // A refinement point with τ̂ under the floor keeps the grid decision.
        return fit.loglik + std::log(std::max(fit.tau, kTauCorrectionFloor));
    };
    return finish_profile(psi0, std::move(raw), &exact, levels, std::move(diag));
}

}  // namespace ccfuse
