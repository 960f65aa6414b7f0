#include "ccfuse/numerics/quadrature.hpp"

#include "ccfuse/error.hpp"
#include "ccfuse/numerics/optimize.hpp"
#include "ccfuse/numerics/special.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>

namespace ccfuse::numerics {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Newton iteration on the orthonormal Hermite recurrence, seeded by the
// usual asymptotic guesses for the largest roots.
GaussHermiteRule compute_rule(int n) {
    const double pim4 = 0.7511255444649425;  // π^(-1/4)
    std::vector<double> x(n), w(n);
    const int m = (n + 1) / 2;
    double z = 0.0;
    for (int i = 0; i < m; ++i) {
        if (i == 0) {
            z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -0.16667);
        } else if (i == 1) {
            z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
        } else if (i == 2) {
            z = 1.86 * z - 0.86 * x[0];
        } else if (i == 3) {
            z = 1.91 * z - 0.91 * x[1];
        } else {
            z = 2.0 * z - x[i - 2];
        }
        double pp = 0.0;
        int its = 0;
        for (; its < 100; ++its) {
            double p1 = pim4, p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = z * std::sqrt(2.0 / (j + 1)) * p2 - std::sqrt(static_cast<double>(j) / (j + 1)) * p3;
            }
            pp = std::sqrt(2.0 * n) * p2;
            const double z1 = z;
            z = z1 - p1 / pp;
            if (std::fabs(z - z1) <= 1e-14 * (1.0 + std::fabs(z))) break;
        }
        if (its >= 100) throw QuadratureError("gauss_hermite_rule: node iteration did not converge");
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = 2.0 / (pp * pp);
        w[n - 1 - i] = w[i];
    }
    GaussHermiteRule rule;
    rule.nodes.resize(n);
    rule.log_weights.resize(n);
    // Store ascending.
    for (int i = 0; i < n; ++i) {
        rule.nodes[i] = x[n - 1 - i];
        rule.log_weights[i] = std::log(w[n - 1 - i]);
    }
    return rule;
}

double gh_sum(const ScalarFn& log_f, double center, double scale, int nodes, bool allow_zero,
              int* evaluations) {
    const GaussHermiteRule& rule = gauss_hermite_rule(nodes);
    const double factor = std::sqrt(2.0) * scale;
    std::vector<double> terms(nodes);
    double mx = -kInf;
    for (int i = 0; i < nodes; ++i) {
        const double x = rule.nodes[i];
        const double u = center + factor * x;
        const double lf = log_f(u);
        if (evaluations) ++*evaluations;
        if (!std::isfinite(lf) && !(allow_zero && lf == -kInf)) {
            std::ostringstream os;
            os << "integrate_gauss_hermite: integrand log value " << lf << " at node " << i
               << " (u = " << u << ")";
            throw QuadratureError(os.str());
        }
        terms[i] = rule.log_weights[i] + x * x + lf;
        mx = std::max(mx, terms[i]);
    }
    if (mx == -kInf) return -kInf;
    double s = 0.0;
    for (double t : terms) s += std::exp(t - mx);
    return std::log(factor) + mx + std::log(s);
}

double second_difference(const ScalarFn& f, double x, double h) {
    return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
}

}  // namespace

const GaussHermiteRule& gauss_hermite_rule(int nodes) {
    if (nodes < 1 || nodes > 200) throw InvalidArgument("gauss_hermite_rule: nodes must be in [1, 200]");
    static std::mutex mutex;
    static std::map<int, std::unique_ptr<GaussHermiteRule>> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto& slot = cache[nodes];
    if (!slot) slot = std::make_unique<GaussHermiteRule>(compute_rule(nodes));
    return *slot;
}

double integrate_gauss_hermite(const ScalarFn& log_f, double center, double scale,
                               const GaussHermiteOptions& options) {
    if (!(scale > 0.0) || !std::isfinite(scale)) {
        throw InvalidArgument("integrate_gauss_hermite: scale must be positive and finite");
    }
    if (!std::isfinite(center)) throw InvalidArgument("integrate_gauss_hermite: center not finite");
    const double result = gh_sum(log_f, center, scale, options.nodes, false, nullptr);
    if (options.verify) {
        const int more = std::min(200, options.nodes + (options.nodes + 1) / 2);
        const double check = gh_sum(log_f, center, scale, more, false, nullptr);
        if (std::fabs(check - result) > options.verify_tol) {
            std::ostringstream os;
            os << "integrate_gauss_hermite: " << options.nodes << " and " << more
               << " nodes disagree (" << result << " vs " << check
               << "); integrand is not smooth enough";
            throw QuadratureError(os.str());
        }
    }
    return result;
}

double laplace_log_integral(const ScalarFn& log_f, double start, double initial_halfwidth) {
    if (!std::isfinite(start)) throw InvalidArgument("laplace_log_integral: start not finite");
    const ScalarFn neg = [&](double u) {
        const double v = log_f(u);
        return std::isnan(v) ? v : -v;
    };
    double half = initial_halfwidth > 0 ? initial_halfwidth : 1.0;
    double center = start;
    for (int attempt = 0; attempt < 60; ++attempt) {
        const Interval br{center - half, center + half};
        const ScalarMinimum m = minimize_scalar(neg, br, 1e-10);
        const double margin = 1e-3 * br.width();
        if (!std::isfinite(m.value)) {
            throw FlatModeError("laplace_log_integral: integrand vanishes on the search interval");
        }
        if (m.x - br.lo > margin && br.hi - m.x > margin) {
            const double h = 1e-3 * (1.0 + std::fabs(m.x));
            const double curv = second_difference(log_f, m.x, h);
            if (!(curv < 0.0) || !std::isfinite(curv)) {
                std::ostringstream os;
                os << "laplace_log_integral: non-negative curvature " << curv << " at mode " << m.x;
                throw FlatModeError(os.str());
            }
            return -m.value + 0.5 * std::log(2.0 * kPi) - 0.5 * std::log(-curv);
        }
        center = m.x;
        half *= 2.0;
    }
    throw FlatModeError("laplace_log_integral: no interior mode found");
}

AdaptiveQuadratureResult integrate_adaptive(const ScalarFn& log_f, double start, double scale_hint,
                                            const AdaptiveQuadratureOptions& options) {
    if (!(scale_hint > 0.0) || !std::isfinite(scale_hint)) {
        throw InvalidArgument("integrate_adaptive: scale hint must be positive and finite");
    }
    int evals = 0;
    const ScalarFn counted = [&](double u) {
        ++evals;
        return log_f(u);
    };
    const ScalarFn neg = [&](double u) {
        const double v = counted(u);
        return std::isnan(v) ? v : -v;
    };

    double center = start;
    double half = 6.0 * scale_hint;
    double mode = start;
    double mode_value = -kInf;
    bool interior = false;
    for (int attempt = 0; attempt < 12; ++attempt) {
        const Interval br{center - half, center + half};
        const ScalarMinimum m = minimize_scalar(neg, br, 1e-6 * scale_hint);
        mode = m.x;
        mode_value = -m.value;
        const double margin = 0.02 * br.width();
        if (m.x - br.lo > margin && br.hi - m.x > margin) {
            interior = true;
            break;
        }
        center = m.x;
        half *= 2.0;
    }
    if (!std::isfinite(mode_value)) {
        if (options.allow_zero_integrand && mode_value == -kInf) {
            return {-kInf, mode, scale_hint, false, evals};
        }
        throw QuadratureError("integrate_adaptive: integrand has no finite value near start");
    }
    if (!interior) throw FlatModeError("integrate_adaptive: integrand has no interior mode");

    const double h = 1e-3 * scale_hint;
    const double curv = second_difference(counted, mode, h);
    double scale = scale_hint;
    if (std::isfinite(curv) && curv < 0.0) scale = 1.0 / std::sqrt(-curv);

    if (options.force_laplace || evals + options.nodes > options.max_evaluations) {
        if (!(std::isfinite(curv) && curv < 0.0)) {
            throw FlatModeError("integrate_adaptive: Laplace fallback needs negative curvature");
        }
        const double li = mode_value + 0.5 * std::log(2.0 * kPi) - 0.5 * std::log(-curv);
        return {li, mode, scale, true, evals};
    }
    const double li = gh_sum(log_f, mode, scale, options.nodes, options.allow_zero_integrand, &evals);
    return {li, mode, scale, false, evals};
}

}  // namespace ccfuse::numerics
