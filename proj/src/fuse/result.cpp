#include "ccfuse/fuse/result.hpp"

#include "ccfuse/cd/constructors.hpp"
#include "ccfuse/cd/convert.hpp"
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

// Moves a linearly interpolated endpoint onto the exact crossing of the
// deviance with its χ²₁ quantile, when the crossing is bracketed by the
// grid cell that holds the endpoint.
double refine_endpoint(const ParamGrid& g, const std::vector<double>& dev, double x, double q,
                       const ScalarFn& exact, double max_ll) {
    if (x <= g.front() || x >= g.back()) return x;
    const std::size_t i = g.segment(x);
    const double d0 = dev[i] - q, d1 = dev[i + 1] - q;
    if (!std::isfinite(d0) || !std::isfinite(d1) || d0 * d1 > 0) return x;
    const auto f = [&](double u) {
        const double v = exact(u);
        if (!std::isfinite(v)) return kInf;
        return 2.0 * (max_ll - v) - q;
    };
    try {
        return find_root(f, {g[i], g[i + 1]}, 1e-12 * (1.0 + std::fabs(x)));
    } catch (const BracketError&) {
        return x;
    }
}

}  // namespace

const CurveSummary& FusionResult::interval(double level) const {
    for (const auto& s : intervals) {
        if (std::fabs(s.level - level) < 1e-12) return s;
    }
    std::ostringstream os;
    os << "FusionResult: level " << level << " was not requested";
    throw InvalidArgument(os.str());
}

FusionResult finish_profile(const ParamGrid& grid, std::vector<double> raw, const ScalarFn* exact,
                            const std::vector<double>& levels, FusionDiagnostics diagnostics) {
    if (raw.size() != grid.size()) throw InvalidArgument("finish_profile: size mismatch");
    std::vector<double> xs = grid.values();
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (std::isnan(raw[i]) || raw[i] == kInf) {
            std::ostringstream os;
            os << "finish_profile: invalid profile value at " << xs[i];
            throw NumericalError(os.str());
        }
        if (raw[i] == -kInf) diagnostics.excluded.push_back(xs[i]);
    }
    auto it = std::max_element(raw.begin(), raw.end());
    if (*it == -kInf) throw DegenerateData("finish_profile: every focus value is excluded");
    std::size_t i_max = static_cast<std::size_t>(it - raw.begin());
    double max_ll = *it;
    double estimate = xs[i_max];

    if (exact) {
        const double lo = xs[i_max == 0 ? 0 : i_max - 1];
        const double hi = xs[std::min(i_max + 1, xs.size() - 1)];
        const auto neg = [&](double u) {
            const double v = (*exact)(u);
            return std::isfinite(v) ? -v : kInf;
        };
        const auto m = minimize_scalar(neg, {lo, hi}, 1e-10 * (1.0 + std::fabs(estimate)));
        diagnostics.optimizer_evaluations += m.evaluations;
        const double scale = 1e-12 * (1.0 + std::fabs(m.x));
        if (-m.value > max_ll) {
            max_ll = -m.value;
            estimate = m.x;
            auto pos = std::lower_bound(xs.begin(), xs.end(), m.x);
            const bool near_lo = pos != xs.begin() && m.x - *(pos - 1) < scale;
            const bool near_hi = pos != xs.end() && *pos - m.x < scale;
            if (near_hi) {
                raw[static_cast<std::size_t>(pos - xs.begin())] = max_ll;
                estimate = *pos;
            } else if (near_lo) {
                raw[static_cast<std::size_t>(pos - xs.begin()) - 1] = max_ll;
                estimate = *(pos - 1);
            } else {
                const auto k = pos - xs.begin();
                xs.insert(pos, m.x);
                raw.insert(raw.begin() + k, max_ll);
            }
        }
    }

    FusionResult out;
    out.max_loglik = max_ll;
    out.estimate = estimate;
    ParamGrid g(xs);
    for (double& v : raw) v = std::min(0.0, v - max_ll);
    out.profile = ConfidenceLogLik(g, raw);
    out.deviance = deviance_from_loglik(out.profile);
    out.cc = cc_from_deviance(out.deviance);
    for (double level : levels) {
        CurveSummary s = summarize(out.cc, level);
        s.point_estimate = estimate;
        if (exact) {
            const double q = chi2_quantile(level, 1.0);
            for (auto& piece : s.intervals) {
                if (!piece.lo_open) piece.lo = refine_endpoint(g, out.deviance.values, piece.lo, q, *exact, max_ll);
                if (!piece.hi_open) piece.hi = refine_endpoint(g, out.deviance.values, piece.hi, q, *exact, max_ll);
            }
        }
        out.intervals.push_back(std::move(s));
    }
    out.diagnostics = std::move(diagnostics);
    return out;
}

FusionResult finish_unbounded_profile(const ParamGrid& grid, std::vector<double> raw, const ScalarFn* exact,
                                      double supremum, int direction, const std::vector<double>& levels,
                                      FusionDiagnostics diagnostics) {
    if (raw.size() != grid.size()) throw InvalidArgument("finish_unbounded_profile: size mismatch");
    if (direction == 0 || !std::isfinite(supremum)) {
        throw InvalidArgument("finish_unbounded_profile: need a direction and a finite supremum");
    }
    std::vector<double> dev(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (std::isnan(raw[i]) || raw[i] > supremum + 1e-9 * (1.0 + std::fabs(supremum))) {
            std::ostringstream os;
            os << "finish_unbounded_profile: profile value at " << grid[i] << " exceeds the supremum";
            throw NumericalError(os.str());
        }
        if (raw[i] == -kInf) diagnostics.excluded.push_back(grid[i]);
        dev[i] = raw[i] == -kInf ? kInf : std::max(0.0, 2.0 * (supremum - raw[i]));
    }
    FusionResult out;
    out.max_loglik = supremum;
    out.estimate = direction > 0 ? kInf : -kInf;
    out.profile = ConfidenceLogLik(grid, raw);
    for (std::size_t i = 0; i < raw.size(); ++i) out.profile.values[i] = std::min(0.0, raw[i] - supremum);
    out.profile.argmax = direction > 0 ? grid.size() - 1 : 0;
    out.deviance = DevianceCurve{grid, dev};
    out.cc = cc_from_deviance(out.deviance);
    diagnostics.notes.push_back(direction > 0 ? "profile maximum at +inf" : "profile maximum at -inf");
    for (double level : levels) {
        CurveSummary s = summarize(out.cc, level);
        s.point_estimate = out.estimate;
        const double q = chi2_quantile(level, 1.0);
        for (auto& piece : s.intervals) {
            if (direction > 0 && piece.hi >= grid.back()) {
                piece.hi = kInf;
                piece.hi_open = false;
            } else if (!piece.hi_open && exact) {
                piece.hi = refine_endpoint(grid, dev, piece.hi, q, *exact, supremum);
            }
            if (direction < 0 && piece.lo <= grid.front()) {
                piece.lo = -kInf;
                piece.lo_open = false;
            } else if (!piece.lo_open && exact) {
                piece.lo = refine_endpoint(grid, dev, piece.lo, q, *exact, supremum);
            }
        }
        out.intervals.push_back(std::move(s));
    }
    out.diagnostics = std::move(diagnostics);
    return out;
}

FusionResult finish_curve(const ConfidenceCurve& cc, const std::vector<double>& levels,
                          FusionDiagnostics diagnostics) {
    cc.validate();
    FusionResult out;
    out.cc = cc;
    out.profile = chi2_convert(cc);
    out.deviance = deviance_from_loglik(out.profile);
    for (double level : levels) out.intervals.push_back(summarize(cc, level));
    out.estimate = cc.grid[cc.argmin()];
    out.max_loglik = 0.0;
    out.diagnostics = std::move(diagnostics);
    return out;
}

}  // namespace ccfuse
