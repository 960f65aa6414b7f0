#include "ccfuse/cd/constructors.hpp"

#include "ccfuse/error.hpp"
#include "ccfuse/numerics/rng.hpp"
#include "ccfuse/numerics/roots.hpp"
#include "ccfuse/numerics/special.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace ccfuse {

using namespace numerics;

namespace {

void require_coverage(const StudySummary& s, const ParamGrid& grid) {
    const double lo = s.estimate - 4.0 * s.stddev;
    const double hi = s.estimate + 4.0 * s.stddev;
    if (grid.front() > lo || grid.back() < hi) {
        std::ostringstream os;
        os << "grid [" << grid.front() << ", " << grid.back() << "] does not cover estimate +/- 4 sd ["
           << lo << ", " << hi << "]";
        throw GridCoverageError(os.str());
    }
}

}  // namespace

ParamGrid default_grid(const StudySummary& s, std::size_t points, double span_sd) {
    s.validate();
    return ParamGrid::linspace(s.estimate - span_sd * s.stddev, s.estimate + span_sd * s.stddev,
                               points);
}

ConfidenceDistribution normal_cd(const StudySummary& s, const ParamGrid& grid) {
    s.validate();
    require_coverage(s, grid);
    std::vector<double> v(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) v[i] = norm_cdf((grid[i] - s.estimate) / s.stddev);
    return {grid, std::move(v)};
}

ConfidenceDistribution normal_cd(const StudySummary& s) { return normal_cd(s, default_grid(s)); }

ConfidenceDistribution t_cd(const StudySummary& s, const ParamGrid& grid) {
    s.validate();
    if (!s.df) throw InvalidArgument("t_cd: degrees of freedom missing");
    require_coverage(s, grid);
    std::vector<double> v(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        v[i] = t_cdf((grid[i] - s.estimate) / s.stddev, *s.df);
    }
    return {grid, std::move(v)};
}

ConfidenceDistribution t_cd(const StudySummary& s) {
    // Heavier tails need a wider default span.
    const double q = s.df ? std::max(6.0, t_quantile(1.0 - 1e-6, *s.df)) : 6.0;
    return t_cd(s, default_grid(s, 512, std::min(q, 200.0)));
}

ConfidenceCurve cc_from_cd(const ConfidenceDistribution& cd) {
    // The point where C crosses ½ is added to the grid, so the cusp of the
    // curve is represented exactly instead of being cut by interpolation.
    std::vector<double> g, v;
    g.reserve(cd.grid.size() + 1);
    v.reserve(cd.grid.size() + 1);
    for (std::size_t i = 0; i < cd.grid.size(); ++i) {
        if (i > 0 && cd.values[i - 1] < 0.5 && cd.values[i] > 0.5) {
            const double t = (0.5 - cd.values[i - 1]) / (cd.values[i] - cd.values[i - 1]);
            const double x = cd.grid[i - 1] + t * (cd.grid[i] - cd.grid[i - 1]);
            if (x > cd.grid[i - 1] && x < cd.grid[i]) {
                g.push_back(x);
                v.push_back(0.0);
            }
        }
        g.push_back(cd.grid[i]);
        v.push_back(std::fabs(1.0 - 2.0 * cd.values[i]));
    }
    ConfidenceCurve cc(ParamGrid(std::move(g)), std::move(v));
    cc.has_boundary_mass = cd.has_boundary_mass;
    cc.boundary_mass_at_lo = cd.boundary_mass_at_lo;
    return cc;
}

DevianceCurve deviance_from_loglik(const ConfidenceLogLik& ll) {
    DevianceCurve d{ll.grid, std::vector<double>(ll.values.size())};
    for (std::size_t i = 0; i < d.values.size(); ++i) d.values[i] = -2.0 * ll.values[i];
    return d;
}

ConfidenceCurve cc_from_deviance(const DevianceCurve& d) {
    std::vector<double> v(d.values.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double di = d.values[i];
        if (std::isnan(di) || di < -1e-9) throw InvalidArgument("cc_from_deviance: negative deviance");
        v[i] = std::isinf(di) ? 1.0 : chi2_cdf(std::max(di, 0.0), 1.0);
    }
    return {d.grid, std::move(v)};
}

// ---------------------------------------------------------------------------
// median

ConfidenceDistribution median_cd_distribution(std::vector<double> sample,
                                              const std::optional<ParamGrid>& grid) {
    const std::size_t n = sample.size();
    if (n < 2) throw InvalidArgument("median_cd: need at least two observations");
    for (double x : sample) {
        if (!std::isfinite(x)) throw InvalidArgument("median_cd: non-finite observation");
    }
    std::sort(sample.begin(), sample.end());
    const double range = sample.back() - sample.front();
    const double jitter_scale = 1e-9 * (range > 0 ? range : std::max(1.0, std::fabs(sample.front())));
    if (std::adjacent_find(sample.begin(), sample.end()) != sample.end()) {
        Generator g(RngStream{0x6D656469616E63ull, 0});
        for (std::size_t i = 0; i < n; ++i) {
            const bool tied = (i > 0 && sample[i] == sample[i - 1]) ||
                              (i + 1 < n && sample[i] == sample[i + 1]);
            if (tied) sample[i] += jitter_scale * (2.0 * g.uniform() - 1.0);
        }
        std::sort(sample.begin(), sample.end());
        if (std::adjacent_find(sample.begin(), sample.end()) != sample.end()) {
            throw InvalidArgument("median_cd: could not separate tied observations");
        }
    }

    std::vector<double> base;
    if (grid) {
        base = grid->values();
    } else {
        const double pad = range > 0 ? 0.2 * range : 1.0;
        base = ParamGrid::linspace(sample.front() - pad, sample.back() + pad, 512).values();
    }
    std::vector<double> inside;
    for (double x : sample) {
        if (x >= base.front() && x <= base.back()) inside.push_back(x);
    }
    const ParamGrid g = ParamGrid::merged(base, inside);

    std::vector<double> c_at(n);
    for (std::size_t r = 1; r <= n; ++r) {
        c_at[r - 1] = 1.0 - beta_cdf(0.5, static_cast<double>(r), static_cast<double>(n - r + 1));
    }
    std::vector<double> v(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double x = g[i];
        if (x < sample.front()) {
            v[i] = 0.0;
        } else if (x > sample.back()) {
            v[i] = 1.0;
        } else {
            auto it = std::lower_bound(sample.begin(), sample.end(), x);
            const std::size_t j = static_cast<std::size_t>(it - sample.begin());
            if (sample[j] == x) {
                v[i] = c_at[j];
            } else {
                const double t = (x - sample[j - 1]) / (sample[j] - sample[j - 1]);
                v[i] = c_at[j - 1] + t * (c_at[j] - c_at[j - 1]);
            }
        }
    }
    return {g, std::move(v)};
}

ConfidenceCurve median_cd(std::vector<double> sample, const std::optional<ParamGrid>& grid) {
    return cc_from_cd(median_cd_distribution(std::move(sample), grid));
}

// ---------------------------------------------------------------------------
// interval summaries

IntervalCd cd_from_interval(double median, double lo, double hi, double level, std::size_t points) {
    if (!(lo > 0.0 && median > 0.0 && hi > 0.0)) {
        throw InvalidArgument("cd_from_interval: values must be positive");
    }
    if (!(lo < median && median < hi)) throw InvalidArgument("cd_from_interval: need lo < median < hi");
    if (!(level > 0.0 && level < 1.0)) throw InvalidArgument("cd_from_interval: level outside (0, 1)");
    if (points < 16) throw InvalidArgument("cd_from_interval: need at least 16 grid points");
    const double z = norm_quantile(0.5 + 0.5 * level);

    IntervalCd out;
    const double r_lo = lo / median, r_hi = hi / median;
    const bool symmetric = std::fabs((hi - median) - (median - lo)) <= 1e-12 * median;
    if (symmetric) {
        out.a = 1.0;
        out.s = (hi - median) / z;
        out.roots = {1.0};
    } else {
        // Eliminating s leaves (r_hi^a + r_lo^a - 2)/a = 0; the division by a
        // removes the spurious root at a = 0.
        // Near 0 the quotient is replaced by its limit log(r_hi r_lo).
        const auto g = [&](double a) {
            if (std::fabs(a) < 1e-8) return std::log(r_hi * r_lo);
            return (std::pow(r_hi, a) + std::pow(r_lo, a) - 2.0) / a;
        };
        for (Interval side : {Interval{-2.0, -1e-4}, Interval{1e-4, 2.0}}) {
            for (Interval br : scan_sign_changes(g, side, 400)) {
                out.roots.push_back(br.lo == br.hi ? br.lo : find_root(g, br, 1e-14));
            }
        }
        // A root inside the excluded gap means the log-transform limit.
        if ((g(-1e-4) > 0) != (g(1e-4) > 0)) out.roots.push_back(find_root(g, {-1e-4, 1e-4}, 1e-14));
        if (out.roots.empty()) {
            std::ostringstream os;
            os << "cd_from_interval: no power transform reproduces (" << lo << ", " << median << ", "
               << hi << ") with a in [-2, 2]";
            throw TransformFailure(os.str());
        }
        out.a = *std::min_element(out.roots.begin(), out.roots.end(), [](double x, double y) {
            return std::fabs(x - 1.0) < std::fabs(y - 1.0);
        });
        out.log_transform = std::fabs(out.a) < 1e-3;
        if (out.log_transform) {
            out.s = std::log(hi / lo) / (2.0 * z);
        } else {
            const double sgn = out.a > 0 ? 1.0 : -1.0;
            out.s = sgn * (std::pow(hi, out.a) - std::pow(median, out.a)) / z;
        }
    }

    const double a = out.a, s = out.s;
    const bool use_log = out.log_transform;
    const auto h = [&](double psi) {
        if (use_log) return std::log(psi);
        return (a > 0 ? 1.0 : -1.0) * std::pow(psi, a);
    };
    const auto h_inv = [&](double u) {
        if (use_log) return std::exp(u);
        return std::pow((a > 0 ? 1.0 : -1.0) * u, 1.0 / a);
    };
    const double h0 = h(median);
    // Standardised range ±7, limited to where the inverse transform is
    // defined (h must stay on the correct side of zero).
    double t_lo = -7.0, t_hi = 7.0;
    if (!use_log) {
        const double t_zero = -h0 / s;  // h = 0 at this t
        if (a > 0) t_lo = std::max(t_lo, t_zero + 1e-6 * std::fabs(t_zero));
        else t_hi = std::min(t_hi, t_zero - 1e-6 * std::fabs(t_zero));
    }
    std::vector<double> psi(points), c(points);
    for (std::size_t i = 0; i < points; ++i) {
        const double t = t_lo + (t_hi - t_lo) * static_cast<double>(i) / (points - 1);
        psi[i] = h_inv(h0 + t * s);
    }
    // Make sure the three anchor points are on the grid.
    std::vector<double> anchors = {lo, median, hi};
    ParamGrid grid = ParamGrid::merged(psi, anchors);
    c.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) c[i] = norm_cdf((h(grid[i]) - h0) / s);
    out.cd = ConfidenceDistribution(grid, std::move(c));
    return out;
}

}  // namespace ccfuse
