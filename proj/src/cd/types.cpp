#include "ccfuse/cd/types.hpp"

#include "ccfuse/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace ccfuse {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double lerp(double x0, double x1, double y0, double y1, double x) {
    if (x1 == x0) return y0;
    const double t = (x - x0) / (x1 - x0);
    return y0 + t * (y1 - y0);
}

double finite_at(const std::vector<double>& v, std::ptrdiff_t i) {
    if (i < 0 || i >= static_cast<std::ptrdiff_t>(v.size())) return -kInf;
    return v[static_cast<std::size_t>(i)];
}

// Slope at node i of the quadratic through the node and its finite
// neighbours (exact for quadratic log-likelihoods away from their vertex).
double loglik_slope(const ParamGrid& g, const std::vector<double>& v, std::size_t i) {
    const auto k = static_cast<std::ptrdiff_t>(i);
    const bool left = std::isfinite(finite_at(v, k - 1)), right = std::isfinite(finite_at(v, k + 1));
    const auto x = [&](std::ptrdiff_t j) { return g[static_cast<std::size_t>(j)]; };
    const auto y = [&](std::ptrdiff_t j) { return v[static_cast<std::size_t>(j)]; };
    const auto secant = [&](std::ptrdiff_t j) { return (y(j + 1) - y(j)) / (x(j + 1) - x(j)); };
    if (left && right) {
        // Zero slope at a local extremum keeps the interpolant from
        // overshooting the tabulated maximum.
        if (secant(k - 1) * secant(k) <= 0.0) return 0.0;
        const double hl = x(k) - x(k - 1), hr = x(k + 1) - x(k);
        return (hr * secant(k - 1) + hl * secant(k)) / (hl + hr);
    }
    if (right) {
        if (!std::isfinite(finite_at(v, k + 2))) return secant(k);
        const double c = (secant(k + 1) - secant(k)) / (x(k + 2) - x(k));
        return secant(k) - c * (x(k + 1) - x(k));
    }
    if (left) {
        if (!std::isfinite(finite_at(v, k - 2))) return secant(k - 1);
        const double c = (secant(k - 1) - secant(k - 2)) / (x(k) - x(k - 2));
        return secant(k - 1) + c * (x(k) - x(k - 1));
    }
    return 0.0;
}

void check_sizes(const ParamGrid& g, const std::vector<double>& v, const char* what) {
    if (g.size() != v.size()) {
        std::ostringstream os;
        os << what << ": grid has " << g.size() << " points but " << v.size() << " values";
        throw InvalidArgument(os.str());
    }
}

}  // namespace

// ---------------------------------------------------------------------------
// ParamGrid

ParamGrid::ParamGrid(std::vector<double> values) : values_(std::move(values)) {
    if (values_.size() < 2) throw InvalidArgument("ParamGrid: need at least two points");
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i])) throw InvalidArgument("ParamGrid: non-finite grid value");
        if (i > 0 && !(values_[i] > values_[i - 1])) {
            std::ostringstream os;
            os << "ParamGrid: values not strictly increasing at index " << i;
            throw InvalidArgument(os.str());
        }
    }
}

ParamGrid ParamGrid::linspace(double lo, double hi, std::size_t n) {
    if (n < 2 || !(hi > lo)) throw InvalidArgument("ParamGrid::linspace: need n >= 2 and hi > lo");
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = lo + (hi - lo) * static_cast<double>(i) / (n - 1);
    v.back() = hi;
    return ParamGrid(std::move(v));
}

ParamGrid ParamGrid::merged(const std::vector<double>& base, const std::vector<double>& extra) {
    std::vector<double> v = base;
    v.insert(v.end(), extra.begin(), extra.end());
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return ParamGrid(std::move(v));
}

std::size_t ParamGrid::segment(double x) const {
    if (!contains(x)) throw InvalidArgument("ParamGrid::segment: point outside grid");
    auto it = std::upper_bound(values_.begin(), values_.end(), x);
    std::size_t i = static_cast<std::size_t>(it - values_.begin());
    if (i == 0) return 0;
    i -= 1;
    return std::min(i, values_.size() - 2);
}

// ---------------------------------------------------------------------------
// ConfidenceDistribution

ConfidenceDistribution::ConfidenceDistribution(ParamGrid g, std::vector<double> v)
    : grid(std::move(g)), values(std::move(v)) {
    check_sizes(grid, values, "ConfidenceDistribution");
}

void ConfidenceDistribution::validate() const {
    check_sizes(grid, values, "ConfidenceDistribution");
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!(values[i] >= 0.0 && values[i] <= 1.0)) {
            throw InvalidArgument("ConfidenceDistribution: value outside [0, 1]");
        }
        if (i > 0 && values[i] < values[i - 1]) {
            std::ostringstream os;
            os << "ConfidenceDistribution: decreasing at grid index " << i;
            throw InvalidArgument(os.str());
        }
    }
    if (has_boundary_mass && std::fabs(boundary_mass_at_lo - values.front()) > 1e-12) {
        throw InvalidArgument("ConfidenceDistribution: boundary mass differs from C at lower end");
    }
}

double ConfidenceDistribution::at(double psi) const {
    if (std::isnan(psi)) throw InvalidArgument("ConfidenceDistribution::at: NaN");
    if (psi < grid.front()) return 0.0;
    if (psi > grid.back()) return 1.0;
    const std::size_t i = grid.segment(psi);
    return lerp(grid[i], grid[i + 1], values[i], values[i + 1], psi);
}

double ConfidenceDistribution::quantile(double p) const {
    if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("ConfidenceDistribution::quantile: p outside [0, 1]");
    if (p <= values.front()) return grid.front();
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (values[i] >= p) {
            return lerp(values[i - 1], values[i], grid[i - 1], grid[i], p);
        }
    }
    return grid.back();
}

// ---------------------------------------------------------------------------
// ConfidenceCurve

ConfidenceCurve::ConfidenceCurve(ParamGrid g, std::vector<double> v)
    : grid(std::move(g)), values(std::move(v)) {
    check_sizes(grid, values, "ConfidenceCurve");
}

void ConfidenceCurve::validate() const {
    check_sizes(grid, values, "ConfidenceCurve");
    for (double v : values) {
        if (!(v >= 0.0 && v <= 1.0)) throw InvalidArgument("ConfidenceCurve: value outside [0, 1]");
    }
}

double ConfidenceCurve::at(double psi) const {
    if (std::isnan(psi)) throw InvalidArgument("ConfidenceCurve::at: NaN");
    if (psi < grid.front() || psi > grid.back()) return 1.0;
    const std::size_t i = grid.segment(psi);
    return lerp(grid[i], grid[i + 1], values[i], values[i + 1], psi);
}

std::size_t ConfidenceCurve::argmin() const {
    return static_cast<std::size_t>(std::min_element(values.begin(), values.end()) - values.begin());
}

// ---------------------------------------------------------------------------
// ConfidenceLogLik

ConfidenceLogLik::ConfidenceLogLik(ParamGrid g, std::vector<double> raw)
    : grid(std::move(g)), values(std::move(raw)) {
    check_sizes(grid, values, "ConfidenceLogLik");
    double mx = -kInf;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double v = values[i];
        if (std::isnan(v) || v == kInf) {
            std::ostringstream os;
            os << "ConfidenceLogLik: invalid value " << v << " at grid index " << i;
            throw InvalidArgument(os.str());
        }
        if (v > mx) {
            mx = v;
            argmax = i;
        }
    }
    if (mx == -kInf) throw DegenerateData("ConfidenceLogLik: every value is -inf");
    for (double& v : values) v -= mx;
    values[argmax] = 0.0;
}

double ConfidenceLogLik::at(double psi) const {
    if (std::isnan(psi)) throw InvalidArgument("ConfidenceLogLik::at: NaN");
    if (psi < grid.front() || psi > grid.back()) return -kInf;
    const std::size_t i = grid.segment(psi);
    const double a = values[i], b = values[i + 1];
    if (psi == grid[i]) return a;
    if (psi == grid[i + 1]) return b;
    if (a == -kInf || b == -kInf) return -kInf;
    const double h = grid[i + 1] - grid[i];
    const double t = (psi - grid[i]) / h;
    double ma = loglik_slope(grid, values, i), mb = loglik_slope(grid, values, i + 1);
    // Fritsch-Carlson limits keep the cell monotone between its nodes.
    const double delta = (b - a) / h;
    if (delta == 0.0) {
        ma = mb = 0.0;
    } else {
        if (ma / delta < 0.0) ma = 0.0;
        if (mb / delta < 0.0) mb = 0.0;
        const double r = std::hypot(ma / delta, mb / delta);
        if (r > 3.0) {
            ma *= 3.0 / r;
            mb *= 3.0 / r;
        }
    }
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * a + (t3 - 2 * t2 + t) * h * ma + (-2 * t3 + 3 * t2) * b +
           (t3 - t2) * h * mb;
}

// ---------------------------------------------------------------------------
// StudySummary

void StudySummary::validate() const {
    if (!std::isfinite(estimate)) throw InvalidArgument("StudySummary: estimate must be finite");
    if (!(stddev > 0.0) || !std::isfinite(stddev)) {
        throw InvalidArgument("StudySummary: stddev must be positive and finite");
    }
    if (df && *df < 1) throw InvalidArgument("StudySummary: df must be at least 1");
}

}  // namespace ccfuse
