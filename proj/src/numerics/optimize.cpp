#include "ccfuse/numerics/optimize.hpp"

#include "ccfuse/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace ccfuse::numerics {

namespace {

double checked(const ScalarFn& f, double x) {
    const double v = f(x);
    if (std::isnan(v) || v == -std::numeric_limits<double>::infinity()) {
        std::ostringstream os;
        os << "minimize_scalar: objective is " << v << " at x = " << x;
        throw NumericalError(os.str());
    }
    return v;
}

double checked(const VectorFn& f, const std::vector<double>& x) {
    const double v = f(x);
    if (std::isnan(v) || v == -std::numeric_limits<double>::infinity()) {
        std::ostringstream os;
        os << "minimize_multivariate: objective is " << v << " at (";
        for (std::size_t i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
        os << ")";
        throw NumericalError(os.str());
    }
    return v;
}

}  // namespace

ScalarMinimum minimize_scalar(const ScalarFn& f, Interval bracket, double tol, int max_iter) {
    if (!(bracket.lo <= bracket.hi)) throw InvalidArgument("minimize_scalar: bracket lo > hi");
    const double golden = 0.5 * (3.0 - std::sqrt(5.0));
    const double sqrt_eps = std::sqrt(std::numeric_limits<double>::epsilon());
    int evals = 0;
    double a = bracket.lo, b = bracket.hi;
    double x = a + golden * (b - a);
    double w = x, v = x;
    double fx = checked(f, x);
    ++evals;
    double fw = fx, fv = fx;
    double d = 0.0, e = 0.0;

    for (int it = 0; it < max_iter; ++it) {
        const double xm = 0.5 * (a + b);
        const double tol1 = sqrt_eps * std::fabs(x) + tol / 3.0;
        const double tol2 = 2.0 * tol1;
        if (std::fabs(x - xm) <= tol2 - 0.5 * (b - a)) break;
        bool golden_step = true;
        if (std::fabs(e) > tol1 && std::isfinite(fx) && std::isfinite(fw) && std::isfinite(fv)) {
            double r = (x - w) * (fx - fv);
            double q = (x - v) * (fx - fw);
            double p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if (q > 0.0) p = -p;
            q = std::fabs(q);
            const double etemp = e;
            e = d;
            if (std::fabs(p) < std::fabs(0.5 * q * etemp) && p > q * (a - x) && p < q * (b - x)) {
                d = p / q;
                const double u = x + d;
                if (u - a < tol2 || b - u < tol2) d = (xm >= x) ? tol1 : -tol1;
                golden_step = false;
            }
        }
        if (golden_step) {
            e = (x >= xm) ? a - x : b - x;
            d = golden * e;
        }
        const double u = (std::fabs(d) >= tol1) ? x + d : x + (d > 0 ? tol1 : -tol1);
        const double fu = checked(f, u);
        ++evals;
        if (fu <= fx) {
            if (u >= x) a = x; else b = x;
            v = w; fv = fw;
            w = x; fw = fx;
            x = u; fx = fu;
        } else {
            if (u < x) a = u; else b = u;
            if (fu <= fw || w == x) {
                v = w; fv = fw;
                w = u; fw = fu;
            } else if (fu <= fv || v == x || v == w) {
                v = u; fv = fu;
            }
        }
    }

    ScalarMinimum best{x, fx, evals};
    for (double end : {bracket.lo, bracket.hi}) {
        const double fe = checked(f, end);
        ++best.evaluations;
        if (fe < best.value) {
            best.x = end;
            best.value = fe;
        }
    }
    return best;
}

VectorMinimum minimize_multivariate(const VectorFn& f, std::vector<double> start,
                                    const NelderMeadOptions& options) {
    const std::size_t n = start.size();
    if (n == 0) throw InvalidArgument("minimize_multivariate: empty start vector");
    const double f_start = checked(f, start);
    if (!std::isfinite(f_start)) {
        throw NumericalError("minimize_multivariate: objective not finite at start");
    }

    std::vector<double> best = start;
    double best_value = f_start;
    int total_iter = 0;
    bool converged = false;

    for (int round = 0; round <= options.restarts; ++round) {
        std::vector<std::vector<double>> simplex(n + 1, best);
        std::vector<double> values(n + 1, best_value);
        for (std::size_t i = 0; i < n; ++i) {
            double step = options.initial_step.size() == n
                              ? options.initial_step[i]
                              : std::max(0.1, 0.1 * std::fabs(best[i]));
            if (round > 0) step *= 0.5;
            simplex[i + 1][i] += step;
            values[i + 1] = checked(f, simplex[i + 1]);
        }
        std::vector<std::size_t> order(n + 1);
        std::vector<double> centroid(n), trial(n), trial2(n);
        converged = false;
        for (int it = 0; it < options.max_iter; ++it, ++total_iter) {
            std::iota(order.begin(), order.end(), 0);
            std::sort(order.begin(), order.end(),
                      [&](std::size_t i, std::size_t j) { return values[i] < values[j]; });
            const std::size_t lo = order.front(), hi = order.back(), nh = order[n - 1];
            double size = 0.0;
            for (std::size_t i = 0; i <= n; ++i) {
                for (std::size_t c = 0; c < n; ++c) {
                    size = std::max(size, std::fabs(simplex[i][c] - simplex[lo][c]));
                }
            }
            const double spread = values[hi] - values[lo];
            if (std::isfinite(spread) &&
                spread <= options.tol * (std::fabs(values[lo]) + options.tol) &&
                size <= options.tol * (1.0 + std::sqrt(std::inner_product(
                                                 simplex[lo].begin(), simplex[lo].end(),
                                                 simplex[lo].begin(), 0.0)))) {
                converged = true;
                break;
            }
            std::fill(centroid.begin(), centroid.end(), 0.0);
            for (std::size_t i = 0; i <= n; ++i) {
                if (i == hi) continue;
                for (std::size_t c = 0; c < n; ++c) centroid[c] += simplex[i][c] / n;
            }
            for (std::size_t c = 0; c < n; ++c) {
                trial[c] = centroid[c] + (centroid[c] - simplex[hi][c]);
            }
            const double fr = checked(f, trial);
            if (fr < values[lo]) {
                for (std::size_t c = 0; c < n; ++c) {
                    trial2[c] = centroid[c] + 2.0 * (centroid[c] - simplex[hi][c]);
                }
                const double fe = checked(f, trial2);
                if (fe < fr) {
                    simplex[hi] = trial2;
                    values[hi] = fe;
                } else {
                    simplex[hi] = trial;
                    values[hi] = fr;
                }
            } else if (fr < values[nh]) {
                simplex[hi] = trial;
                values[hi] = fr;
            } else {
                const bool outside = fr < values[hi];
                for (std::size_t c = 0; c < n; ++c) {
                    trial2[c] = outside ? centroid[c] + 0.5 * (trial[c] - centroid[c])
                                        : centroid[c] + 0.5 * (simplex[hi][c] - centroid[c]);
                }
                const double fc = checked(f, trial2);
                if (fc < std::min(fr, values[hi])) {
                    simplex[hi] = trial2;
                    values[hi] = fc;
                } else {
                    // Shrink towards the best vertex.
                    for (std::size_t i = 0; i <= n; ++i) {
                        if (i == lo) continue;
                        for (std::size_t c = 0; c < n; ++c) {
                            simplex[i][c] = simplex[lo][c] + 0.5 * (simplex[i][c] - simplex[lo][c]);
                        }
                        values[i] = checked(f, simplex[i]);
                    }
                }
            }
        }
        const auto it_best = std::min_element(values.begin(), values.end());
        const std::size_t ib = static_cast<std::size_t>(it_best - values.begin());
        const double improvement = best_value - values[ib];
        if (values[ib] <= best_value) {
            best = simplex[ib];
            best_value = values[ib];
        }
        if (converged && round > 0 &&
            improvement <= options.tol * (std::fabs(best_value) + options.tol)) {
            break;
        }
    }
    return {best, best_value, total_iter, converged};
}

}  // namespace ccfuse::numerics
