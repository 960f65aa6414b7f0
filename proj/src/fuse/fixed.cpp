#include "ccfuse/fuse/fixed.hpp"

#include "ccfuse/error.hpp"
#include "ccfuse/numerics/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace ccfuse {

using namespace numerics;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

class Evaluator {
public:
    Evaluator(const ConstrainedProblem& p, const ProfileOptions& o) : p_(p), o_(o) {}

    int evaluations = 0;

    // Solves the constraint for the pivot (in place) and returns the joint
    // log-likelihood, or -inf when no pivot value satisfies it.
    double complete(std::vector<double>& theta, double phi) {
        if (p_.solve_pivot) {
            const auto s = p_.solve_pivot(theta, phi);
            if (!s || !std::isfinite(*s)) return -kInf;
            theta[p_.pivot] = *s;
            return loglik(theta);
        }
        const Interval b = p_.bounds[p_.pivot];
        const auto g = [&](double x) {
            theta[p_.pivot] = x;
            const double v = p_.focus(theta);
            return std::isfinite(v) ? v - phi : std::numeric_limits<double>::quiet_NaN();
        };
        const int n = std::max(2, o_.pivot_scan);
        double best = -kInf, best_x = 0.0;
        double x0 = b.lo, g0 = g(x0);
        const auto consider = [&](double x) {
            theta[p_.pivot] = x;
            const double v = loglik(theta);
            if (v > best) {
                best = v;
                best_x = x;
            }
        };
        if (g0 == 0.0) consider(x0);
        for (int i = 1; i <= n; ++i) {
            const double x1 = b.lo + (b.hi - b.lo) * i / n;
            const double g1 = g(x1);
            if (g1 == 0.0) {
                consider(x1);
            } else if (std::isfinite(g0) && std::isfinite(g1) && (g0 < 0) != (g1 < 0) && g0 != 0.0) {
                try {
                    consider(find_root(g, {x0, x1}, 1e-13 * (1.0 + std::fabs(x0))));
                } catch (const NumericalError&) {
                    // NaN inside the cell: no usable root there.
                }
            }
            x0 = x1;
            g0 = g1;
        }
        theta[p_.pivot] = best_x;
        return best;
    }

    double loglik(const std::vector<double>& theta) {
        ++evaluations;
        const double v = p_.loglik(theta);
        if (std::isnan(v)) throw NumericalError("profile: log-likelihood returned NaN");
        return v;
    }

    std::vector<std::size_t> free_coords() const {
        std::vector<std::size_t> f;
        for (std::size_t c = 0; c < p_.dimension; ++c) {
            if (c != p_.pivot) f.push_back(c);
        }
        return f;
    }

    // Maximum over the free coordinates; `theta` carries the warm start in
    // and the argmax out.
    double maximise(std::vector<double>& theta, double phi, bool warm) {
        const auto free = free_coords();
        if (free.empty()) return complete(theta, phi);
        const auto objective = [&](const std::vector<double>& x) {
            std::vector<double> t = theta;
            for (std::size_t i = 0; i < free.size(); ++i) t[free[i]] = x[i];
            const double v = complete(t, phi);
            return std::isfinite(v) ? -v : kInf;
        };
        if (free.size() == 1) {
            const Interval b = p_.bounds[free[0]];
            const int n = std::max(4, o_.scan_points);
            double best = kInf;
            int ib = -1;
            for (int i = 0; i <= n; ++i) {
                const double v = objective({b.lo + (b.hi - b.lo) * i / n});
                if (v < best) {
                    best = v;
                    ib = i;
                }
            }
            if (ib < 0) return -kInf;
            const double lo = b.lo + (b.hi - b.lo) * std::max(0, ib - 1) / n;
            const double hi = b.lo + (b.hi - b.lo) * std::min(n, ib + 1) / n;
            const auto m = minimize_scalar([&](double x) { return objective({x}); }, {lo, hi},
                                           o_.tol * (1.0 + std::fabs(lo) + std::fabs(hi)));
            const double x = m.value <= best ? m.x : b.lo + (b.hi - b.lo) * ib / n;
            theta[free[0]] = x;
            return complete(theta, phi);
        }
        std::vector<double> x0(free.size());
        for (std::size_t i = 0; i < free.size(); ++i) x0[i] = theta[free[i]];
        if (!warm || !std::isfinite(objective(x0))) {
            for (std::size_t i = 0; i < free.size(); ++i) x0[i] = p_.start[free[i]];
            if (!std::isfinite(objective(x0))) return -kInf;
        }
        NelderMeadOptions nm;
        nm.tol = o_.tol;
        nm.restarts = 2;
        nm.max_iter = 5000;
        for (std::size_t c : free) {
            nm.initial_step.push_back(0.05 * std::max(p_.bounds[c].width(), 1e-8));
        }
        const auto r = minimize_multivariate(objective, x0, nm);
        for (std::size_t i = 0; i < free.size(); ++i) theta[free[i]] = r.x[i];
        return complete(theta, phi);
    }

private:
    const ConstrainedProblem& p_;
    const ProfileOptions& o_;
};

void check_problem(const ConstrainedProblem& p) {
    if (p.dimension < 1) throw InvalidArgument("profile: dimension must be positive");
    if (!p.loglik || !p.focus) throw InvalidArgument("profile: log-likelihood and focus are required");
    if (p.pivot >= p.dimension) throw InvalidArgument("profile: pivot out of range");
    if (p.bounds.size() != p.dimension || p.start.size() != p.dimension) {
        throw InvalidArgument("profile: bounds and start must match the dimension");
    }
    for (const auto& b : p.bounds) {
        if (!(b.lo < b.hi) || !std::isfinite(b.lo) || !std::isfinite(b.hi)) {
            throw InvalidArgument("profile: search bounds must be finite with lo < hi");
        }
    }
}

}  // namespace

ConstrainedProfile profile_constrained(const ConstrainedProblem& problem, const ParamGrid& focus_grid,
                                       const ProfileOptions& options) {
    check_problem(problem);
    Evaluator ev(problem, options);
    ConstrainedProfile out;
    std::vector<double> theta = problem.start;
    bool warm = false;
    for (std::size_t i = 0; i < focus_grid.size(); ++i) {
        std::vector<double> t = theta;
        const double v = ev.maximise(t, focus_grid[i], warm);
        out.values.push_back(v);
        out.argmax.push_back(t);
        if (std::isfinite(v)) {
            theta = t;
            warm = true;
        }
    }
    out.evaluations = ev.evaluations;
    return out;
}

double profile_value(const ConstrainedProblem& problem, double phi, const ProfileOptions& options) {
    check_problem(problem);
    Evaluator ev(problem, options);
    std::vector<double> theta = problem.start;
    return ev.maximise(theta, phi, false);
}

// ---------------------------------------------------------------------------
// fixed effects

FusionResult fuse_fixed(const std::vector<ConfidenceLogLik>& lls, const FocusMap& map,
                        const ParamGrid& focus_grid, const ProfileOptions& options) {
    if (lls.empty()) throw InvalidArgument("fuse_fixed: no sources");
    map.validate(lls.size());
    FusionDiagnostics diag;

    if (map.common) {
        const ScalarFn sum = [&](double phi) {
            double s = 0.0;
            for (const auto& ll : lls) s += ll.at(phi);
            return s;
        };
        std::vector<double> raw(focus_grid.size());
        for (std::size_t i = 0; i < raw.size(); ++i) raw[i] = sum(focus_grid[i]);
        return finish_profile(focus_grid, std::move(raw), &sum, options.levels, std::move(diag));
    }

    ConstrainedProblem p;
    p.dimension = map.dimension;
    p.focus = map.focus;
    p.pivot = map.pivot;
    p.solve_pivot = map.solve_pivot;
    p.loglik = [&](const std::vector<double>& theta) {
        double s = 0.0;
        for (std::size_t j = 0; j < lls.size(); ++j) {
            s += lls[j].at(theta[map.source_coord[j]]);
            if (s == -kInf) break;
        }
        return s;
    };
    p.bounds.assign(map.dimension, Interval{-kInf, kInf});
    p.start.assign(map.dimension, std::numeric_limits<double>::quiet_NaN());
    for (std::size_t j = 0; j < lls.size(); ++j) {
        auto& b = p.bounds[map.source_coord[j]];
        b.lo = std::max(b.lo, lls[j].grid.front());
        b.hi = std::min(b.hi, lls[j].grid.back());
        if (std::isnan(p.start[map.source_coord[j]])) p.start[map.source_coord[j]] = lls[j].argmax_value();
    }
    for (const auto& b : p.bounds) {
        if (!(b.lo < b.hi)) throw InvalidArgument("fuse_fixed: sources sharing a coordinate have disjoint grids");
    }

    const auto prof = profile_constrained(p, focus_grid, options);
    diag.optimizer_evaluations = prof.evaluations;
    const ScalarFn exact = [&](double phi) { return profile_value(p, phi, options); };
    bool any = false;
    for (double v : prof.values) any = any || std::isfinite(v);
    if (!any) throw InvalidArgument("fuse_fixed: the constraint set is empty for every focus value on the grid");
    return finish_profile(focus_grid, prof.values, &exact, options.levels, std::move(diag));
}

// ---------------------------------------------------------------------------
// linked sources

LinkedModel parabola_vertex_model(const std::vector<double>& x, std::vector<double> start,
                                  std::vector<Interval> bounds) {
    LinkedModel m;
    m.dimension = 3;
    for (double xj : x) {
        m.links.push_back([xj](const std::vector<double>& b) { return b[0] + b[1] * xj + b[2] * xj * xj; });
    }
    m.focus = [](const std::vector<double>& b) { return -b[1] / (2.0 * b[2]); };
    m.pivot = 1;
    m.solve_pivot = [](const std::vector<double>& b, double xstar) {
        return std::optional<double>(-2.0 * b[2] * xstar);
    };
    m.start = std::move(start);
    m.bounds = std::move(bounds);
    return m;
}

FusionResult fuse_linked(const std::vector<ConfidenceLogLik>& lls, const LinkedModel& model,
                         const ParamGrid& focus_grid, const ProfileOptions& options) {
    if (lls.empty()) throw InvalidArgument("fuse_linked: no sources");
    if (model.links.size() != lls.size()) throw InvalidArgument("fuse_linked: one link per source required");
    if (model.dimension < 1 || model.dimension > 5) throw InvalidArgument("fuse_linked: β dimension must be 1..5");
    ConstrainedProblem p;
    p.dimension = model.dimension;
    p.focus = model.focus;
    p.pivot = model.pivot;
    p.solve_pivot = model.solve_pivot;
    p.bounds = model.bounds;
    p.start = model.start;
    p.loglik = [&](const std::vector<double>& beta) {
        double s = 0.0;
        for (std::size_t j = 0; j < lls.size(); ++j) {
            const double psi = model.links[j](beta);
            if (!std::isfinite(psi)) return -kInf;
            s += lls[j].at(psi);
            if (s == -kInf) break;
        }
        return s;
    };
    const auto prof = profile_constrained(p, focus_grid, options);
    FusionDiagnostics diag;
    diag.optimizer_evaluations = prof.evaluations;
    const ScalarFn exact = [&](double phi) { return profile_value(p, phi, options); };
    return finish_profile(focus_grid, prof.values, &exact, options.levels, std::move(diag));
}

// ---------------------------------------------------------------------------
// prior and weights

FusionResult add_prior(const FusionResult& fused, const ConfidenceLogLik& prior,
                       const std::vector<double>& levels) {
    const auto& g = fused.profile.grid;
    const ScalarFn sum = [&](double x) { return fused.profile.at(x) + prior.at(x); };
    std::vector<double> raw(g.size());
    bool any = false;
    for (std::size_t i = 0; i < g.size(); ++i) {
        raw[i] = fused.profile.values[i] + prior.at(g[i]);
        any = any || std::isfinite(raw[i]);
    }
    if (!any) throw InvalidArgument("add_prior: prior and profile have disjoint supports");
    auto diag = fused.diagnostics;
    diag.excluded.clear();
    return finish_profile(g, std::move(raw), &sum, levels, std::move(diag));
}

ConfidenceLogLik fuse_weighted(const std::vector<ConfidenceLogLik>& lls, const std::vector<double>& weights) {
    if (lls.empty()) throw InvalidArgument("fuse_weighted: no sources");
    if (weights.size() != lls.size()) throw InvalidArgument("fuse_weighted: one weight per source required");
    double lo = -kInf, hi = kInf, total = 0.0;
    std::vector<double> pts;
    for (std::size_t j = 0; j < lls.size(); ++j) {
        const double w = weights[j];
        if (!(w >= 0.0) || !std::isfinite(w)) {
            std::ostringstream os;
            os << "fuse_weighted: weight " << j + 1 << " must be a finite non-negative number";
            throw InvalidArgument(os.str());
        }
        total += w;
        if (w == 0.0) continue;
        lo = std::max(lo, lls[j].grid.front());
        hi = std::min(hi, lls[j].grid.back());
        pts.insert(pts.end(), lls[j].grid.values().begin(), lls[j].grid.values().end());
    }
    if (total <= 0.0) throw InvalidArgument("fuse_weighted: all weights are zero");
    if (!(lo < hi)) throw InvalidArgument("fuse_weighted: source grids do not overlap");
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    pts.erase(std::remove_if(pts.begin(), pts.end(), [&](double x) { return x < lo || x > hi; }), pts.end());
    std::vector<double> v(pts.size(), 0.0);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        for (std::size_t j = 0; j < lls.size(); ++j) {
            if (weights[j] > 0.0) v[i] += weights[j] * lls[j].at(pts[i]);
        }
    }
    return ConfidenceLogLik(ParamGrid(std::move(pts)), std::move(v));
}

}  // namespace ccfuse
