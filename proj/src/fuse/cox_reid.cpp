#include "ccfuse/fuse/cox_reid.hpp"

#include "ccfuse/error.hpp"
#include "ccfuse/numerics/optimize.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace ccfuse {

using namespace numerics;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check(const CoxReidProblem& p) {
    if (!p.loglik) throw InvalidArgument("cox_reid: log-likelihood missing");
    if (p.lambda_start.empty() || p.lambda_start.size() != p.lambda_bounds.size()) {
        throw InvalidArgument("cox_reid: nuisance start and bounds must have the same positive size");
    }
}

// log det of a symmetric matrix by Cholesky; nullopt if not positive definite.
std::optional<double> log_det_spd(std::vector<std::vector<double>> a) {
    const std::size_t n = a.size();
    double ld = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        double d = a[j][j];
        for (std::size_t k = 0; k < j; ++k) d -= a[j][k] * a[j][k];
        if (!(d > 0.0) || !std::isfinite(d)) return std::nullopt;
        const double l = std::sqrt(d);
        a[j][j] = l;
        ld += 2.0 * std::log(l);
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = a[i][j];
            for (std::size_t k = 0; k < j; ++k) s -= a[i][k] * a[j][k];
            a[i][j] = s / l;
        }
    }
    return ld;
}

}  // namespace

std::vector<double> maximise_nuisance(const CoxReidProblem& p, double psi, const std::vector<double>& start,
                                      int* evaluations) {
    check(p);
    int evals = 0;
    const auto inside = [&](const std::vector<double>& l) {
        for (std::size_t i = 0; i < l.size(); ++i) {
            if (l[i] < p.lambda_bounds[i].lo || l[i] > p.lambda_bounds[i].hi) return false;
        }
        return true;
    };
    const VectorFn neg = [&](const std::vector<double>& l) {
        if (!inside(l)) return kInf;
        ++evals;
        const double v = p.loglik(psi, l);
        if (std::isnan(v)) throw NumericalError("cox_reid: NaN log-likelihood");
        return v == -kInf ? kInf : -v;
    };
    std::vector<double> out;
    if (start.size() == 1) {
        const auto m = minimize_scalar([&](double x) { return neg({x}); }, p.lambda_bounds[0], 1e-10);
        out = {m.x};
    } else {
        NelderMeadOptions nm;
        nm.tol = 1e-12;
        nm.restarts = 2;
        nm.max_iter = 10000;
        out = minimize_multivariate(neg, inside(start) ? start : p.lambda_start, nm).x;
    }
    if (evaluations) *evaluations += evals;
    return out;
}

std::optional<double> cox_reid_term(const CoxReidProblem& p, double psi, const std::vector<double>& lambda) {
    const std::size_t n = lambda.size();
    std::vector<double> h(n);
    for (std::size_t i = 0; i < n; ++i) h[i] = 1e-4 * (1.0 + std::fabs(lambda[i]));
    const auto f = [&](std::vector<double> l) { return p.loglik(psi, l); };
    const double f0 = f(lambda);
    std::vector<std::vector<double>> j(n, std::vector<double>(n));
    for (std::size_t a = 0; a < n; ++a) {
        auto lp = lambda, lm = lambda;
        lp[a] += h[a];
        lm[a] -= h[a];
        j[a][a] = -(f(lp) - 2.0 * f0 + f(lm)) / (h[a] * h[a]);
        for (std::size_t b = 0; b < a; ++b) {
            auto pp = lambda, pm = lambda, mp = lambda, mm = lambda;
            pp[a] += h[a], pp[b] += h[b];
            pm[a] += h[a], pm[b] -= h[b];
            mp[a] -= h[a], mp[b] += h[b];
            mm[a] -= h[a], mm[b] -= h[b];
            j[a][b] = j[b][a] = -(f(pp) - f(pm) - f(mp) + f(mm)) / (4.0 * h[a] * h[b]);
        }
    }
    const auto ld = log_det_spd(j);
    if (!ld) return std::nullopt;
    return -0.5 * *ld;
}

CoxReidProfile cox_reid_profile(const CoxReidProblem& p, const ParamGrid& grid) {
    check(p);
    CoxReidProfile out;
    out.grid = grid;
    std::vector<double> warm = p.lambda_start;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto lam = maximise_nuisance(p, grid[i], warm, &out.evaluations);
        const double prof = p.loglik(grid[i], lam);
        const auto term = std::isfinite(prof) ? cox_reid_term(p, grid[i], lam) : std::nullopt;
        out.profile.push_back(prof);
        out.correction.push_back(term.value_or(0.0));
        out.skipped.push_back(!term.has_value());
        out.lambda_hat.push_back(lam);
        if (std::isfinite(prof)) warm = lam;
    }
    return out;
}

FusionResult cox_reid_generic(const CoxReidProblem& p, const ParamGrid& grid, const std::vector<double>& levels) {
    const auto cr = cox_reid_profile(p, grid);
    FusionDiagnostics diag;
    diag.optimizer_evaluations = cr.evaluations;
    diag.correction_applied = true;
    std::vector<double> raw(grid.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        raw[i] = cr.profile[i] + cr.correction[i];
        if (cr.skipped[i] && std::isfinite(cr.profile[i])) diag.correction_skipped_at.push_back(grid[i]);
    }
    if (!diag.correction_skipped_at.empty()) {
        std::ostringstream os;
        os << "nuisance information not positive definite at " << diag.correction_skipped_at.size()
           << " focus values; correction skipped there";
        diag.notes.push_back(os.str());
    }
    const ScalarFn exact = [&](double psi) {
        const auto lam = maximise_nuisance(p, psi, p.lambda_start);
        const double prof = p.loglik(psi, lam);
        if (!std::isfinite(prof)) return prof;
        return prof + cox_reid_term(p, psi, lam).value_or(0.0);
    };
    return finish_profile(grid, std::move(raw), &exact, levels, std::move(diag));
}

}  // namespace ccfuse
