#include "ccfuse/meta/tables.hpp"

#include "ccfuse/cd/io.hpp"
#include "ccfuse/error.hpp"
#include "ccfuse/numerics/parallel.hpp"
#include "ccfuse/numerics/roots.hpp"
#include "ccfuse/numerics/special.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace ccfuse {

using namespace numerics;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double xlogy(double a, double p) {
    if (a == 0.0) return 0.0;
    return p > 0.0 ? a * std::log(p) : -kInf;
}

double binom_ll(long y, long m, double p) { return xlogy(y, p) + xlogy(m - y, 1.0 - p); }

// log p and log(1 − p) for p = expit(x), without cancellation.
double log_expit(double x) { return x >= 0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x)); }

double log_sum_exp(const std::vector<double>& v) {
    const double mx = *std::max_element(v.begin(), v.end());
    if (mx == -kInf) return -kInf;
    double s = 0.0;
    for (double x : v) s += std::exp(x - mx);
    return mx + std::log(s);
}

// Maximum over [a, b] of a function that is concave there, given its
// derivative (decreasing). inf_a / inf_b: the derivative diverges at that
// end (+inf at a, -inf at b), so the end cannot be the maximiser.
double max_concave(const ScalarFn& value, const ScalarFn& score, double a, double b, bool inf_a, bool inf_b) {
    if (!(b > a)) return value(a);
    const double d = 1e-15 * (b - a);
    const double xa = inf_a ? a + d : a, xb = inf_b ? b - d : b;
    const double sa = score(xa);
    if (!(sa > 0.0)) return std::max(value(xa), value(a));
    const double sb = score(xb);
    if (!(sb < 0.0)) return std::max(value(xb), value(b));
    return value(find_root(score, {xa, xb}, 1e-14 * (1.0 + std::fabs(xb))));
}

void make_monotone(std::vector<double>& c) {
    for (std::size_t i = 1; i < c.size(); ++i) c[i] = std::max(c[i], c[i - 1]);
}

std::vector<TwoByTwoTable> informative_only(const std::vector<TwoByTwoTable>& tables) {
    std::vector<TwoByTwoTable> out;
    for (const auto& t : tables) {
        t.validate();
        if (t.informative()) out.push_back(t);
    }
    return out;
}

// Conditional model over informative tables, with the pmf coefficients
// computed once.
struct ConditionalModel {
    std::vector<Nchg> dist;
    std::vector<long> y;

    explicit ConditionalModel(const std::vector<TwoByTwoTable>& tables) {
        for (const auto& t : informative_only(tables)) {
            dist.emplace_back(t.m0, t.m1, t.z());
            y.push_back(t.y1);
        }
    }
    double loglik(double psi) const {
        double s = 0.0;
        for (std::size_t j = 0; j < dist.size(); ++j) s += dist[j].log_pmf(y[j], psi);
        return s;
    }
    // +1 when every y sits at its upper support end, -1 at the lower end.
    int unbounded_direction() const {
        bool all_hi = true, all_lo = true;
        for (std::size_t j = 0; j < dist.size(); ++j) {
            all_hi = all_hi && y[j] == dist[j].hi();
            all_lo = all_lo && y[j] == dist[j].lo();
        }
        return all_hi ? 1 : (all_lo ? -1 : 0);
    }
};

// Direction of the unrestricted per-table estimate of the measure: ±1 when
// infinite, 0 when finite, and 2 when the table carries no information.
int table_direction(const TwoByTwoTable& t, EffectMeasure m) {
    switch (m) {
    case EffectMeasure::log_odds_ratio:
        if (!t.informative()) return 2;
        if (t.y0 == 0 || t.y1 == t.m1) return 1;
        if (t.y1 == 0 || t.y0 == t.m0) return -1;
        return 0;
    case EffectMeasure::log_risk_ratio:
        if (t.z() == 0) return 2;
        if (t.y0 == 0) return 1;
        if (t.y1 == 0) return -1;
        return 0;
    case EffectMeasure::risk_difference:
        return 0;
    }
    return 0;
}

double saturated_loglik(const TwoByTwoTable& t) {
    return binom_ll(t.y0, t.m0, static_cast<double>(t.y0) / t.m0) +
           binom_ll(t.y1, t.m1, static_cast<double>(t.y1) / t.m1);
}

}  // namespace

// ---------------------------------------------------------------------------
// tables

void TwoByTwoTable::validate() const {
    if (m0 < 1 || m1 < 1 || y0 < 0 || y1 < 0 || y0 > m0 || y1 > m1) {
        std::ostringstream os;
        os << "TwoByTwoTable: need 0 <= y <= m and m >= 1 in both arms (y1=" << y1 << ", m1=" << m1
           << ", y0=" << y0 << ", m0=" << m0 << ")";
        throw InvalidArgument(os.str());
    }
}

std::vector<TwoByTwoTable> read_tables_csv(const std::string& path) {
    const auto csv = read_csv(path, {"y1", "m1", "y0", "m0"});
    std::vector<TwoByTwoTable> out;
    for (std::size_t r = 0; r < csv.rows.size(); ++r) {
        const auto& row = csv.rows[r];
        for (double v : row) {
            if (v != std::floor(v) || !std::isfinite(v)) {
                std::ostringstream os;
                os << path << ": row " << r + 2 << ": counts must be integers";
                throw InvalidArgument(os.str());
            }
        }
        TwoByTwoTable t{static_cast<long>(row[2]), static_cast<long>(row[3]), static_cast<long>(row[0]),
                        static_cast<long>(row[1])};
        try {
            t.validate();
        } catch (const InvalidArgument& e) {
            std::ostringstream os;
            os << path << ": row " << r + 2 << ": " << e.what();
            throw InvalidArgument(os.str());
        }
        out.push_back(t);
    }
    if (out.empty()) throw InvalidArgument(path + ": no tables");
    return out;
}

EffectMeasure parse_effect_measure(const std::string& name) {
    if (name == "or" || name == "log-odds-ratio") return EffectMeasure::log_odds_ratio;
    if (name == "rr" || name == "log-risk-ratio") return EffectMeasure::log_risk_ratio;
    if (name == "rd" || name == "risk-difference") return EffectMeasure::risk_difference;
    throw InvalidArgument("unknown effect measure '" + name + "' (use or, rr or rd)");
}

const char* effect_measure_name(EffectMeasure m) {
    switch (m) {
    case EffectMeasure::log_odds_ratio: return "log-odds-ratio";
    case EffectMeasure::log_risk_ratio: return "log-risk-ratio";
    case EffectMeasure::risk_difference: return "risk-difference";
    }
    return "?";
}

ParamGrid default_effect_grid(EffectMeasure m) {
    if (m == EffectMeasure::risk_difference) return ParamGrid::linspace(-1.0, 1.0, 401);
    return ParamGrid::linspace(-8.0, 8.0, 321);
}

// ---------------------------------------------------------------------------
// eccentric hypergeometric

Nchg::Nchg(long m0, long m1, long z) {
    if (m0 < 1 || m1 < 1 || z < 0 || z > m0 + m1) throw InvalidArgument("Nchg: need m0, m1 >= 1 and 0 <= z <= m0+m1");
    lo_ = std::max(0L, z - m0);
    hi_ = std::min(z, m1);
    for (long y = lo_; y <= hi_; ++y) {
        log_coef_.push_back(log_choose(static_cast<double>(m0), static_cast<double>(z - y)) +
                            log_choose(static_cast<double>(m1), static_cast<double>(y)));
    }
}

double Nchg::log_norm(double psi) const {
    std::vector<double> v(log_coef_.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = log_coef_[i] + psi * static_cast<double>(lo_ + static_cast<long>(i));
    return log_sum_exp(v);
}

double Nchg::log_pmf(long y, double psi) const {
    if (!in_support(y)) return -kInf;
    if (lo_ == hi_) return 0.0;
    return log_coef_[static_cast<std::size_t>(y - lo_)] + psi * static_cast<double>(y) - log_norm(psi);
}

std::vector<double> Nchg::pmf(double psi) const {
    std::vector<double> v(log_coef_.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = log_coef_[i] + psi * static_cast<double>(lo_ + static_cast<long>(i));
    const double ln = log_sum_exp(v);
    for (double& x : v) x = std::exp(x - ln);
    return v;
}

double Nchg::mean(double psi) const {
    const auto p = pmf(psi);
    double m = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) m += p[i] * static_cast<double>(lo_ + static_cast<long>(i));
    return m;
}

double Nchg::variance(double psi) const {
    const auto p = pmf(psi);
    const double mu = mean(psi);
    double v = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double d = static_cast<double>(lo_ + static_cast<long>(i)) - mu;
        v += p[i] * d * d;
    }
    return v;
}

double Nchg::mle(long y) const {
    if (!in_support(y)) throw InvalidArgument("Nchg::mle: observation off the support");
    if (lo_ == hi_) return std::numeric_limits<double>::quiet_NaN();
    if (y == lo_) return -kInf;
    if (y == hi_) return kInf;
    // The mean is increasing in ψ; the score is y − E_ψ Y.
    const auto f = [&](double psi) { return mean(psi) - static_cast<double>(y); };
    double a = -1.0, b = 1.0;
    while (f(a) > 0.0) a *= 2.0;
    while (f(b) < 0.0) b *= 2.0;
    return find_root(f, {a, b}, 1e-12);
}

bool nchg_in_support(long y1, long m0, long m1, long z) { return Nchg(m0, m1, z).in_support(y1); }

double nchg_pmf(long y1, double psi, long m0, long m1, long z) {
    const Nchg n(m0, m1, z);
    return n.in_support(y1) ? std::exp(n.log_pmf(y1, psi)) : 0.0;
}

// ---------------------------------------------------------------------------
// exact CDs

TableCd source_cd_or(const TwoByTwoTable& t, const std::optional<ParamGrid>& grid) {
    t.validate();
    const ParamGrid g = grid ? *grid : default_effect_grid(EffectMeasure::log_odds_ratio);
    TableCd out;
    if (!t.informative()) {
        out.informative = false;
        out.cd = ConfidenceDistribution(g, std::vector<double>(g.size(), 0.5));
        out.mass_at_minus_inf = out.mass_at_plus_inf = 0.5;
        return out;
    }
    const Nchg n(t.m0, t.m1, t.z());
    const auto k = static_cast<std::size_t>(t.y1 - n.lo());
    std::vector<double> c(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        const auto p = n.pmf(g[i]);
        double above = 0.0;
        for (std::size_t u = p.size(); u-- > k + 1;) above += p[u];
        c[i] = std::min(1.0, above + 0.5 * p[k]);
    }
    // Rounding of the summed tail can break monotonicity by an ulp.
    make_monotone(c);
    out.cd = ConfidenceDistribution(g, std::move(c));
    if (t.y1 == n.lo()) out.mass_at_minus_inf = 0.5;
    if (t.y1 == n.hi()) out.mass_at_plus_inf = 0.5;
    return out;
}

OptimalCd optimal_cd_common(const std::vector<TwoByTwoTable>& tables, const ParamGrid& grid,
                            const OptimalCdOptions& options) {
    if (options.sims < 1) throw InvalidArgument("optimal_cd_common: need at least one simulation");
    const ConditionalModel model(tables);
    OptimalCd out;
    out.informative = model.dist.size();
    if (model.dist.empty()) {
        out.flat = true;
        out.cd = ConfidenceDistribution(grid, std::vector<double>(grid.size(), 0.5));
        return out;
    }
    const std::size_t k = model.dist.size(), r_n = options.sims;
    long b = 0;
    for (long y : model.y) b += y;
    // Common uniforms for every ψ.
    std::vector<double> u(r_n * k);
    Generator gen(options.rng);
    for (double& x : u) x = gen.uniform();

    std::vector<double> c(grid.size());
    parallel_for(grid.size(), options.threads, [&](std::size_t i) {
        std::vector<std::vector<double>> cdf(k);
        for (std::size_t j = 0; j < k; ++j) {
            cdf[j] = model.dist[j].pmf(grid[i]);
            for (std::size_t s = 1; s < cdf[j].size(); ++s) cdf[j][s] += cdf[j][s - 1];
            cdf[j].back() = 1.0;
        }
        double count = 0.0;
        for (std::size_t r = 0; r < r_n; ++r) {
            long bs = 0;
            for (std::size_t j = 0; j < k; ++j) {
                const auto& f = cdf[j];
                const auto pos = std::lower_bound(f.begin(), f.end(), u[r * k + j]);
                bs += model.dist[j].lo() + static_cast<long>(pos - f.begin());
            }
            if (bs > b) count += 1.0;
            else if (bs == b) count += 0.5;
        }
        c[i] = count / static_cast<double>(r_n);
    });
    make_monotone(c);
    out.cd = ConfidenceDistribution(grid, std::move(c));
    return out;
}

OptimalCd optimal_cd_common_exact(const std::vector<TwoByTwoTable>& tables, const ParamGrid& grid) {
    const ConditionalModel model(tables);
    OptimalCd out;
    out.informative = model.dist.size();
    if (model.dist.empty()) {
        out.flat = true;
        out.cd = ConfidenceDistribution(grid, std::vector<double>(grid.size(), 0.5));
        return out;
    }
    long b = 0, base = 0;
    for (std::size_t j = 0; j < model.dist.size(); ++j) {
        b += model.y[j];
        base += model.dist[j].lo();
    }
    std::vector<double> c(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        std::vector<double> dist = {1.0};  // distribution of B − base
        for (const auto& n : model.dist) {
            const auto p = n.pmf(grid[i]);
            std::vector<double> next(dist.size() + p.size() - 1, 0.0);
            for (std::size_t a = 0; a < dist.size(); ++a) {
                if (dist[a] == 0.0) continue;
                for (std::size_t s = 0; s < p.size(); ++s) next[a + s] += dist[a] * p[s];
            }
            dist = std::move(next);
        }
        const auto kb = static_cast<std::size_t>(b - base);
        double above = 0.0;
        for (std::size_t s = dist.size(); s-- > kb + 1;) above += dist[s];
        c[i] = std::min(1.0, above + 0.5 * dist[kb]);
    }
    make_monotone(c);
    out.cd = ConfidenceDistribution(grid, std::move(c));
    return out;
}

double conditional_loglik_or(const std::vector<TwoByTwoTable>& tables, double psi) {
    return ConditionalModel(tables).loglik(psi);
}

FusionResult fused_cc_exact_or(const std::vector<TwoByTwoTable>& tables, const std::optional<ParamGrid>& grid,
                               const std::vector<double>& levels) {
    const ConditionalModel model(tables);
    if (model.dist.empty()) throw DegenerateData("fused_cc_exact_or: no informative table");
    const ParamGrid g = grid ? *grid : default_effect_grid(EffectMeasure::log_odds_ratio);
    std::vector<double> raw(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) raw[i] = model.loglik(g[i]);
    const ScalarFn exact = [&](double x) { return model.loglik(x); };
    FusionDiagnostics diag;
    if (model.dist.size() < tables.size()) {
        std::ostringstream os;
        os << tables.size() - model.dist.size() << " non-informative table(s) dropped";
        diag.notes.push_back(os.str());
    }
    const int dir = model.unbounded_direction();
    // Every log g_j tends to 0 in that direction.
    if (dir != 0) return finish_unbounded_profile(g, std::move(raw), &exact, 0.0, dir, levels, std::move(diag));
    return finish_profile(g, std::move(raw), &exact, levels, std::move(diag));
}

// ---------------------------------------------------------------------------
// profiled binomial pairs

double profile_loglik_2x2(const TwoByTwoTable& t, EffectMeasure m, double psi) {
    t.validate();
    if (std::isnan(psi)) throw InvalidArgument("profile_loglik_2x2: NaN effect");
    const long y0 = t.y0, m0 = t.m0, y1 = t.y1, m1 = t.m1, z = t.z();
    switch (m) {
    case EffectMeasure::log_odds_ratio: {
        if (z == 0 || z == m0 + m1) return 0.0;
        const auto value = [&](double th) {
            return y0 * log_expit(th) + (m0 - y0) * log_expit(-th) + y1 * log_expit(th + psi) +
                   (m1 - y1) * log_expit(-th - psi);
        };
        const auto score = [&](double th) {
            return static_cast<double>(z) - m0 / (1.0 + std::exp(-th)) - m1 / (1.0 + std::exp(-th - psi));
        };
        const double w = 40.0 + std::fabs(psi);
        return max_concave(value, score, -w, w, false, false);
    }
    case EffectMeasure::log_risk_ratio: {
        if (z == 0) return 0.0;
        const double e = std::exp(psi);
        const double u = std::min(1.0, 1.0 / e);
        const auto value = [&](double p) {
            return xlogy(y0, p) + xlogy(m0 - y0, 1.0 - p) + xlogy(y1, std::min(1.0, e * p)) +
                   xlogy(m1 - y1, 1.0 - std::min(1.0, e * p));
        };
        const auto score = [&](double p) {
            double s = z / p;
            if (m0 > y0) s -= (m0 - y0) / (1.0 - p);
            if (m1 > y1) s -= (m1 - y1) * e / (1.0 - e * p);
            return s;
        };
        const bool inf_b = (u == 1.0 && m0 > y0) || (e * u >= 1.0 && m1 > y1);
        return max_concave(value, score, 0.0, u, true, inf_b);
    }
    case EffectMeasure::risk_difference: {
        if (!(psi >= -1.0 && psi <= 1.0)) return -kInf;
        const double a = std::max(0.0, -psi), b = std::min(1.0, 1.0 - psi);
        const double one_minus = 1.0 - psi;
        const auto value = [&](double p) {
            return xlogy(y0, p) + xlogy(m0 - y0, 1.0 - p) + xlogy(y1, psi + p) + xlogy(m1 - y1, one_minus - p);
        };
        const auto score = [&](double p) {
            double s = 0.0;
            if (y0 > 0) s += y0 / p;
            if (m0 > y0) s -= (m0 - y0) / (1.0 - p);
            if (y1 > 0) s += y1 / (psi + p);
            if (m1 > y1) s -= (m1 - y1) / (one_minus - p);
            return s;
        };
        const bool inf_a = (a == 0.0 && y0 > 0) || (psi + a == 0.0 && y1 > 0);
        const bool inf_b = (b == 1.0 && m0 > y0) || (one_minus - b == 0.0 && m1 > y1);
        return max_concave(value, score, a, b, inf_a, inf_b);
    }
    }
    return -kInf;
}

FusionResult standard_iiccff(const std::vector<TwoByTwoTable>& tables, EffectMeasure m,
                             const std::optional<ParamGrid>& grid, const std::vector<double>& levels) {
    if (tables.empty()) throw InvalidArgument("standard_iiccff: no tables");
    std::vector<TwoByTwoTable> used;
    bool any_pos = false, any_neg = false, any_finite = false;
    double sup = 0.0;
    for (const auto& t : tables) {
        t.validate();
        const int d = table_direction(t, m);
        if (d == 2) continue;
        used.push_back(t);
        any_pos = any_pos || d == 1;
        any_neg = any_neg || d == -1;
        any_finite = any_finite || d == 0;
        sup += saturated_loglik(t);
    }
    if (used.empty()) throw DegenerateData("standard_iiccff: no table carries information on the effect");
    const ParamGrid g = grid ? *grid : default_effect_grid(m);
    const auto total = [&](double psi) {
        double s = 0.0;
        for (const auto& t : used) {
            s += profile_loglik_2x2(t, m, psi);
            if (s == -kInf) break;
        }
        return s;
    };
    std::vector<double> raw(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) raw[i] = total(g[i]);
    const ScalarFn exact = total;
    FusionDiagnostics diag;
    if (used.size() < tables.size()) {
        std::ostringstream os;
        os << tables.size() - used.size() << " non-informative table(s) dropped";
        diag.notes.push_back(os.str());
    }
    if (!any_finite && any_pos != any_neg) {
        return finish_unbounded_profile(g, std::move(raw), &exact, sup, any_pos ? 1 : -1, levels, std::move(diag));
    }
    return finish_profile(g, std::move(raw), &exact, levels, std::move(diag));
}

// ---------------------------------------------------------------------------
// random effects

RandomFusion conditional_random_fusion(const std::vector<TwoByTwoTable>& tables) {
    const ConditionalModel model(tables);
    if (model.dist.size() < 2) throw DegenerateData("random effects for 2x2 tables need two informative tables");
    std::vector<SourceIntegral> terms;
    for (std::size_t j = 0; j < model.dist.size(); ++j) {
        const Nchg n = model.dist[j];
        const long y = model.y[j];
        double mode = n.mle(y), scale = 1e3;
        if (std::isfinite(mode)) {
            scale = 1.0 / std::sqrt(n.variance(mode));
        } else {
            mode = 0.0;  // monotone source: the kernel alone locates the mode
        }
        terms.push_back(normal_kernel_integral([n, y](double psi) { return n.log_pmf(y, psi); }, mode, scale));
    }
    return RandomFusion(std::move(terms));
}

FusionResult random_effects_2x2(const std::vector<TwoByTwoTable>& tables, bool corrected,
                                const RandomTablesOptions& options) {
    const RandomFusion fusion = conditional_random_fusion(tables);
    ParamGrid grid = ParamGrid::linspace(-8.0, 8.0, 81);
    if (options.psi0_grid) {
        grid = *options.psi0_grid;
    } else {
        const auto fixed = fused_cc_exact_or(tables, {}, {0.9999});
        const auto& pieces = fixed.interval(0.9999).intervals;
        if (std::isfinite(fixed.estimate) && !pieces.empty() && std::isfinite(pieces.front().lo) &&
            std::isfinite(pieces.back().hi)) {
            const double half = 3.0 * std::max(fixed.estimate - pieces.front().lo, pieces.back().hi - fixed.estimate);
            grid = ParamGrid::linspace(std::max(-8.0, fixed.estimate - half), std::min(8.0, fixed.estimate + half), 81);
        }
    }
    return random_effects_psi0(fusion, grid, options.tau_max, corrected, options.levels);
}

// ---------------------------------------------------------------------------
// Mantel-Haenszel

MhResult mantel_haenszel(const std::vector<TwoByTwoTable>& tables, EffectMeasure m, double level) {
    if (tables.empty()) throw InvalidArgument("mantel_haenszel: no tables");
    if (!(level > 0.0 && level < 1.0)) throw InvalidArgument("mantel_haenszel: level outside (0, 1)");
    for (const auto& t : tables) t.validate();
    const double zq = norm_quantile(0.5 + 0.5 * level);
    MhResult r;
    const auto whole_line = [&]() {
        r.estimate = -kInf;
        r.se = kInf;
        r.lo = -kInf;
        r.hi = kInf;
        r.whole_line = true;
        return r;
    };
    switch (m) {
    case EffectMeasure::log_odds_ratio: {
        double sr = 0, ss = 0, spr = 0, sps_qr = 0, sqs = 0;
        for (const auto& t : tables) {
            const double n = static_cast<double>(t.m0 + t.m1);
            const double a = t.y1, b = t.m1 - t.y1, c = t.y0, d = t.m0 - t.y0;
            const double R = a * d / n, S = b * c / n, P = (a + d) / n, Q = (b + c) / n;
            sr += R;
            ss += S;
            spr += P * R;
            sps_qr += P * S + Q * R;
            sqs += Q * S;
        }
        if (ss == 0.0) throw UndefinedEstimate("Mantel-Haenszel odds ratio undefined: no control-arm events");
        if (sr == 0.0) return whole_line();
        r.estimate = std::log(sr / ss);
        r.se = std::sqrt(spr / (2 * sr * sr) + sps_qr / (2 * sr * ss) + sqs / (2 * ss * ss));
        break;
    }
    case EffectMeasure::log_risk_ratio: {
        double num = 0, den = 0, v = 0;
        for (const auto& t : tables) {
            const double n = static_cast<double>(t.m0 + t.m1);
            num += t.y1 * static_cast<double>(t.m0) / n;
            den += t.y0 * static_cast<double>(t.m1) / n;
            v += (static_cast<double>(t.m1) * t.m0 * (t.y1 + t.y0) - static_cast<double>(t.y1) * t.y0 * n) / (n * n);
        }
        if (den == 0.0) throw UndefinedEstimate("Mantel-Haenszel risk ratio undefined: no control-arm events");
        if (num == 0.0) return whole_line();
        r.estimate = std::log(num / den);
        r.se = std::sqrt(v / (num * den));
        break;
    }
    case EffectMeasure::risk_difference: {
        double w = 0, num = 0, v = 0;
        for (const auto& t : tables) {
            const double n = static_cast<double>(t.m0 + t.m1), n0 = t.m0, n1 = t.m1;
            w += n1 * n0 / n;
            num += (t.y1 * n0 - t.y0 * n1) / n;
            v += (t.y1 * (n1 - t.y1) * n0 * n0 * n0 + t.y0 * (n0 - t.y0) * n1 * n1 * n1) / (n1 * n0 * n * n);
        }
        r.estimate = num / w;
        r.se = std::sqrt(v) / w;
        break;
    }
    }
    r.lo = r.estimate - zq * r.se;
    r.hi = r.estimate + zq * r.se;
    return r;
}

}  // namespace ccfuse
