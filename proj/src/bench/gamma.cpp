#include "ccfuse/bench/gamma.hpp"

#include "ccfuse/error.hpp"
#include "ccfuse/numerics/parallel.hpp"
#include "ccfuse/numerics/roots.hpp"
#include "ccfuse/numerics/special.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ccfuse::bench {

using numerics::Generator;
using numerics::RngStream;

namespace {

void check_positive_grid(const ParamGrid& grid, const char* who) {
    if (grid.size() < 2) throw InvalidArgument(std::string(who) + ": grid needs at least 2 points");
    if (!(grid.front() > 0.0)) throw InvalidArgument(std::string(who) + ": θ grid must be positive");
}

// 1e-300 .. 1 - 1e-16 keeps Φ⁻¹ finite.
double clamp_prob(double p) { return std::clamp(p, 1e-300, 1.0 - 1e-16); }

std::vector<double> tabulate(const ParamGrid& grid, const std::function<double(double)>& f) {
    std::vector<double> v(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) v[i] = f(grid[i]);
    return v;
}

}  // namespace

void validate_gamma_sources(const std::vector<GammaSource>& sources) {
    if (sources.empty()) throw InvalidArgument("gamma sources: need at least one source");
    for (std::size_t j = 0; j < sources.size(); ++j) {
        const auto& s = sources[j];
        if (!(s.a > 0.0) || !std::isfinite(s.a))
            throw InvalidArgument("gamma sources: shape of source " + std::to_string(j) + " must be positive");
        if (!(s.y > 0.0) || !std::isfinite(s.y))
            throw InvalidArgument("gamma sources: y of source " + std::to_string(j) + " must be positive");
    }
}

double gamma_a_dot(const std::vector<GammaSource>& sources) {
    double s = 0.0;
    for (const auto& x : sources) s += x.a;
    return s;
}

double gamma_y_dot(const std::vector<GammaSource>& sources) {
    double s = 0.0;
    for (const auto& x : sources) s += x.y;
    return s;
}

ConfidenceDistribution gamma_cd(double a, double y, const ParamGrid& grid) {
    validate_gamma_sources({{a, y}});
    check_positive_grid(grid, "gamma_cd");
    return {grid, tabulate(grid, [&](double t) { return numerics::gamma_cdf(t * y, a); })};
}

double gamma_fused_cdf(const std::vector<GammaSource>& sources, double theta) {
    return numerics::gamma_cdf(theta * gamma_y_dot(sources), gamma_a_dot(sources));
}

ConfidenceDistribution gamma_fused_cd(const std::vector<GammaSource>& sources, const ParamGrid& grid) {
    validate_gamma_sources(sources);
    check_positive_grid(grid, "gamma_fused_cd");
    const double a = gamma_a_dot(sources), y = gamma_y_dot(sources);
    return {grid, tabulate(grid, [&](double t) { return numerics::gamma_cdf(t * y, a); })};
}

double gamma_ml(const std::vector<GammaSource>& sources) {
    validate_gamma_sources(sources);
    return gamma_a_dot(sources) / gamma_y_dot(sources);
}

double gamma_deviance(const std::vector<GammaSource>& sources, double theta) {
    if (!(theta > 0.0)) throw InvalidArgument("gamma_deviance: θ must be positive");
    const double a = gamma_a_dot(sources);
    const double ml = a / gamma_y_dot(sources);
    const double d = 2.0 * a * (std::log(ml / theta) - (ml - theta) / ml);
    return std::max(d, 0.0);
}

// ---------------------------------------------------------------------------
// deviance law

GammaDevianceLaw::GammaDevianceLaw(double a_dot, std::size_t sims, RngStream rng) : a_dot_(a_dot) {
    if (!(a_dot > 0.0)) throw InvalidArgument("GammaDevianceLaw: a· must be positive");
    if (sims < 1000) throw InvalidArgument("GammaDevianceLaw: need at least 1000 simulations");
    Generator gen(rng);
    draws_.resize(sims);
    for (auto& d : draws_) {
        const double v = gen.gamma(a_dot) / a_dot;
        d = std::max(0.0, 2.0 * a_dot * (v - 1.0 - std::log(v)));
    }
    std::sort(draws_.begin(), draws_.end());
}

double GammaDevianceLaw::cdf(double d) const {
    const auto it = std::upper_bound(draws_.begin(), draws_.end(), d);
    return static_cast<double>(it - draws_.begin()) / static_cast<double>(draws_.size());
}

double GammaDevianceLaw::quantile(double p) const {
    if (!(p > 0.0 && p <= 1.0)) throw InvalidArgument("GammaDevianceLaw::quantile: p outside (0, 1]");
    const double n = static_cast<double>(draws_.size());
    const auto i = static_cast<std::size_t>(std::ceil(p * n - 1e-9));
    return draws_[std::min(draws_.size(), std::max<std::size_t>(i, 1)) - 1];
}

ConfidenceCurve gamma_exact_cc(const std::vector<GammaSource>& sources, const ParamGrid& grid, std::size_t sims,
                               RngStream rng) {
    validate_gamma_sources(sources);
    return gamma_exact_cc(sources, grid, GammaDevianceLaw(gamma_a_dot(sources), sims, rng));
}

ConfidenceCurve gamma_exact_cc(const std::vector<GammaSource>& sources, const ParamGrid& grid,
                               const GammaDevianceLaw& law) {
    validate_gamma_sources(sources);
    check_positive_grid(grid, "gamma_exact_cc");
    if (std::abs(law.a_dot() - gamma_a_dot(sources)) > 1e-9 * law.a_dot())
        throw InvalidArgument("gamma_exact_cc: deviance law simulated for a different a·");
    return {grid, tabulate(grid, [&](double t) { return law.cdf(gamma_deviance(sources, t)); })};
}

// ---------------------------------------------------------------------------
// competitors

DensityEstimate gamma_density_estimator(const std::vector<GammaSource>& sources) {
    validate_gamma_sources(sources);
    const double a = gamma_a_dot(sources);
    const double k = static_cast<double>(sources.size());
    return {(a - k) / gamma_y_dot(sources), a > k};
}

double gamma_density_cdf(const std::vector<GammaSource>& sources, double theta) {
    const double shape = gamma_a_dot(sources) - static_cast<double>(sources.size()) + 1.0;
    if (!(shape > 0.0)) throw DegenerateData("gamma_density_cdf: a· - k + 1 <= 0, density not normalisable");
    return numerics::gamma_cdf(theta * gamma_y_dot(sources), shape);
}

double gamma_sxs_cdf(const std::vector<GammaSource>& sources, double theta) {
    if (!(theta > 0.0)) return 0.0;
    const double a = gamma_a_dot(sources);
    double z = 0.0;
    for (const auto& s : sources) {
        const double c = clamp_prob(numerics::gamma_cdf(theta * s.y, s.a));
        z += std::sqrt(s.a / a) * numerics::norm_quantile(c);
    }
    return numerics::norm_cdf(z);
}

ConfidenceDistribution gamma_sxs_cd(const std::vector<GammaSource>& sources, const ParamGrid& grid) {
    validate_gamma_sources(sources);
    check_positive_grid(grid, "gamma_sxs_cd");
    return {grid, tabulate(grid, [&](double t) { return gamma_sxs_cdf(sources, t); })};
}

namespace {

// Inverse of an increasing c.d.f. on θ > 0, solved in log θ from `centre`.
double positive_quantile(const std::function<double(double)>& cdf, double p, double centre) {
    const auto f = [&](double u) { return cdf(std::exp(u)) - p; };
    double lo = centre - 1.0, hi = centre + 1.0;
    for (int i = 0; f(lo) > 0.0; ++i) {
        if (i > 60) throw BracketError("CD quantile: no lower bracket");
        lo -= std::ldexp(1.0, i);
    }
    for (int i = 0; f(hi) < 0.0; ++i) {
        if (i > 60) throw BracketError("CD quantile: no upper bracket");
        hi += std::ldexp(1.0, i);
    }
    return std::exp(numerics::find_root(f, {lo, hi}, 1e-12));
}

}  // namespace

double gamma_sxs_quantile(const std::vector<GammaSource>& sources, double p) {
    validate_gamma_sources(sources);
    if (!(p > 0.0 && p < 1.0)) throw InvalidArgument("gamma_sxs_quantile: p must lie in (0, 1)");
    return positive_quantile([&](double t) { return gamma_sxs_cdf(sources, t); }, p, std::log(gamma_ml(sources)));
}

// ---------------------------------------------------------------------------
// risk

RiskEstimate confidence_risk(const DataSampler& data, const CdSampler& cd, double truth, std::size_t sims,
                             RngStream rng, int threads) {
    if (sims < 2) throw InvalidArgument("confidence_risk: need at least 2 simulations");
    std::vector<double> loss(sims);
    numerics::parallel_for(sims, threads, [&](std::size_t i) {
        Generator gen(rng.child(i));
        const auto y = data(gen);
        loss[i] = std::abs(cd(y, gen) - truth);
    });
    double m = 0.0;
    for (double x : loss) m += x;
    m /= static_cast<double>(sims);
    double ss = 0.0;
    for (double x : loss) ss += (x - m) * (x - m);
    const double sd = std::sqrt(ss / static_cast<double>(sims - 1));
    return {m, sd / std::sqrt(static_cast<double>(sims)), sims};
}

const char* gamma_method_name(GammaMethod m) {
    switch (m) {
        case GammaMethod::optimal: return "optimal";
        case GammaMethod::sxs: return "sxs";
        case GammaMethod::density: return "density";
    }
    return "?";
}

double gamma_method_cdf(GammaMethod m, const std::vector<GammaSource>& sources, double theta) {
    switch (m) {
        case GammaMethod::optimal: return gamma_fused_cdf(sources, theta);
        case GammaMethod::sxs: return gamma_sxs_cdf(sources, theta);
        case GammaMethod::density: return gamma_density_cdf(sources, theta);
    }
    throw InvalidArgument("gamma_method_cdf: unknown method");
}

double gamma_method_quantile(GammaMethod m, const std::vector<GammaSource>& sources, double p) {
    validate_gamma_sources(sources);
    if (!(p > 0.0 && p < 1.0)) throw InvalidArgument("gamma_method_quantile: p must lie in (0, 1)");
    if (m == GammaMethod::sxs) return gamma_sxs_quantile(sources, p);
    return positive_quantile([&](double t) { return gamma_method_cdf(m, sources, t); }, p,
                             std::log(gamma_ml(sources)));
}

double gamma_cd_draw(GammaMethod m, const std::vector<GammaSource>& sources, Generator& gen) {
    const double a = gamma_a_dot(sources), y = gamma_y_dot(sources);
    switch (m) {
        case GammaMethod::optimal: return gen.gamma(a) / y;
        case GammaMethod::density: {
            const double shape = a - static_cast<double>(sources.size()) + 1.0;
            if (!(shape > 0.0)) throw DegenerateData("gamma_cd_draw: a· - k + 1 <= 0");
            return gen.gamma(shape) / y;
        }
        case GammaMethod::sxs: return gamma_sxs_quantile(sources, gen.uniform());
    }
    throw InvalidArgument("gamma_cd_draw: unknown method");
}

RiskEstimate gamma_risk(GammaMethod m, const std::vector<double>& shapes, double theta, std::size_t sims,
                        RngStream rng, int threads) {
    if (!(theta > 0.0)) throw InvalidArgument("gamma_risk: θ must be positive");
    for (double a : shapes)
        if (!(a > 0.0)) throw InvalidArgument("gamma_risk: shapes must be positive");
    const DataSampler data = [&](Generator& gen) {
        std::vector<double> y(shapes.size());
        for (std::size_t j = 0; j < y.size(); ++j) y[j] = gen.gamma(shapes[j], theta);
        return y;
    };
    const CdSampler cd = [&](const std::vector<double>& y, Generator& gen) {
        std::vector<GammaSource> s(y.size());
        for (std::size_t j = 0; j < y.size(); ++j) s[j] = {shapes[j], y[j]};
        return gamma_cd_draw(m, s, gen);
    };
    return confidence_risk(data, cd, theta, sims, rng, threads);
}

RiskEstimate gamma_r0(double a_dot, std::size_t sims, RngStream rng) {
    if (!(a_dot > 0.0)) throw InvalidArgument("gamma_r0: a· must be positive");
    if (sims < 2) throw InvalidArgument("gamma_r0: need at least 2 simulations");
    Generator gen(rng);
    double m = 0.0, ss = 0.0;
    for (std::size_t i = 0; i < sims; ++i) {
        const double x = std::abs(gen.gamma(a_dot) / gen.gamma(a_dot) - 1.0);
        const double d = x - m;
        m += d / static_cast<double>(i + 1);
        ss += d * (x - m);
    }
    const double sd = std::sqrt(ss / static_cast<double>(sims - 1));
    return {m, sd / std::sqrt(static_cast<double>(sims)), sims};
}

}  // namespace ccfuse::bench
