#include "ccfuse/bench/neyman_scott.hpp"

#include "ccfuse/cd/io.hpp"
#include "ccfuse/error.hpp"
#include "ccfuse/numerics/special.hpp"

#include <algorithm>
#include <cmath>

namespace ccfuse::bench {

NeymanScottVariant parse_neyman_scott_variant(const std::string& name) {
    if (name == "gold") return NeymanScottVariant::gold;
    if (name == "standard") return NeymanScottVariant::standard;
    if (name == "corrected") return NeymanScottVariant::corrected;
    throw InvalidArgument("unknown Neyman-Scott variant '" + name + "' (expected gold, standard or corrected)");
}

const char* neyman_scott_variant_name(NeymanScottVariant v) {
    switch (v) {
        case NeymanScottVariant::gold: return "gold";
        case NeymanScottVariant::standard: return "standard";
        case NeymanScottVariant::corrected: return "corrected";
    }
    return "?";
}

double neyman_scott_ss(const NeymanScottData& data) {
    if (data.size() < 2) throw InvalidArgument("neyman_scott: need at least 2 pairs");
    double ss = 0.0;
    for (const auto& [a, b] : data) {
        if (!std::isfinite(a) || !std::isfinite(b)) throw InvalidArgument("neyman_scott: non-finite observation");
        ss += 0.5 * (a - b) * (a - b);
    }
    if (!(ss > 0.0)) throw DegenerateData("neyman_scott: all pairs identical, σ̂ = 0");
    return ss;
}

namespace {

// Profile weight: ℓ(σ) = −c·k log σ − ½ΣS²/σ².
double profile_weight(NeymanScottVariant v) { return v == NeymanScottVariant::standard ? 2.0 : 1.0; }

double cc_at(NeymanScottVariant v, double ss, double k, double sigma) {
    const double u = ss / (sigma * sigma);
    if (v == NeymanScottVariant::gold) return std::abs(2.0 * numerics::chi2_cdf(u, k) - 1.0);
    const double c = profile_weight(v);
    const double t = u / (c * k);  // σ̂²/σ²
    const double d = std::max(0.0, c * k * (t - 1.0 - std::log(t)));
    return numerics::chi2_cdf(d, 1.0);
}

}  // namespace

double neyman_scott_estimate(const NeymanScottData& data, NeymanScottVariant v) {
    const double ss = neyman_scott_ss(data);
    const double k = static_cast<double>(data.size());
    if (v == NeymanScottVariant::gold) return std::sqrt(ss / numerics::chi2_quantile(0.5, k));
    return std::sqrt(ss / (profile_weight(v) * k));
}

ConfidenceCurve neyman_scott(const NeymanScottData& data, NeymanScottVariant v, const std::optional<ParamGrid>& grid) {
    const double ss = neyman_scott_ss(data);
    const double k = static_cast<double>(data.size());
    const double est = neyman_scott_estimate(data, v);
    ParamGrid base;
    if (grid) {
        base = *grid;
        if (!(base.front() > 0.0)) throw InvalidArgument("neyman_scott: σ grid must be positive");
    } else {
        const double s = std::sqrt(ss / k);
        base = ParamGrid::linspace(0.2 * s, 4.0 * s, 801);
    }
    const ParamGrid g = base.contains(est) ? ParamGrid::merged(base.values(), {est}) : base;
    std::vector<double> values(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) values[i] = g[i] == est ? 0.0 : cc_at(v, ss, k, g[i]);
    return {g, std::move(values)};
}

NeymanScottData neyman_scott_sample(std::size_t k, double sigma, double mu_lo, double mu_hi,
                                    numerics::Generator& gen) {
    if (!(sigma > 0.0)) throw InvalidArgument("neyman_scott_sample: σ must be positive");
    NeymanScottData out(k);
    for (auto& [a, b] : out) {
        const double mu = gen.uniform(mu_lo, mu_hi);
        a = gen.normal(mu, sigma);
        b = gen.normal(mu, sigma);
    }
    return out;
}

NeymanScottData read_neyman_scott_csv(const std::string& path) {
    const auto t = read_csv(path, {"y1", "y2"});
    NeymanScottData out;
    out.reserve(t.rows.size());
    for (const auto& r : t.rows) out.emplace_back(r[0], r[1]);
    return out;
}

double sup_distance(const ConfidenceCurve& a, const ConfidenceCurve& b, std::size_t points) {
    const double lo = std::max(a.grid.front(), b.grid.front());
    const double hi = std::min(a.grid.back(), b.grid.back());
    if (!(hi > lo)) throw InvalidArgument("sup_distance: curves share no range");
    if (points < 2) throw InvalidArgument("sup_distance: need at least 2 points");
    double m = 0.0;
    for (std::size_t i = 0; i < points; ++i) {
        const double x = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
        m = std::max(m, std::abs(a.at(x) - b.at(x)));
    }
    return m;
}

}  // namespace ccfuse::bench
