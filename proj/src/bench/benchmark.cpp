#include "ccfuse/bench/benchmark.hpp"

#include "ccfuse/bench/gamma.hpp"
#include "ccfuse/bench/neyman_scott.hpp"
#include "ccfuse/cd/summary.hpp"
#include "ccfuse/error.hpp"
#include "ccfuse/numerics/parallel.hpp"
#include "ccfuse/numerics/roots.hpp"
#include "ccfuse/numerics/special.hpp"
#include "ccfuse/numerics/stats_tests.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <memory>
#include <set>
#include <sstream>

namespace ccfuse::bench {

using nlohmann::json;
using numerics::Generator;
using numerics::RngStream;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double expit(double x) { return 1.0 / (1.0 + std::exp(-x)); }
double logit(double p) { return std::log(p / (1.0 - p)); }

// JSON has no inf/NaN: infinities become strings, NaN becomes null.
json num(double x) {
    if (std::isnan(x)) return nullptr;
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    return x;
}

std::string csv_num(double x) {
    if (std::isnan(x)) return "";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    std::ostringstream os;
    os.precision(10);
    os << x;
    return os.str();
}

template <class T>
T take(const json& obj, const char* key, T fallback) {
    return obj.contains(key) ? obj.at(key).get<T>() : fallback;
}

void reject_unknown(const json& obj, const std::set<std::string>& known, const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (!known.count(it.key())) throw InvalidArgument("scenario: unknown key '" + it.key() + "' in " + where);
    }
}

void require(const json& obj, const char* key, const std::string& kind) {
    if (!obj.contains(key))
        throw InvalidArgument("scenario: kind " + kind + " requires params." + std::string(key));
}

}  // namespace

// ---------------------------------------------------------------------------
// scenario

ScenarioKind parse_scenario_kind(const std::string& name) {
    if (name == "basic-re") return ScenarioKind::basic_re;
    if (name == "fixed-2x2") return ScenarioKind::fixed_2x2;
    if (name == "random-2x2") return ScenarioKind::random_2x2;
    if (name == "gamma-proto") return ScenarioKind::gamma_proto;
    if (name == "neyman-scott") return ScenarioKind::neyman_scott;
    throw InvalidArgument("unknown scenario kind '" + name +
                          "' (expected basic-re, fixed-2x2, random-2x2, gamma-proto or neyman-scott)");
}

const char* scenario_kind_name(ScenarioKind k) {
    switch (k) {
        case ScenarioKind::basic_re: return "basic-re";
        case ScenarioKind::fixed_2x2: return "fixed-2x2";
        case ScenarioKind::random_2x2: return "random-2x2";
        case ScenarioKind::gamma_proto: return "gamma-proto";
        case ScenarioKind::neyman_scott: return "neyman-scott";
    }
    return "?";
}

Scenario Scenario::from_json(const json& j) {
    if (!j.is_object()) throw InvalidArgument("scenario: expected a JSON object");
    reject_unknown(j, {"name", "kind", "reps", "seed", "level", "methods", "fair_drop", "params"}, "scenario");
    if (!j.contains("kind")) throw InvalidArgument("scenario: missing 'kind'");
    Scenario s;
    try {
        s.kind = parse_scenario_kind(j.at("kind").get<std::string>());
        s.name = take<std::string>(j, "name", scenario_kind_name(s.kind));
        s.reps = take<std::size_t>(j, "reps", s.reps);
        s.seed = take<std::uint64_t>(j, "seed", s.seed);
        s.level = take<double>(j, "level", s.level);
        s.methods = take<std::vector<std::string>>(j, "methods", {});
        if (j.contains("fair_drop")) s.fair_drop = j.at("fair_drop").get<bool>();
        const json p = take<json>(j, "params", json::object());
        if (!p.is_object()) throw InvalidArgument("scenario: 'params' must be an object");
        const std::string kind = scenario_kind_name(s.kind);
        switch (s.kind) {
            case ScenarioKind::basic_re:
                reject_unknown(p, {"k", "psi0", "tau", "m_lo", "m_hi", "sd"}, "params");
                require(p, "k", kind);
                require(p, "tau", kind);
                s.k = p.at("k").get<std::size_t>();
                s.tau = p.at("tau").get<double>();
                s.psi0 = take(p, "psi0", s.psi0);
                s.m_lo = take(p, "m_lo", s.m_lo);
                s.m_hi = take(p, "m_hi", s.m_hi);
                s.sd = take(p, "sd", s.sd);
                break;
            case ScenarioKind::fixed_2x2:
            case ScenarioKind::random_2x2: {
                const bool random = s.kind == ScenarioKind::random_2x2;
                if (random) {
                    s.p0 = 0.2;
                    s.theta_sd = 0.3;
                    s.m1_lo = 10;
                    s.m1_hi = 50;
                    s.ratio_lo = s.ratio_hi = 1.0;
                }
                std::set<std::string> known = {"k",     "psi",   "p0",       "theta_sd", "m1_lo",
                                               "m1_hi", "ratio_lo", "ratio_hi", "measure"};
                if (random) known.insert("tau");
                reject_unknown(p, known, "params");
                require(p, "k", kind);
                require(p, "psi", kind);
                if (random) require(p, "tau", kind);
                s.k = p.at("k").get<std::size_t>();
                s.psi = p.at("psi").get<double>();
                if (random) s.tau = p.at("tau").get<double>();
                if (p.contains("measure")) s.measure = parse_effect_measure(p.at("measure").get<std::string>());
                s.p0 = take(p, "p0", s.p0);
                s.theta_sd = take(p, "theta_sd", s.theta_sd);
                s.m1_lo = take(p, "m1_lo", s.m1_lo);
                s.m1_hi = take(p, "m1_hi", s.m1_hi);
                s.ratio_lo = take(p, "ratio_lo", s.ratio_lo);
                s.ratio_hi = take(p, "ratio_hi", s.ratio_hi);
                break;
            }
            case ScenarioKind::gamma_proto:
                reject_unknown(p, {"shapes", "theta", "sims"}, "params");
                require(p, "shapes", kind);
                require(p, "theta", kind);
                s.shapes = p.at("shapes").get<std::vector<double>>();
                s.theta = p.at("theta").get<double>();
                s.sims = take(p, "sims", s.sims);
                s.k = s.shapes.size();
                break;
            case ScenarioKind::neyman_scott:
                reject_unknown(p, {"k", "sigma", "mu_lo", "mu_hi"}, "params");
                require(p, "k", kind);
                require(p, "sigma", kind);
                s.k = p.at("k").get<std::size_t>();
                s.sigma = p.at("sigma").get<double>();
                s.mu_lo = take(p, "mu_lo", s.mu_lo);
                s.mu_hi = take(p, "mu_hi", s.mu_hi);
                break;
        }
    } catch (const json::exception& e) {
        throw InvalidArgument(std::string("scenario: ") + e.what());
    }
    s.validate();
    return s;
}

Scenario Scenario::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open scenario file '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw InvalidArgument("scenario file '" + path + "': " + e.what());
    }
    return from_json(j);
}

json Scenario::to_json() const {
    json p = json::object();
    switch (kind) {
        case ScenarioKind::basic_re:
            p = {{"k", k}, {"psi0", psi0}, {"tau", tau}, {"m_lo", m_lo}, {"m_hi", m_hi}, {"sd", sd}};
            break;
        case ScenarioKind::fixed_2x2:
        case ScenarioKind::random_2x2:
            p = {{"k", k},         {"psi", psi},         {"p0", p0},
                 {"theta_sd", theta_sd}, {"m1_lo", m1_lo}, {"m1_hi", m1_hi},
                 {"ratio_lo", ratio_lo}, {"ratio_hi", ratio_hi}, {"measure", effect_measure_name(measure)}};
            if (kind == ScenarioKind::random_2x2) p["tau"] = tau;
            break;
        case ScenarioKind::gamma_proto: p = {{"shapes", shapes}, {"theta", theta}, {"sims", sims}}; break;
        case ScenarioKind::neyman_scott:
            p = {{"k", k}, {"sigma", sigma}, {"mu_lo", mu_lo}, {"mu_hi", mu_hi}};
            break;
    }
    json j = {{"name", name}, {"kind", scenario_kind_name(kind)}, {"reps", reps}, {"seed", seed},
              {"level", level}, {"methods", methods}, {"params", p}};
    if (fair_drop) j["fair_drop"] = *fair_drop;
    return j;
}

void Scenario::validate() const {
    auto fail = [&](const std::string& msg) { throw InvalidArgument("scenario '" + name + "': " + msg); };
    if (reps < 100) fail("reps must be at least 100");
    if (!(level > 0.0 && level < 1.0)) fail("level must lie in (0, 1)");
    switch (kind) {
        case ScenarioKind::basic_re:
            if (k < 2) fail("k must be at least 2");
            if (!(tau >= 0.0)) fail("tau must be >= 0");
            if (m_lo < 2 || m_hi < m_lo) fail("need 2 <= m_lo <= m_hi");
            if (!(sd > 0.0)) fail("sd must be positive");
            break;
        case ScenarioKind::fixed_2x2:
        case ScenarioKind::random_2x2:
            if (k < 1) fail("k must be at least 1");
            if (!(p0 > 0.0 && p0 < 1.0)) fail("p0 must lie in (0, 1)");
            if (!(theta_sd >= 0.0)) fail("theta_sd must be >= 0");
            if (m1_lo < 1 || m1_hi < m1_lo) fail("need 1 <= m1_lo <= m1_hi");
            if (!(ratio_lo > 0.0 && ratio_hi >= ratio_lo)) fail("need 0 < ratio_lo <= ratio_hi");
            if (kind == ScenarioKind::random_2x2) {
                if (measure != EffectMeasure::log_odds_ratio) fail("random-2x2 supports the log odds ratio only");
                if (!(tau >= 0.0)) fail("tau must be >= 0");
            }
            if (measure == EffectMeasure::risk_difference && !(psi > -1.0 && psi < 1.0))
                fail("risk difference must lie in (-1, 1)");
            if (fair_drop && *fair_drop && measure == EffectMeasure::risk_difference)
                fail("fair_drop applies to the log odds ratio and log risk ratio");
            break;
        case ScenarioKind::gamma_proto:
            if (shapes.empty()) fail("shapes must not be empty");
            for (double a : shapes)
                if (!(a > 0.0)) fail("shapes must be positive");
            if (!(theta > 0.0)) fail("theta must be positive");
            if (sims < 1000) fail("sims must be at least 1000");
            break;
        case ScenarioKind::neyman_scott:
            if (k < 2) fail("k must be at least 2");
            if (!(sigma > 0.0)) fail("sigma must be positive");
            if (!(mu_hi >= mu_lo)) fail("need mu_lo <= mu_hi");
            break;
    }
    if (!methods.empty()) {
        const auto avail = available_methods(*this);
        for (const auto& m : methods) {
            if (std::find(avail.begin(), avail.end(), m) == avail.end()) {
                std::string list;
                for (const auto& a : avail) list += (list.empty() ? "" : ", ") + a;
                fail("unknown method '" + m + "' for kind " + scenario_kind_name(kind) + " (available: " + list + ")");
            }
        }
    }
}

double Scenario::truth() const {
    switch (kind) {
        case ScenarioKind::basic_re: return psi0;
        case ScenarioKind::fixed_2x2:
        case ScenarioKind::random_2x2: return psi;
        case ScenarioKind::gamma_proto: return theta;
        case ScenarioKind::neyman_scott: return sigma;
    }
    return kNaN;
}

bool Scenario::fair_drop_enabled() const {
    if (fair_drop) return *fair_drop;
    return kind == ScenarioKind::fixed_2x2 && measure != EffectMeasure::risk_difference;
}

std::vector<std::string> available_methods(const Scenario& s) {
    switch (s.kind) {
        case ScenarioKind::basic_re: return {"standard", "corrected", "hksj", "sxs"};
        case ScenarioKind::fixed_2x2:
            if (s.measure == EffectMeasure::log_odds_ratio) return {"standard", "exact", "optimal", "mh"};
            return {"standard", "mh"};
        case ScenarioKind::random_2x2: return {"standard", "corrected", "mh"};
        case ScenarioKind::gamma_proto: return {"optimal", "sxs", "density", "exact-cc"};
        case ScenarioKind::neyman_scott: return {"gold", "standard", "corrected"};
    }
    return {};
}

// ---------------------------------------------------------------------------
// data

NormalREInput simulate_basic_re(const Scenario& s, Generator& gen) {
    std::vector<double> y(s.k), sigma(s.k);
    for (std::size_t j = 0; j < s.k; ++j) {
        const auto m = gen.uniform_int(s.m_lo, s.m_hi);
        const double psi_j = gen.normal(s.psi0, s.tau);
        double mean = 0.0, ss = 0.0;
        for (std::int64_t i = 0; i < m; ++i) {
            const double x = gen.normal(psi_j, s.sd);
            const double d = x - mean;
            mean += d / static_cast<double>(i + 1);
            ss += d * (x - mean);
        }
        y[j] = mean;
        sigma[j] = std::sqrt(ss / static_cast<double>(m - 1) / static_cast<double>(m));
    }
    return {std::move(y), std::move(sigma)};
}

std::vector<TwoByTwoTable> simulate_tables(const Scenario& s, Generator& gen) {
    std::vector<TwoByTwoTable> out(s.k);
    const double centre = logit(s.p0);
    for (auto& t : out) {
        const double theta = gen.normal(centre, s.theta_sd);
        t.m1 = static_cast<long>(gen.uniform_int(s.m1_lo, s.m1_hi));
        const double r = s.ratio_lo == s.ratio_hi ? s.ratio_lo : gen.uniform(s.ratio_lo, s.ratio_hi);
        t.m0 = std::max(1L, std::lround(r * static_cast<double>(t.m1)));
        const double q0 = expit(theta);
        double q1 = 0.0;
        if (s.kind == ScenarioKind::random_2x2) {
            q1 = expit(theta + gen.normal(s.psi, s.tau));
        } else {
            switch (s.measure) {
                case EffectMeasure::log_odds_ratio: q1 = expit(theta + s.psi); break;
                case EffectMeasure::log_risk_ratio: q1 = std::min(1.0, q0 * std::exp(s.psi)); break;
                case EffectMeasure::risk_difference: q1 = std::clamp(q0 + s.psi, 0.0, 1.0); break;
            }
        }
        t.y0 = static_cast<long>(gen.binomial(t.m0, q0));
        t.y1 = static_cast<long>(gen.binomial(t.m1, q1));
    }
    return out;
}

// ---------------------------------------------------------------------------
// method outcomes

namespace {

Outcome from_region(const std::vector<IntervalPiece>& pieces, double estimate, double truth, double cc_truth) {
    if (pieces.empty()) throw NumericalError("empty confidence region");
    Outcome o;
    o.estimate = estimate;
    o.lo = pieces.front().lo;
    o.hi = pieces.back().hi;
    o.width = 0.0;
    for (const auto& p : pieces) {
        o.width += p.hi - p.lo;
        if (truth >= p.lo && truth <= p.hi) o.covered = true;
    }
    o.cc_truth = cc_truth;
    o.loss = kNaN;
    return o;
}

Outcome from_interval(double lo, double hi, double estimate, double truth, double cc_truth) {
    return from_region({{lo, hi}}, estimate, truth, cc_truth);
}

Outcome from_fusion(const FusionResult& r, double level, double truth) {
    const auto& s = r.interval(level);
    return from_region(s.intervals, r.estimate, truth, r.cc.at(truth));
}

// Equal-tailed interval and median of a tabulated CD; C not reaching a tail
// probability within the grid means that end of the interval is infinite.
Outcome from_cd(const ConfidenceDistribution& cd, double level, double truth) {
    const double a = 0.5 * (1.0 - level);
    auto q = [&](double p) {
        if (cd.values.front() >= p) return -kInf;
        if (cd.values.back() < p) return kInf;
        return cd.quantile(p);
    };
    const double c = cd.grid.contains(truth) ? cd.at(truth) : (truth < cd.grid.front() ? 0.0 : 1.0);
    return from_interval(q(a), q(1.0 - a), q(0.5), truth, std::abs(1.0 - 2.0 * c));
}

Outcome from_mh(const MhResult& r, double truth) {
    if (r.whole_line) return from_interval(-kInf, kInf, r.estimate, truth, kNaN);
    const double c = numerics::norm_cdf((truth - r.estimate) / r.se);
    return from_interval(r.lo, r.hi, r.estimate, truth, std::abs(2.0 * c - 1.0));
}

struct GammaContext {
    std::unique_ptr<GammaDevianceLaw> law;
};

Outcome run_basic_re(const std::string& m, const Scenario& s, const NormalREInput& in) {
    const double truth = s.truth();
    if (m == "standard" || m == "corrected") return from_fusion(profile_psi0(in, m == "corrected", {}, {s.level}), s.level, truth);
    if (m == "hksj") {
        const auto h = hksj_interval(in, s.level);
        const double t = (truth - h.estimate) / std::sqrt(h.variance);
        const double c = numerics::t_cdf(t, static_cast<double>(in.k() - 1));
        return from_interval(h.lo, h.hi, h.estimate, truth, std::abs(2.0 * c - 1.0));
    }
    if (m == "sxs") {
        // Normal CDs with the REML heterogeneity added to each variance,
        // weights proportional to the inverse total standard deviations.
        const double tau = hksj_interval(in, s.level).tau;
        const ParamGrid grid = default_psi0_grid(in);
        std::vector<ConfidenceDistribution> cds;
        std::vector<double> w;
        double ss = 0.0;
        for (std::size_t j = 0; j < in.k(); ++j) {
            const double sd = std::sqrt(in.sigma[j] * in.sigma[j] + tau * tau);
            std::vector<double> v(grid.size());
            for (std::size_t i = 0; i < grid.size(); ++i) v[i] = numerics::norm_cdf((grid[i] - in.y[j]) / sd);
            cds.emplace_back(grid, std::move(v));
            w.push_back(1.0 / sd);
            ss += 1.0 / (sd * sd);
        }
        for (double& x : w) x /= std::sqrt(ss);
        return from_cd(sxs_combine(cds, w, grid), s.level, truth);
    }
    throw InvalidArgument("unknown method '" + m + "'");
}

Outcome run_tables(const std::string& m, const Scenario& s, const std::vector<TwoByTwoTable>& tables) {
    const double truth = s.truth();
    if (m == "mh") return from_mh(mantel_haenszel(tables, s.measure, s.level), truth);
    if (s.kind == ScenarioKind::random_2x2) {
        if (m != "standard" && m != "corrected") throw InvalidArgument("unknown method '" + m + "'");
        RandomTablesOptions opt;
        opt.levels = {s.level};
        const auto r = random_effects_2x2(tables, m == "corrected", opt);
        Outcome o = from_fusion(r, s.level, truth);
        // The default ψ0 grid has 81 equally spaced points.
        o.extras.emplace_back("grid_step", (r.cc.grid.back() - r.cc.grid.front()) / 80.0);
        return o;
    }
    if (m == "standard") return from_fusion(standard_iiccff(tables, s.measure, {}, {s.level}), s.level, truth);
    if (m == "exact") return from_fusion(fused_cc_exact_or(tables, {}, {s.level}), s.level, truth);
    if (m == "optimal") {
        const auto r = optimal_cd_common_exact(tables, default_effect_grid(s.measure));
        if (r.flat) throw DegenerateData("no informative table");
        return from_cd(r.cd, s.level, truth);
    }
    throw InvalidArgument("unknown method '" + m + "'");
}

Outcome run_gamma(const std::string& m, const Scenario& s, const std::vector<GammaSource>& src,
                  const GammaContext& ctx, Generator& gen) {
    const double truth = s.truth();
    const double a = 0.5 * (1.0 - s.level);
    if (m == "exact-cc") {
        // {θ : H(D(θ)) <= level} = {θ : D(θ) <= d*}; D depends on t = θ/θ̂
        // through 2a·(t − 1 − log t).
        const double ml = gamma_ml(src);
        const double a_dot = gamma_a_dot(src);
        const double target = ctx.law->quantile(s.level) / (2.0 * a_dot);
        const auto g = [&](double u) { return std::exp(u) - 1.0 - u - target; };  // u = log t
        double lo = -1.0, hi = 1.0;
        while (g(lo) < 0.0) lo *= 2.0;
        while (g(hi) < 0.0) hi *= 2.0;
        const double t_lo = std::exp(numerics::find_root(g, {lo, 0.0}, 1e-13));
        const double t_hi = std::exp(numerics::find_root(g, {0.0, hi}, 1e-13));
        return from_interval(ml * t_lo, ml * t_hi, ml, truth, ctx.law->cdf(gamma_deviance(src, truth)));
    }
    GammaMethod gm;
    if (m == "optimal") gm = GammaMethod::optimal;
    else if (m == "sxs") gm = GammaMethod::sxs;
    else if (m == "density") gm = GammaMethod::density;
    else throw InvalidArgument("unknown method '" + m + "'");
    const double c = gamma_method_cdf(gm, src, truth);
    Outcome o = from_interval(gamma_method_quantile(gm, src, a), gamma_method_quantile(gm, src, 1.0 - a),
                              gamma_method_quantile(gm, src, 0.5), truth, std::abs(1.0 - 2.0 * c));
    o.loss = std::abs(gamma_cd_draw(gm, src, gen) - truth);
    return o;
}

Outcome run_neyman_scott(const std::string& m, const Scenario& s, const NeymanScottData& data) {
    const auto v = parse_neyman_scott_variant(m);
    const auto cc = neyman_scott(data, v);
    const auto summary = summarize(cc, s.level);
    Outcome o = from_region(summary.intervals, neyman_scott_estimate(data, v), s.truth(), cc.at(s.truth()));
    if (v != NeymanScottVariant::gold)
        o.extras.emplace_back("sup_vs_gold", sup_distance(cc, neyman_scott(data, NeymanScottVariant::gold)));
    return o;
}

double median_of(std::vector<double> v) {
    if (v.empty()) return kNaN;
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    if (n % 2 == 1) return v[n / 2];
    if (std::isinf(v[n / 2 - 1]) || std::isinf(v[n / 2])) return v[n / 2 - 1] == v[n / 2] ? v[n / 2] : kNaN;
    return 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

MethodReport aggregate(const std::string& name, std::size_t col, const std::vector<std::vector<Outcome>>& reps,
                       double truth) {
    MethodReport r;
    r.method = name;
    std::vector<double> widths, bias, ccs, losses;
    std::map<std::string, std::vector<double>> extras;
    std::vector<std::string> extra_order;
    std::size_t covered = 0;
    bool cc_complete = true, loss_complete = true;
    for (const auto& row : reps) {
        const Outcome& o = row[col];
        if (o.status == Outcome::Status::dropped) {
            ++r.drops;
            continue;
        }
        if (o.status == Outcome::Status::failed) {
            ++r.failures;
            if (r.failure_messages.size() < 5 &&
                std::find(r.failure_messages.begin(), r.failure_messages.end(), o.message) == r.failure_messages.end())
                r.failure_messages.push_back(o.message);
            continue;
        }
        ++r.successes;
        if (o.covered) ++covered;
        if (std::isinf(o.width)) ++r.infinite_width;
        widths.push_back(o.width);
        bias.push_back(o.estimate - truth);
        if (std::isnan(o.cc_truth)) cc_complete = false;
        else ccs.push_back(o.cc_truth);
        if (std::isnan(o.loss)) loss_complete = false;
        else losses.push_back(o.loss);
        for (const auto& [k, v] : o.extras) {
            if (!extras.count(k)) extra_order.push_back(k);
            extras[k].push_back(v);
        }
    }
    const double n = static_cast<double>(r.successes);
    r.coverage = r.successes ? static_cast<double>(covered) / n : kNaN;
    r.median_width = median_of(widths);
    r.median_bias = median_of(bias);
    r.ks_statistic = r.ks_p_value = kNaN;
    if (cc_complete && ccs.size() >= 2) {
        const auto ks = numerics::ks_uniform(ccs);
        r.ks_statistic = ks.statistic;
        r.ks_p_value = ks.p_value;
    }
    r.risk = r.risk_se = kNaN;
    if (loss_complete && losses.size() >= 2) {
        const double m = numerics::mean(losses);
        r.risk = m;
        r.risk_se = std::sqrt(numerics::variance(losses) / static_cast<double>(losses.size()));
    }
    for (const auto& k : extra_order) r.extras.emplace_back(k, median_of(extras[k]));
    return r;
}

}  // namespace

// ---------------------------------------------------------------------------
// run

BenchmarkReport run_benchmark(const Scenario& scenario, const std::vector<std::string>& requested,
                              const BenchOptions& options) {
    scenario.validate();
    std::vector<std::string> methods = requested;
    if (methods.empty()) methods = scenario.methods;
    if (methods.empty()) methods = available_methods(scenario);
    {
        Scenario probe = scenario;
        probe.methods = methods;
        probe.validate();  // rejects unknown names
    }

    const RngStream rng = options.rng.value_or(RngStream{scenario.seed, 0});
    const bool fair_drop = scenario.fair_drop_enabled();
    const double truth = scenario.truth();

    GammaContext ctx;
    if (scenario.kind == ScenarioKind::gamma_proto) {
        double a_dot = 0.0;
        for (double a : scenario.shapes) a_dot += a;
        ctx.law = std::make_unique<GammaDevianceLaw>(a_dot, scenario.sims, RngStream{scenario.seed, 1});
    }

    std::vector<std::vector<Outcome>> reps(scenario.reps, std::vector<Outcome>(methods.size()));
    std::vector<char> dropped(scenario.reps, 0);

    numerics::parallel_for(scenario.reps, options.threads, [&](std::size_t r) {
        Generator gen(rng.child(r));
        auto& row = reps[r];
        auto run_all = [&](auto&& body) {
            for (std::size_t i = 0; i < methods.size(); ++i) {
                try {
                    row[i] = body(methods[i]);
                    row[i].status = Outcome::Status::ok;
                } catch (const std::exception& e) {
                    row[i] = Outcome{};
                    row[i].status = Outcome::Status::failed;
                    row[i].message = e.what();
                }
            }
        };
        switch (scenario.kind) {
            case ScenarioKind::basic_re: {
                const auto in = simulate_basic_re(scenario, gen);
                run_all([&](const std::string& m) { return run_basic_re(m, scenario, in); });
                break;
            }
            case ScenarioKind::fixed_2x2:
            case ScenarioKind::random_2x2: {
                const auto tables = simulate_tables(scenario, gen);
                if (fair_drop && std::all_of(tables.begin(), tables.end(), [](const auto& t) { return t.y0 == 0; })) {
                    dropped[r] = 1;
                    for (auto& o : row) {
                        o.status = Outcome::Status::dropped;
                        o.message = "no control-arm events";
                    }
                    break;
                }
                run_all([&](const std::string& m) { return run_tables(m, scenario, tables); });
                break;
            }
            case ScenarioKind::gamma_proto: {
                std::vector<GammaSource> src(scenario.shapes.size());
                for (std::size_t j = 0; j < src.size(); ++j)
                    src[j] = {scenario.shapes[j], gen.gamma(scenario.shapes[j], scenario.theta)};
                run_all([&](const std::string& m) { return run_gamma(m, scenario, src, ctx, gen); });
                break;
            }
            case ScenarioKind::neyman_scott: {
                const auto data = neyman_scott_sample(scenario.k, scenario.sigma, scenario.mu_lo, scenario.mu_hi, gen);
                run_all([&](const std::string& m) { return run_neyman_scott(m, scenario, data); });
                break;
            }
        }
    });

    BenchmarkReport report;
    report.scenario = scenario;
    report.methods = methods;
    report.fair_drop = fair_drop;
    report.dropped_rounds = static_cast<std::size_t>(std::count(dropped.begin(), dropped.end(), 1));
    for (std::size_t i = 0; i < methods.size(); ++i) report.reports.push_back(aggregate(methods[i], i, reps, truth));
    if (options.keep_replications) report.replications = std::move(reps);
    return report;
}

// ---------------------------------------------------------------------------
// report

const MethodReport& BenchmarkReport::method(const std::string& name) const {
    for (const auto& r : reports)
        if (r.method == name) return r;
    throw InvalidArgument("benchmark report has no method '" + name + "'");
}

json BenchmarkReport::to_json() const {
    json methods_json = json::array();
    for (const auto& r : reports) {
        json extras = json::object();
        for (const auto& [k, v] : r.extras) extras[k] = num(v);
        methods_json.push_back({{"method", r.method},
                                {"successes", r.successes},
                                {"failures", r.failures},
                                {"drops", r.drops},
                                {"infinite_width", r.infinite_width},
                                {"coverage", num(r.coverage)},
                                {"median_width", num(r.median_width)},
                                {"median_bias", num(r.median_bias)},
                                {"ks_statistic", num(r.ks_statistic)},
                                {"ks_p_value", num(r.ks_p_value)},
                                {"risk", num(r.risk)},
                                {"risk_se", num(r.risk_se)},
                                {"extras", extras},
                                {"failure_messages", r.failure_messages}});
    }
    json j = {{"scenario", scenario.to_json()},
              {"level", scenario.level},
              {"truth", scenario.truth()},
              {"fair_drop", fair_drop},
              {"dropped_rounds", dropped_rounds},
              {"methods", methods_json}};
    if (!replications.empty()) {
        json reps_json = json::array();
        for (const auto& row : replications) {
            json row_json = json::array();
            for (std::size_t i = 0; i < row.size(); ++i) {
                const Outcome& o = row[i];
                const char* status = o.status == Outcome::Status::ok       ? "ok"
                                     : o.status == Outcome::Status::failed ? "failed"
                                                                           : "dropped";
                json oj = {{"method", methods[i]}, {"status", status}};
                if (o.status == Outcome::Status::ok) {
                    oj["estimate"] = num(o.estimate);
                    oj["lo"] = num(o.lo);
                    oj["hi"] = num(o.hi);
                    oj["width"] = num(o.width);
                    oj["covered"] = o.covered;
                    oj["cc_truth"] = num(o.cc_truth);
                    oj["loss"] = num(o.loss);
                    for (const auto& [k, v] : o.extras) oj[k] = num(v);
                } else {
                    oj["message"] = o.message;
                }
                row_json.push_back(oj);
            }
            reps_json.push_back(row_json);
        }
        j["replications"] = reps_json;
    }
    return j;
}

std::string BenchmarkReport::to_csv() const {
    std::ostringstream os;
    os << "method,successes,failures,drops,infinite_width,coverage,median_width,median_bias,ks_p_value,risk,risk_se,extras\n";
    for (const auto& r : reports) {
        os << r.method << ',' << r.successes << ',' << r.failures << ',' << r.drops << ',' << r.infinite_width << ','
           << csv_num(r.coverage) << ',' << csv_num(r.median_width) << ',' << csv_num(r.median_bias) << ','
           << csv_num(r.ks_p_value) << ',' << csv_num(r.risk) << ',' << csv_num(r.risk_se) << ',';
        for (std::size_t i = 0; i < r.extras.size(); ++i)
            os << (i ? ";" : "") << r.extras[i].first << '=' << csv_num(r.extras[i].second);
        os << '\n';
    }
    return os.str();
}

}  // namespace ccfuse::bench
