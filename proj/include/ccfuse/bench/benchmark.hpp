#pragma once

#include "ccfuse/meta/normal_re.hpp"
#include "ccfuse/meta/tables.hpp"
#include "ccfuse/numerics/rng.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ccfuse::bench {

enum class ScenarioKind { basic_re, fixed_2x2, random_2x2, gamma_proto, neyman_scott };

ScenarioKind parse_scenario_kind(const std::string& name);
const char* scenario_kind_name(ScenarioKind k);

// Simulation design. Fields not used by `kind` are ignored. Designs:
//  basic-re    ψ_j ~ N(psi0, tau²); study j has m_j ~ unif{m_lo..m_hi}
//              observations N(ψ_j, sd²), summarised by mean and s/√m_j.
//  fixed-2x2   θ_j ~ N(logit p0, theta_sd²), m1 ~ unif{m1_lo..m1_hi},
//              m0 = round(r·m1) with r ~ unif(ratio_lo, ratio_hi); control
//              risk expit θ_j, treatment risk from the common effect psi.
//  random-2x2  as above with ψ_j ~ N(psi, tau²) on the log odds ratio
//              scale; m0 = m1 when ratio_lo = ratio_hi = 1.
//  gamma-proto Y_j ~ Gamma(shapes_j, rate theta).
//  neyman-scott k pairs N(μ_j, sigma²), μ_j ~ unif(mu_lo, mu_hi).
struct Scenario {
    std::string name;
    ScenarioKind kind = ScenarioKind::basic_re;
    std::size_t reps = 2000;
    std::uint64_t seed = 1;
    double level = 0.95;
    std::vector<std::string> methods;  // empty: every method of the kind
    std::optional<bool> fair_drop;     // empty: on for fixed-2x2 OR/RR

    std::size_t k = 10;
    // basic-re
    double psi0 = 0.5;
    double tau = 0.0;
    long m_lo = 30, m_hi = 50;
    double sd = 2.0;
    // 2x2
    EffectMeasure measure = EffectMeasure::log_odds_ratio;
    double psi = 0.0;
    double p0 = 0.005;
    double theta_sd = 0.5 * 1.4142135623730951;  // variance 0.5
    long m1_lo = 50, m1_hi = 150;
    double ratio_lo = 0.5, ratio_hi = 1.5;
    // gamma-proto
    std::vector<double> shapes;
    double theta = 1.0;
    std::size_t sims = 10000;  // deviance-law simulations
    // neyman-scott
    double sigma = 2.0;
    double mu_lo = -3.0, mu_hi = 3.0;

    // Unknown keys and missing truth values are errors. Keys:
    // name, kind, reps, seed, level, methods, fair_drop, params{...}.
    static Scenario from_json(const nlohmann::json& j);
    static Scenario load(const std::string& path);
    nlohmann::json to_json() const;
    void validate() const;

    double truth() const;
    bool fair_drop_enabled() const;
};

// Method names accepted for a kind, in report order.
std::vector<std::string> available_methods(const Scenario& s);

struct MethodReport {
    std::string method;
    std::size_t successes = 0;
    std::size_t failures = 0;
    std::size_t drops = 0;
    // Successes whose interval has infinite width (counted as covering).
    std::size_t infinite_width = 0;
    double coverage = 0.0;      // over successes
    double median_width = 0.0;  // may be +inf
    double median_bias = 0.0;   // median of estimate − truth
    // Uniformity audit of cc(truth) over successes; NaN when the method has
    // no curve value at the truth.
    double ks_statistic = 0.0;
    double ks_p_value = 0.0;
    // Two-stage risk E|ψ_cd − ψ| (CD methods of the gamma prototype only).
    double risk = 0.0;
    double risk_se = 0.0;
    // Kind-specific medians, e.g. sup-distance to the gold curve.
    std::vector<std::pair<std::string, double>> extras;
    // Up to five distinct failure messages.
    std::vector<std::string> failure_messages;
};

// Outcome of one method on one replication.
struct Outcome {
    enum class Status { ok, failed, dropped } status = Status::ok;
    double estimate = 0.0;
    double lo = 0.0, hi = 0.0;  // hull of the confidence region
    double width = 0.0;         // total length of the region
    bool covered = false;
    double cc_truth = 0.0;      // NaN when not available
    double loss = 0.0;          // |ψ_cd − ψ|, NaN when not available
    std::vector<std::pair<std::string, double>> extras;
    std::string message;
};

struct BenchmarkReport {
    Scenario scenario;
    std::vector<std::string> methods;
    std::vector<MethodReport> reports;
    std::size_t dropped_rounds = 0;
    bool fair_drop = false;
    // [replication][method]; filled when requested.
    std::vector<std::vector<Outcome>> replications;

    const MethodReport& method(const std::string& name) const;
    nlohmann::json to_json() const;
    // One row per method.
    std::string to_csv() const;
};

struct BenchOptions {
    int threads = 0;
    bool keep_replications = false;
    // Defaults to {scenario.seed, 0}; replication r uses rng.child(r).
    std::optional<numerics::RngStream> rng;
};

// Data are generated once per replication and passed to every method; a
// method that throws is counted as a failure for that replication. Results
// do not depend on the thread count.
BenchmarkReport run_benchmark(const Scenario& scenario, const std::vector<std::string>& methods = {},
                              const BenchOptions& options = {});

// Per-replication data generators, exposed for tests and the CLI.
NormalREInput simulate_basic_re(const Scenario& s, numerics::Generator& gen);
std::vector<TwoByTwoTable> simulate_tables(const Scenario& s, numerics::Generator& gen);

}  // namespace ccfuse::bench
