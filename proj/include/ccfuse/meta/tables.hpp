#pragma once

#include "ccfuse/cd/types.hpp"
#include "ccfuse/fuse/random.hpp"
#include "ccfuse/fuse/result.hpp"
#include "ccfuse/numerics/rng.hpp"

#include <optional>
#include <string>
#include <vector>

namespace ccfuse {

// Events/size in the control (0) and treatment (1) arm of one study.
struct TwoByTwoTable {
    long y0 = 0, m0 = 1;
    long y1 = 0, m1 = 1;

    void validate() const;
    long z() const { return y0 + y1; }
    // 0 < z < m0 + m1; otherwise the conditional distribution is degenerate.
    bool informative() const { return z() > 0 && z() < m0 + m1; }
    // Treatment and control exchanged.
    TwoByTwoTable swapped() const { return {y1, m1, y0, m0}; }
};

// CSV with header y1,m1,y0,m0.
std::vector<TwoByTwoTable> read_tables_csv(const std::string& path);

enum class EffectMeasure { log_odds_ratio, log_risk_ratio, risk_difference };

// Accepts "or", "rr", "rd" and the long names.
EffectMeasure parse_effect_measure(const std::string& name);
const char* effect_measure_name(EffectMeasure m);

// [-8, 8] with 321 points for the log scales, [-1, 1] with 401 for RD.
ParamGrid default_effect_grid(EffectMeasure m);

// ---------------------------------------------------------------------------
// eccentric hypergeometric

// Y1 | Z = z with log odds ratio ψ:
// g(y) ∝ C(m0, z−y) C(m1, y) exp(ψy) on max(0, z−m0) <= y <= min(z, m1).
class Nchg {
public:
    Nchg(long m0, long m1, long z);

    long lo() const { return lo_; }
    long hi() const { return hi_; }
    bool in_support(long y) const { return y >= lo_ && y <= hi_; }
    // -inf off the support.
    double log_pmf(long y, double psi) const;
    // Probabilities for y = lo..hi.
    std::vector<double> pmf(double psi) const;
    double mean(double psi) const;
    double variance(double psi) const;
    // Conditional ML estimate of ψ for an observed y; ±inf at the support
    // ends.
    double mle(long y) const;

private:
    double log_norm(double psi) const;

    long lo_, hi_;
    std::vector<double> log_coef_;
};

// 0 off the support; see nchg_in_support.
double nchg_pmf(long y1, double psi, long m0, long m1, long z);
bool nchg_in_support(long y1, long m0, long m1, long z);

// ---------------------------------------------------------------------------
// exact CDs for the log odds ratio

struct TableCd {
    ConfidenceDistribution cd;
    bool informative = true;
    // Limits of C at ψ → −∞ and 1 − C at ψ → +∞; ½P(Y1 = y1) mass escapes
    // to infinity when y1 sits at a support end.
    double mass_at_minus_inf = 0.0;
    double mass_at_plus_inf = 0.0;
};

// C(ψ) = P_ψ(Y1 > y1 | z) + ½P_ψ(Y1 = y1 | z). Non-informative tables give
// the flat curve C = ½ with informative = false.
TableCd source_cd_or(const TwoByTwoTable& t, const std::optional<ParamGrid>& grid = {});

struct OptimalCdOptions {
    std::size_t sims = 10000;
    numerics::RngStream rng{0x4F50544Dull, 0};
    int threads = 0;
};

struct OptimalCd {
    ConfidenceDistribution cd;
    std::size_t informative = 0;
    bool flat = false;  // no informative table
};

// C(ψ) = P_ψ(B > b | z) + ½P_ψ(B = b | z), B = Σ Y1j over informative
// tables. Simulated with the same uniforms at every ψ (inverse-CDF draws),
// so the curve is monotone in ψ.
OptimalCd optimal_cd_common(const std::vector<TwoByTwoTable>& tables, const ParamGrid& grid,
                            const OptimalCdOptions& options = {});
// The same CD by exact convolution of the conditional distributions.
OptimalCd optimal_cd_common_exact(const std::vector<TwoByTwoTable>& tables, const ParamGrid& grid);

// Σ_j log g_j(y1j, ψ) over informative tables.
double conditional_loglik_or(const std::vector<TwoByTwoTable>& tables, double psi);

// Wilks curve from the summed conditional log-likelihoods. When every
// informative table has y1 at a support end in the same direction the
// maximum is at ±inf: estimate is ±inf, the deviance is taken from the
// limit and the interval is open towards it.
FusionResult fused_cc_exact_or(const std::vector<TwoByTwoTable>& tables, const std::optional<ParamGrid>& grid = {},
                               const std::vector<double>& levels = kDefaultLevels);

// ---------------------------------------------------------------------------
// profiled binomial pairs

// Binomial-pair log-likelihood of one table maximised over the control-arm
// parameter at fixed effect ψ; -inf where ψ is infeasible (RD outside
// [-1, 1] or incompatible with the data).
double profile_loglik_2x2(const TwoByTwoTable& t, EffectMeasure m, double psi);

// Sum of per-table profiles, Wilks curve. Tables without information on
// the measure are dropped. Unbounded maxima are handled as in
// fused_cc_exact_or.
FusionResult standard_iiccff(const std::vector<TwoByTwoTable>& tables, EffectMeasure m,
                             const std::optional<ParamGrid>& grid = {},
                             const std::vector<double>& levels = kDefaultLevels);

// ---------------------------------------------------------------------------
// random effects for the log odds ratio

// Σ_j log ∫ g_j(y1j, ψ) τ⁻¹φ((ψ − ψ0)/τ) dψ over informative tables.
RandomFusion conditional_random_fusion(const std::vector<TwoByTwoTable>& tables);

struct RandomTablesOptions {
    std::optional<ParamGrid> psi0_grid;  // default: 81 points, see below
    double tau_max = 4.0;
    std::vector<double> levels = kDefaultLevels;
};

// Profile over τ, optionally with the +log τ̂ correction (dropped when τ̂
// falls below kTauCorrectionFloor). The default ψ0 grid spans the
// fixed-effect conditional 99.99% interval widened threefold about its
// estimate, within [-8, 8].
FusionResult random_effects_2x2(const std::vector<TwoByTwoTable>& tables, bool corrected,
                                const RandomTablesOptions& options = {});

// ---------------------------------------------------------------------------
// Mantel-Haenszel

struct MhResult {
    double estimate = 0.0;
    double se = 0.0;
    double lo = 0.0, hi = 0.0;
    // No treatment-arm events (log scales): the estimate is -inf and the
    // interval is the whole real line.
    bool whole_line = false;
};

// Pooled MH estimate with a Wald interval on the measure's scale: the
// Robins-Breslow-Greenland variance for the log OR, Greenland-Robins for
// the log RR and for the RD. Throws UndefinedEstimate when the control arms
// have no events (log scales).
MhResult mantel_haenszel(const std::vector<TwoByTwoTable>& tables, EffectMeasure m, double level = 0.95);

}  // namespace ccfuse
