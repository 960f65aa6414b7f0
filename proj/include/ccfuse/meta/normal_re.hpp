#pragma once

#include "ccfuse/cd/types.hpp"
#include "ccfuse/fuse/result.hpp"
#include "ccfuse/numerics/rng.hpp"

#include <optional>
#include <string>
#include <vector>

namespace ccfuse {

// y_j | ψ_j ~ N(ψ_j, σ_j²), ψ_j ~ N(ψ0, τ²).
struct NormalREInput {
    std::vector<double> y;
    std::vector<double> sigma;

    NormalREInput() = default;
    NormalREInput(std::vector<double> y, std::vector<double> sigma);
    explicit NormalREInput(const std::vector<StudySummary>& studies);
    // CSV with header estimate,stddev[,df].
    static NormalREInput read_csv(const std::string& path);

    std::size_t k() const { return y.size(); }
    double max_sigma() const;
    void validate(std::size_t min_k = 2) const;
};

// Σ{−½log(σ_j²+τ²) − ½(y_j−ψ0)²/(σ_j²+τ²)}.
double loglik_re(const NormalREInput& in, double psi0, double tau);

// ψ̂0(τ): weighted mean with weights 1/(σ_j²+τ²).
double weighted_mean(const NormalREInput& in, double tau);

// Upper end of every τ search: 10·max σ_j.
double default_tau_max(const NormalREInput& in);

// τ̂(ψ0) maximising loglik_re over [0, tau_max].
double tau_hat_at(const NormalREInput& in, double psi0, double tau_max);

// Σ{−½/v_j² + (y_j−ψ0)²/v_j³}, v_j = σ_j²+τ²: observed information for τ².
double tau2_information(const NormalREInput& in, double psi0, double tau);

// Border condition Σ(1/σ_j²){(y_j−ψ0)²/σ_j² − 1} <= 0 (τ̂(ψ0) = 0).
bool border_condition(const NormalREInput& in, double psi0);
// The ψ0 minimising the left-hand side, Σ(y_j/σ_j⁴)/Σ(1/σ_j⁴); the
// condition holds for some ψ0 iff it holds there.
double border_psi0(const NormalREInput& in);

// Default ψ0 grid: τ̂_cml-weighted mean ± 8 standard errors (computed with
// τ = max(τ̂_cml, max σ_j)), 401 points.
ParamGrid default_psi0_grid(const NormalREInput& in, std::size_t points = 401);

// Profile over τ for each ψ0. With `corrected`, −½ log of the τ²
// information is added, unless the border condition holds for some ψ0 in
// which case no correction is applied anywhere.
FusionResult profile_psi0(const NormalREInput& in, bool corrected, const std::optional<ParamGrid>& grid = {},
                          const std::vector<double>& levels = kDefaultLevels);

// A_k(τ) and B_k(τ) = A_k(τ) + log Σ 1/(σ_j²+τ²).
double a_k(const NormalREInput& in, double tau);
double b_k(const NormalREInput& in, double tau);

enum class TauVariant { ml, cml };

// Minimiser of A_k (ml) or B_k (cml, REML) on [0, tau_max]; `converged` is
// false when the minimum sits on tau_max.
struct TauEstimate {
    double tau;
    bool converged;
};
TauEstimate tau_estimate(const NormalREInput& in, TauVariant variant, double tau_max);

struct TauProfiles {
    ParamGrid tau;
    std::vector<double> a, b;
    double tau_ml, tau_cml;
};
TauProfiles tau_profiles(const NormalREInput& in, const std::optional<ParamGrid>& grid = {});

// Default τ grid for the τ curves: [0, max(3·τ̂_cml, 2·max σ_j)].
ParamGrid default_tau_grid(const NormalREInput& in, std::size_t points = 101);

struct ExactTauOptions {
    std::size_t sims = 10000;
    numerics::RngStream rng{0x7A75ull, 0};
    int threads = 0;
};

// cc(τ) = P_τ{D(τ) <= D_obs(τ)}, D = A_k(τ) − min A_k (ml) or the B_k
// analogue (cml), by simulating y* ~ N(0, σ_j²+τ²). Grid point i uses the
// stream rng.child(i), so the curve does not depend on the thread count.
// The curve carries C(0) as its boundary mass.
ConfidenceCurve exact_cc_tau(const NormalREInput& in, TauVariant variant, const ParamGrid& grid,
                             const ExactTauOptions& options = {});

// Q_k(τ) = Σ{y_j − ψ̂0(τ)}²/(σ_j²+τ²).
double q_k(const NormalREInput& in, double tau);
// C(τ) = 1 − Γ_{k−1}(Q_k(τ)); boundary mass C(0).
ConfidenceDistribution qk_cd_tau(const NormalREInput& in, const ParamGrid& grid);
// τ with C(τ) = p; 0 when C(0) >= p.
double qk_tau_quantile(const NormalREInput& in, double p);

struct PooledEstimate {
    double estimate;
    double variance;
};
// Σ(y_j/σ_j²)/Σ(1/σ_j²) with variance 1/Σ(1/σ_j²); k >= 1.
PooledEstimate inverse_variance(const NormalREInput& in);
// DerSimonian-Laird moment estimator of τ².
double tau2_dersimonian_laird(const NormalREInput& in);

struct HksjResult {
    double estimate;
    double variance;
    double lo, hi;
    double tau;
    bool used_dl;  // REML did not converge
};
// HKSJ interval with τ̂ = REML unless `tau` is given.
HksjResult hksj_interval(const NormalREInput& in, double level, std::optional<double> tau = {});

// C̄(ψ) = Φ(Σ w_j Φ⁻¹(C_j(ψ))) on `grid`; requires Σ w_j² = 1 within 1e-9.
ConfidenceDistribution sxs_combine(const std::vector<ConfidenceDistribution>& cds, const std::vector<double>& weights,
                                   const ParamGrid& grid);

}  // namespace ccfuse
