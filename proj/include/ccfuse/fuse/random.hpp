#pragma once

#include "ccfuse/cd/types.hpp"
#include "ccfuse/fuse/result.hpp"
#include "ccfuse/numerics/quadrature.hpp"

#include <functional>
#include <vector>

namespace ccfuse {

// Normal random effects ψ_j ~ N(ψ0, τ²).
struct RandomEffectSpec {
    double psi0 = 0.0;
    double tau = 0.0;
    void validate() const;
};

// log ∫ exp{ℓ_j(ψ)} τ⁻¹φ((ψ − ψ0)/τ) dψ for one source, as a function of
// (ψ0, τ). At τ = 0 it must return ℓ_j(ψ0).
using SourceIntegral = std::function<double(double psi0, double tau)>;

// Adaptive Gauss-Hermite (Laplace fallback) for a log-likelihood with a
// known mode and curvature scale.
SourceIntegral normal_kernel_integral(std::function<double(double)> loglik, double mode, double scale,
                                      const numerics::AdaptiveQuadratureOptions& options = {});
// Same for a tabulated confidence log-likelihood; -inf off the grid is a
// zero integrand.
SourceIntegral normal_kernel_integral(const ConfidenceLogLik& ll,
                                      const numerics::AdaptiveQuadratureOptions& options = {});

class RandomFusion {
public:
    explicit RandomFusion(std::vector<SourceIntegral> terms);
    static RandomFusion from_logliks(const std::vector<ConfidenceLogLik>& lls,
                                     const numerics::AdaptiveQuadratureOptions& options = {});

    // ℓ_fus(ψ0, τ) = Σ_j log ∫ …; unnormalised.
    double loglik(double psi0, double tau) const;
    std::size_t sources() const { return terms_.size(); }

private:
    std::vector<SourceIntegral> terms_;
};

// ℓ_fus on a (ψ0, τ) grid, row-major in ψ0, normalised to max 0.
struct RandomSurface {
    ParamGrid psi0;
    ParamGrid tau;
    std::vector<double> values;
    double max_loglik = 0.0;
    double at(std::size_t i_psi0, std::size_t i_tau) const { return values[i_psi0 * tau.size() + i_tau]; }
};

RandomSurface fuse_random(const std::vector<ConfidenceLogLik>& lls, const ParamGrid& psi0, const ParamGrid& tau,
                          const numerics::AdaptiveQuadratureOptions& options = {});
RandomSurface fuse_random(const RandomFusion& fusion, const ParamGrid& psi0, const ParamGrid& tau);

// τ̂(ψ0) = argmax over [0, tau_max] and the profiled value.
struct TauFit {
    double tau;
    double loglik;
    int evaluations;
};
TauFit profile_tau(const RandomFusion& fusion, double psi0, double tau_max);

struct RandomProfile {
    ParamGrid psi0;
    std::vector<double> loglik;
    std::vector<double> tau_hat;
    int evaluations = 0;
};

RandomProfile profile_random(const RandomFusion& fusion, const ParamGrid& psi0, double tau_max);

// Below this τ̂ the +log τ̂ correction is not computed.
inline constexpr double kTauCorrectionFloor = 1e-4;

// Adds log τ̂(ψ0) to the profile. When τ̂ falls below kTauCorrectionFloor
// anywhere on the grid the correction is dropped for the whole profile
// (log τ̂ diverges there); the affected values are listed in the diagnostics.
FusionResult cox_reid_random(const RandomProfile& profile, const std::vector<double>& levels = kDefaultLevels);

// Profile over τ for each ψ0, optionally corrected, with refined argmax and
// interval endpoints.
FusionResult random_effects_psi0(const RandomFusion& fusion, const ParamGrid& psi0, double tau_max,
                                 bool corrected, const std::vector<double>& levels = kDefaultLevels);

}  // namespace ccfuse
