#pragma once

#include "ccfuse/cd/types.hpp"

#include <functional>

namespace ccfuse {

// Confidence values at or above this are treated as "excluded" (-inf).
inline constexpr double kCcExclusion = 1.0 - 1e-12;

// ℓ(ψ) = -½ Γ₁⁻¹(cc(ψ)).
ConfidenceLogLik chi2_convert(const ConfidenceCurve& cc);

// ℓ(ψ) = -½ {Φ⁻¹(C(ψ))}².
ConfidenceLogLik normal_convert(const ConfidenceDistribution& cd);

// C(ψ, t): a family of CDs indexed by the value t of a continuous statistic.
using CdFamily = std::function<double(double psi, double t)>;

// ℓ(ψ) = log |∂C(ψ, t)/∂t| at t = t_obs by central differences with step
// max(1e-6, 1e-6·|t_obs|). The derivative must keep one sign over the grid
// (MonotonicityError otherwise); an exactly zero derivative gives -inf.
ConfidenceLogLik exact_convert(const CdFamily& family, double t_obs, const ParamGrid& grid);

}  // namespace ccfuse
