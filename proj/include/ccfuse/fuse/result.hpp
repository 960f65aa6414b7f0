#pragma once

#include "ccfuse/cd/summary.hpp"
#include "ccfuse/cd/types.hpp"
#include "ccfuse/numerics/roots.hpp"

#include <string>
#include <vector>

namespace ccfuse {

inline const std::vector<double> kDefaultLevels = {0.90, 0.95};

struct FusionDiagnostics {
    int optimizer_evaluations = 0;
    bool correction_applied = false;
    bool border_rule_triggered = false;
    // Focus values whose profile is -inf (excluded by some source).
    std::vector<double> excluded;
    // Focus values where a requested correction was not applied.
    std::vector<double> correction_skipped_at;
    std::vector<std::string> notes;
};

struct FusionResult {
    ConfidenceLogLik profile;  // normalised, max 0 at the estimate
    DevianceCurve deviance;
    ConfidenceCurve cc;  // Wilks: Γ₁(deviance)
    double estimate = 0.0;
    double max_loglik = 0.0;  // unnormalised profile maximum
    std::vector<CurveSummary> intervals;
    FusionDiagnostics diagnostics;

    // Summary for `level`; throws InvalidArgument when it was not requested.
    const CurveSummary& interval(double level) const;
};

// Turns a tabulated profile log-likelihood (raw scale, -inf allowed) into a
// Wilks-calibrated result. When `exact` is given it must evaluate the same
// profile anywhere on the grid range: the argmax is then refined by Brent and
// inserted into the grid, and interval endpoints are located by root finding
// instead of linear interpolation.
FusionResult finish_profile(const ParamGrid& grid, std::vector<double> raw,
                            const numerics::ScalarFn* exact,
                            const std::vector<double>& levels = kDefaultLevels,
                            FusionDiagnostics diagnostics = {});

// For a profile whose supremum is a limit at +inf (direction > 0) or -inf
// (direction < 0). Deviance and curve are taken relative to `supremum`, the
// profile values are raw minus `supremum` (all below 0), the estimate is
// ±inf and the interval piece reaching the grid end extends to infinity.
FusionResult finish_unbounded_profile(const ParamGrid& grid, std::vector<double> raw,
                                      const numerics::ScalarFn* exact, double supremum, int direction,
                                      const std::vector<double>& levels = kDefaultLevels,
                                      FusionDiagnostics diagnostics = {});

// Same, for an already calibrated curve (e.g. simulated). The curve's argmin
// is the estimate; no refinement.
FusionResult finish_curve(const ConfidenceCurve& cc, const std::vector<double>& levels = kDefaultLevels,
                          FusionDiagnostics diagnostics = {});

}  // namespace ccfuse
