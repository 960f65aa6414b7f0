#pragma once

#include "ccfuse/cd/types.hpp"
#include "ccfuse/fuse/focus.hpp"
#include "ccfuse/fuse/result.hpp"
#include "ccfuse/numerics/roots.hpp"

#include <optional>
#include <vector>

namespace ccfuse {

struct ProfileOptions {
    std::vector<double> levels = kDefaultLevels;
    // Coarse scan before Brent when a single coordinate is free.
    int scan_points = 200;
    // Scan steps when the pivot is solved numerically.
    int pivot_scan = 32;
    double tol = 1e-10;
};

// Maximise a joint log-likelihood over {θ : φ(θ) = φ0} for each φ0 of a
// focus grid, with the pivot coordinate eliminated by the constraint.
struct ConstrainedProblem {
    std::size_t dimension = 1;
    VectorFn loglik;  // -inf where infeasible
    VectorFn focus;
    std::size_t pivot = 0;
    std::function<std::optional<double>(const std::vector<double>&, double)> solve_pivot;
    // Search box per coordinate; the pivot's entry bounds the numeric solve.
    std::vector<numerics::Interval> bounds;
    std::vector<double> start;
};

struct ConstrainedProfile {
    std::vector<double> values;  // -inf where the constraint set is empty
    std::vector<std::vector<double>> argmax;
    int evaluations = 0;
};

// Profiles on the grid in order, warm-starting each focus value from the
// previous solution when two or more coordinates are free.
ConstrainedProfile profile_constrained(const ConstrainedProblem& problem, const ParamGrid& focus_grid,
                                       const ProfileOptions& options = {});
// Profile value at a single focus value (cold start).
double profile_value(const ConstrainedProblem& problem, double phi, const ProfileOptions& options = {});

// ℓ_fus(θ) = Σ ℓ_j(θ_{sel j}) profiled to the focus, Wilks-calibrated.
FusionResult fuse_fixed(const std::vector<ConfidenceLogLik>& lls, const FocusMap& map,
                        const ParamGrid& focus_grid, const ProfileOptions& options = {});

// Sources linked to a low-dimensional β through ψ_j = g_j(β).
struct LinkedModel {
    std::size_t dimension = 1;  // at most 5
    std::vector<VectorFn> links;
    VectorFn focus;
    std::size_t pivot = 0;
    std::function<std::optional<double>(const std::vector<double>&, double)> solve_pivot;
    std::vector<numerics::Interval> bounds;
    std::vector<double> start;
};

// Quadratic trend μ(x) = β0 + β1 x + β2 x² observed at the given x_j, with
// the focus x* = −β1/(2β2) (the vertex). β1 is the pivot.
LinkedModel parabola_vertex_model(const std::vector<double>& x, std::vector<double> start,
                                  std::vector<numerics::Interval> bounds);

FusionResult fuse_linked(const std::vector<ConfidenceLogLik>& lls, const LinkedModel& model,
                         const ParamGrid& focus_grid, const ProfileOptions& options = {});

// ℓ_prof + ℓ_B, evaluated on the profile's grid and renormalised.
FusionResult add_prior(const FusionResult& fused, const ConfidenceLogLik& prior,
                       const std::vector<double>& levels = kDefaultLevels);

// Σ w_j ℓ_j on the union of the grids over their common range, renormalised.
// The result is not calibrated; Wilks on it is only approximate.
ConfidenceLogLik fuse_weighted(const std::vector<ConfidenceLogLik>& lls, const std::vector<double>& weights);

}  // namespace ccfuse
