#pragma once

#include "ccfuse/numerics/roots.hpp"

#include <vector>

namespace ccfuse::numerics {

// Nodes x_i and log-weights for ∫ exp(-x²) g(x) dx ≈ Σ w_i g(x_i).
struct GaussHermiteRule {
    std::vector<double> nodes;
    std::vector<double> log_weights;
};

// Rules are computed once per node count and cached (thread-safe).
const GaussHermiteRule& gauss_hermite_rule(int nodes);

struct GaussHermiteOptions {
    int nodes = 30;
    // Re-evaluate with 1.5x the nodes and reject the result if the two
    // disagree by more than verify_tol in log scale. Catches integrands with
    // jumps, which Gauss-Hermite cannot handle.
    bool verify = false;
    double verify_tol = 1e-6;
};

// log ∫ exp(log_f(u)) du using the substitution u = center + √2·scale·x.
// Any non-finite node evaluation raises QuadratureError naming the node.
double integrate_gauss_hermite(const ScalarFn& log_f, double center, double scale,
                               const GaussHermiteOptions& options = {});

// log ∫ exp(ℓ(u)) du ≈ ℓ(û) + ½log(2π) − ½log(−ℓ''(û)), with ℓ'' by central
// differences (step 1e-3·(1+|û|)). Throws FlatModeError when no interior
// mode exists or the curvature is not negative.
double laplace_log_integral(const ScalarFn& log_f, double start, double initial_halfwidth = 1.0);

struct AdaptiveQuadratureOptions {
    int nodes = 30;
    // Beyond this many integrand evaluations, fall back to Laplace.
    int max_evaluations = 2000;
    // Treat log_f = -inf as a zero integrand instead of an error.
    bool allow_zero_integrand = false;
    bool force_laplace = false;
};

struct AdaptiveQuadratureResult {
    double log_integral;
    double mode;
    double scale;
    bool used_laplace;
    int evaluations;
};

// Gauss-Hermite re-centred at the mode of log_f with scale 1/√(−ℓ''(mode)).
// scale_hint sets the initial search width for the mode.
AdaptiveQuadratureResult integrate_adaptive(const ScalarFn& log_f, double start,
                                            double scale_hint,
                                            const AdaptiveQuadratureOptions& options = {});

}  // namespace ccfuse::numerics
