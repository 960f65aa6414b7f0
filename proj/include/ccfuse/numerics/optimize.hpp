#pragma once

#include "ccfuse/numerics/roots.hpp"

#include <functional>
#include <vector>

namespace ccfuse::numerics {

struct ScalarMinimum {
    double x;
    double value;
    int evaluations;
};

// Brent's golden-section + parabolic minimizer on a closed interval. Both
// endpoints are evaluated as well, so a minimum on the boundary is found.
// f may return +inf (treated as infeasible); NaN or -inf throws
// NumericalError naming the offending location.
ScalarMinimum minimize_scalar(const ScalarFn& f, Interval bracket, double tol = 1e-8,
                              int max_iter = 2000);

using VectorFn = std::function<double(const std::vector<double>&)>;

struct NelderMeadOptions {
    double tol = 1e-6;
    int max_iter = 2000;
    // Initial simplex edge per coordinate; empty means max(0.1, 0.1 * |x_i|).
    std::vector<double> initial_step;
    int restarts = 1;
};

struct VectorMinimum {
    std::vector<double> x;
    double value;
    int iterations;
    bool converged;
};

// Derivative-free simplex minimisation. The returned value never exceeds
// f(start).
VectorMinimum minimize_multivariate(const VectorFn& f, std::vector<double> start,
                                    const NelderMeadOptions& options = {});

}  // namespace ccfuse::numerics
