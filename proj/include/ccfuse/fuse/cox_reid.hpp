#pragma once

#include "ccfuse/cd/types.hpp"
#include "ccfuse/fuse/result.hpp"
#include "ccfuse/numerics/roots.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace ccfuse {

// ℓ(ψ, λ) with focus ψ and nuisance λ, assumed orthogonal by the caller.
struct CoxReidProblem {
    std::function<double(double psi, const std::vector<double>& lambda)> loglik;
    std::vector<double> lambda_start;
    std::vector<numerics::Interval> lambda_bounds;
};

struct CoxReidProfile {
    ParamGrid grid;
    std::vector<double> profile;     // ℓ(ψ, λ̂(ψ))
    std::vector<double> correction;  // −½ log det J_λλ, 0 where skipped
    std::vector<std::vector<double>> lambda_hat;
    std::vector<bool> skipped;
    int evaluations = 0;
};

// λ̂(ψ) over the bounds (Brent for one nuisance, Nelder-Mead with warm
// starts otherwise).
std::vector<double> maximise_nuisance(const CoxReidProblem& problem, double psi,
                                      const std::vector<double>& start, int* evaluations = nullptr);

// −½ log det J_λλ(ψ, λ) with J by central differences, step 1e-4(1+|λ_i|);
// nullopt when J is not positive definite.
std::optional<double> cox_reid_term(const CoxReidProblem& problem, double psi, const std::vector<double>& lambda);

CoxReidProfile cox_reid_profile(const CoxReidProblem& problem, const ParamGrid& grid);

// Corrected profile ℓ_prof − ½ log det J_λλ, Wilks-calibrated.
FusionResult cox_reid_generic(const CoxReidProblem& problem, const ParamGrid& grid,
                              const std::vector<double>& levels = kDefaultLevels);

}  // namespace ccfuse
