#pragma once

#include "ccfuse/cd/types.hpp"
#include "ccfuse/numerics/rng.hpp"

#include <cstddef>
#include <functional>
#include <vector>

namespace ccfuse::bench {

// Y_j ~ Gamma(a_j, rate θ) with known shape a_j.
struct GammaSource {
    double a = 1.0;
    double y = 1.0;
};

void validate_gamma_sources(const std::vector<GammaSource>& sources);
double gamma_a_dot(const std::vector<GammaSource>& sources);
double gamma_y_dot(const std::vector<GammaSource>& sources);

// C(θ) = G(θy, a), the Gamma(a, 1) c.d.f. at θy.
ConfidenceDistribution gamma_cd(double a, double y, const ParamGrid& grid);

// C*(θ) = G(θy·, a·).
ConfidenceDistribution gamma_fused_cd(const std::vector<GammaSource>& sources, const ParamGrid& grid);
double gamma_fused_cdf(const std::vector<GammaSource>& sources, double theta);

// ML estimate a·/y· and the fused deviance
// D(θ) = 2a·{log(θ̂/θ) − (θ̂ − θ)/θ̂}.
double gamma_ml(const std::vector<GammaSource>& sources);
double gamma_deviance(const std::vector<GammaSource>& sources, double theta);

// Simulated law H of D = 2a·(V − 1 − log V), V ~ Gamma(a·, 1)/a·. It does
// not depend on θ, so one table serves every data set with the same a·.
class GammaDevianceLaw {
public:
    GammaDevianceLaw(double a_dot, std::size_t sims, numerics::RngStream rng);

    double a_dot() const { return a_dot_; }
    std::size_t sims() const { return draws_.size(); }
    // Empirical c.d.f.
    double cdf(double d) const;
    // Smallest simulated d with cdf(d) >= p.
    double quantile(double p) const;

private:
    double a_dot_;
    std::vector<double> draws_;  // sorted
};

// cc(θ) = H(D(θ)), the simulation-calibrated curve; requires sims >= 1000.
ConfidenceCurve gamma_exact_cc(const std::vector<GammaSource>& sources, const ParamGrid& grid, std::size_t sims,
                               numerics::RngStream rng);
ConfidenceCurve gamma_exact_cc(const std::vector<GammaSource>& sources, const ParamGrid& grid,
                               const GammaDevianceLaw& law);

// Mode of the product of the per-source confidence densities,
// θ̃ = (a· − k)/y·. `positive` is false when a· <= k.
struct DensityEstimate {
    double value = 0.0;
    bool positive = true;
};
DensityEstimate gamma_density_estimator(const std::vector<GammaSource>& sources);

// The product of confidence densities normalised over θ > 0:
// Gamma(a· − k + 1, rate y·). Requires a· − k + 1 > 0.
double gamma_density_cdf(const std::vector<GammaSource>& sources, double theta);

// Φ(Σ w_j Φ⁻¹(G(θy_j, a_j))) with w_j = (a_j/a·)^{1/2}.
double gamma_sxs_cdf(const std::vector<GammaSource>& sources, double theta);
ConfidenceDistribution gamma_sxs_cd(const std::vector<GammaSource>& sources, const ParamGrid& grid);
// Inverse of gamma_sxs_cdf at p in (0, 1), by root finding in log θ.
double gamma_sxs_quantile(const std::vector<GammaSource>& sources, double p);

// ---------------------------------------------------------------------------
// risk

struct RiskEstimate {
    double risk = 0.0;
    double se = 0.0;
    std::size_t sims = 0;
};

using DataSampler = std::function<std::vector<double>(numerics::Generator&)>;
// One draw ψ_cd from the CD built on `data`.
using CdSampler = std::function<double(const std::vector<double>& data, numerics::Generator&)>;

// Two-stage Monte Carlo of E|ψ_cd − ψ|: data from the model, then one draw
// from the resulting CD. Draw i uses rng.child(i), so the estimate does not
// depend on the thread count.
RiskEstimate confidence_risk(const DataSampler& data, const CdSampler& cd, double truth, std::size_t sims,
                             numerics::RngStream rng, int threads = 0);

enum class GammaMethod { optimal, sxs, density };
const char* gamma_method_name(GammaMethod m);

// Each method's CD and its inverse (p in (0, 1)).
double gamma_method_cdf(GammaMethod m, const std::vector<GammaSource>& sources, double theta);
double gamma_method_quantile(GammaMethod m, const std::vector<GammaSource>& sources, double p);

// Draw from each method's CD given the observed y (shapes fixed).
double gamma_cd_draw(GammaMethod m, const std::vector<GammaSource>& sources, numerics::Generator& gen);

RiskEstimate gamma_risk(GammaMethod m, const std::vector<double>& shapes, double theta, std::size_t sims,
                        numerics::RngStream rng, int threads = 0);

// r₀ = E|G₁/G₂ − 1|, G₁, G₂ iid Gamma(a·, 1); the optimal CD has risk r₀θ.
RiskEstimate gamma_r0(double a_dot, std::size_t sims, numerics::RngStream rng);

}  // namespace ccfuse::bench
