#pragma once

#include "ccfuse/cd/types.hpp"
#include "ccfuse/numerics/rng.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ccfuse::bench {

// Pairs (y1j, y2j) ~ N(μ_j, σ²) with a nuisance mean per pair.
using NeymanScottData = std::vector<std::pair<double, double>>;

// gold: exact CD 1 − Γ_k(ΣS²/σ²); standard: Wilks on the summed profiles
// −2k log σ − ½ΣS²/σ²; corrected: Wilks on −k log σ − ½ΣS²/σ².
enum class NeymanScottVariant { gold, standard, corrected };

NeymanScottVariant parse_neyman_scott_variant(const std::string& name);
const char* neyman_scott_variant_name(NeymanScottVariant v);

// ΣS_j² with S_j² = ½(y1j − y2j)². Throws DegenerateData when it is 0.
double neyman_scott_ss(const NeymanScottData& data);

// σ̂ = (ΣS²/(2k))^{1/2} for standard; (ΣS²/k)^{1/2} for corrected;
// the median-confidence value for gold.
double neyman_scott_estimate(const NeymanScottData& data, NeymanScottVariant v);

// Curve on the grid with the variant's estimate inserted (cc = 0 there).
// The default grid spans [0.2, 4] times the corrected estimate, 801 points.
ConfidenceCurve neyman_scott(const NeymanScottData& data, NeymanScottVariant v,
                             const std::optional<ParamGrid>& grid = {});

// k pairs with μ_j ~ unif(mu_lo, mu_hi).
NeymanScottData neyman_scott_sample(std::size_t k, double sigma, double mu_lo, double mu_hi,
                                    numerics::Generator& gen);

NeymanScottData read_neyman_scott_csv(const std::string& path);  // header y1,y2

// sup |a − b| over a fine grid of the common range (both curves evaluated
// by interpolation).
double sup_distance(const ConfidenceCurve& a, const ConfidenceCurve& b, std::size_t points = 4001);

}  // namespace ccfuse::bench
