#pragma once

#include "ccfuse/cd/types.hpp"

#include <optional>
#include <vector>

namespace ccfuse {

// Default grid for a summary: 512 points over estimate ± 6 stddev.
ParamGrid default_grid(const StudySummary& s, std::size_t points = 512, double span_sd = 6.0);

// C(ψ) = Φ((ψ - estimate) / stddev). The grid must cover estimate ± 4 stddev
// (GridCoverageError otherwise).
ConfidenceDistribution normal_cd(const StudySummary& s, const ParamGrid& grid);
ConfidenceDistribution normal_cd(const StudySummary& s);

// C(ψ) = F_df((ψ - estimate) / stddev) with the Student t c.d.f.
ConfidenceDistribution t_cd(const StudySummary& s, const ParamGrid& grid);
ConfidenceDistribution t_cd(const StudySummary& s);

ConfidenceCurve cc_from_cd(const ConfidenceDistribution& cd);

DevianceCurve deviance_from_loglik(const ConfidenceLogLik& ll);
// cc = Γ₁(D).
ConfidenceCurve cc_from_deviance(const DevianceCurve& d);

// Nonparametric CD for the median. At the r-th order statistic
// C = 1 - I_½(r, n-r+1), linear in between, 0 below the sample minimum and 1
// above the maximum. The sample points are added to the grid. Tied values
// are separated by a deterministic jitter of at most 1e-9 times the range.
ConfidenceDistribution median_cd_distribution(std::vector<double> sample,
                                              const std::optional<ParamGrid>& grid = std::nullopt);
ConfidenceCurve median_cd(std::vector<double> sample,
                          const std::optional<ParamGrid>& grid = std::nullopt);

struct IntervalCd {
    ConfidenceDistribution cd;
    double a = 1.0;
    double s = 1.0;
    // True when |a| < 1e-3 and the logarithm replaced the power transform.
    bool log_transform = false;
    // Every root of the power-transform equations found on [-2, 2]\{0}.
    std::vector<double> roots;
};

// CD from a (median, lower, upper) summary at confidence `level` via the
// power transform h(ψ) = sgn(a)ψ^a: C(ψ) = Φ((h(ψ) - h(median)) / s), with
// (a, s) solving h(lo) - h(median) = -z s and h(hi) - h(median) = z s.
// Throws TransformFailure when no root exists on the search range.
IntervalCd cd_from_interval(double median, double lo, double hi, double level,
                            std::size_t points = 512);

}  // namespace ccfuse
