#pragma once

#include <functional>
#include <vector>

namespace ccfuse::numerics {

struct KsResult {
    double statistic;
    double p_value;
};

// One-sample Kolmogorov-Smirnov test against a continuous c.d.f.
KsResult ks_test(std::vector<double> sample, const std::function<double(double)>& cdf);
KsResult ks_uniform(std::vector<double> sample);

// Asymptotic Kolmogorov tail probability P(K > lambda).
double kolmogorov_sf(double lambda);

double mean(const std::vector<double>& v);
double variance(const std::vector<double>& v);
// Median of the values; sorts a copy.
double median(std::vector<double> v);

}  // namespace ccfuse::numerics
