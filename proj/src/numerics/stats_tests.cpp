#include "ccfuse/numerics/stats_tests.hpp"

#include "ccfuse/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ccfuse::numerics {

double kolmogorov_sf(double lambda) {
    if (lambda <= 0.0) return 1.0;
    if (lambda < 0.2) return 1.0;
    double sum = 0.0;
    for (int j = 1; j <= 100; ++j) {
        const double term = std::exp(-2.0 * j * j * lambda * lambda);
        sum += (j % 2 ? 1.0 : -1.0) * term;
        if (term < 1e-16) break;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_test(std::vector<double> sample, const std::function<double(double)>& cdf) {
    if (sample.empty()) throw InvalidArgument("ks_test: empty sample");
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double f = cdf(sample[i]);
        d = std::max({d, (i + 1) / n - f, f - i / n});
    }
    const double sn = std::sqrt(n);
    // Stephens' small-sample adjustment.
    return {d, kolmogorov_sf((sn + 0.12 + 0.11 / sn) * d)};
}

KsResult ks_uniform(std::vector<double> sample) {
    return ks_test(std::move(sample), [](double u) { return std::clamp(u, 0.0, 1.0); });
}

double mean(const std::vector<double>& v) {
    if (v.empty()) throw InvalidArgument("mean: empty input");
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double variance(const std::vector<double>& v) {
    if (v.size() < 2) throw InvalidArgument("variance: need at least two values");
    const double m = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return s / static_cast<double>(v.size() - 1);
}

double median(std::vector<double> v) {
    if (v.empty()) throw InvalidArgument("median: empty input");
    const std::size_t n = v.size();
    std::nth_element(v.begin(), v.begin() + n / 2, v.end());
    const double hi = v[n / 2];
    if (n % 2) return hi;
    const double lo = *std::max_element(v.begin(), v.begin() + n / 2);
    return 0.5 * (lo + hi);
}

}  // namespace ccfuse::numerics
