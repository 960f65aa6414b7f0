#include "ccfuse/cd/convert.hpp"

#include "ccfuse/error.hpp"
#include "ccfuse/numerics/special.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace ccfuse {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

ConfidenceLogLik chi2_convert(const ConfidenceCurve& cc) {
    std::vector<double> v(cc.values.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double c = cc.values[i];
        if (!(c >= 0.0 && c <= 1.0)) throw InvalidArgument("chi2_convert: cc value outside [0, 1]");
        v[i] = c >= kCcExclusion ? -kInf : -0.5 * numerics::chi2_quantile(c, 1.0);
    }
    return {cc.grid, std::move(v)};
}

ConfidenceLogLik normal_convert(const ConfidenceDistribution& cd) {
    std::vector<double> v(cd.values.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double c = cd.values[i];
        if (!(c >= 0.0 && c <= 1.0)) throw InvalidArgument("normal_convert: CD value outside [0, 1]");
        if (std::fabs(1.0 - 2.0 * c) >= kCcExclusion) {
            v[i] = -kInf;
        } else {
            const double z = numerics::norm_quantile(c);
            v[i] = -0.5 * z * z;
        }
    }
    return {cd.grid, std::move(v)};
}

ConfidenceLogLik exact_convert(const CdFamily& family, double t_obs, const ParamGrid& grid) {
    if (!std::isfinite(t_obs)) throw InvalidArgument("exact_convert: observed statistic not finite");
    // Central differences at h and h/2 combined by Richardson extrapolation;
    // a small h alone loses too many digits where dC/dt is tiny.
    const double h = 1e-3 * (1.0 + std::fabs(t_obs));
    const auto central = [&](double psi, double step) {
        return (family(psi, t_obs + step) - family(psi, t_obs - step)) / (2.0 * step);
    };
    std::vector<double> v(grid.size());
    int sign = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double d1 = central(grid[i], h), d2 = central(grid[i], 0.5 * h);
        const double d = (4.0 * d2 - d1) / 3.0;
        if (std::isnan(d)) throw NumericalError("exact_convert: NaN derivative");
        if (d == 0.0) {
            v[i] = -kInf;
            continue;
        }
        const int s = d > 0 ? 1 : -1;
        if (sign != 0 && s != sign) {
            std::ostringstream os;
            os << "exact_convert: dC/dt changes sign at psi = " << grid[i];
            throw MonotonicityError(os.str());
        }
        sign = s;
        v[i] = std::log(std::fabs(d));
    }
    return {grid, std::move(v)};
}

}  // namespace ccfuse
