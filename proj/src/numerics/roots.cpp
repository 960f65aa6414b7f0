#include "ccfuse/numerics/roots.hpp"

#include "ccfuse/error.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

namespace ccfuse::numerics {

double find_root(const ScalarFn& f, Interval bracket, double tol, int max_iter) {
    if (!(bracket.lo <= bracket.hi)) throw InvalidArgument("find_root: bracket lo > hi");
    double a = bracket.lo, b = bracket.hi;
    double fa = f(a), fb = f(b);
    if (std::isnan(fa) || std::isnan(fb)) throw NumericalError("find_root: NaN at bracket end");
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if ((fa > 0) == (fb > 0)) {
        std::ostringstream os;
        os << "find_root: no sign change on [" << a << ", " << b << "] (f = " << fa << ", "
           << fb << ")";
        throw BracketError(os.str());
    }
    constexpr double eps = std::numeric_limits<double>::epsilon();
    double c = a, fc = fa, d = b - a, e = d;
    for (int it = 0; it < max_iter; ++it) {
        if ((fb > 0) == (fc > 0)) {
            c = a;
            fc = fa;
            d = e = b - a;
        }
        if (std::fabs(fc) < std::fabs(fb)) {
            a = b; b = c; c = a;
            fa = fb; fb = fc; fc = fa;
        }
        const double tol1 = 2.0 * eps * std::fabs(b) + 0.5 * tol;
        const double xm = 0.5 * (c - b);
        if (std::fabs(xm) <= tol1 || fb == 0.0) return b;
        if (std::fabs(e) >= tol1 && std::fabs(fa) > std::fabs(fb)) {
            // Inverse quadratic interpolation (secant when only two points).
            double p, q, r;
            const double s = fb / fa;
            if (a == c) {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                q = fa / fc;
                r = fb / fc;
                p = s * (2.0 * xm * q * (q - r) - (b - a) * (r - 1.0));
                q = (q - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0) q = -q;
            p = std::fabs(p);
            const double min1 = 3.0 * xm * q - std::fabs(tol1 * q);
            const double min2 = std::fabs(e * q);
            if (2.0 * p < std::min(min1, min2)) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += (std::fabs(d) > tol1) ? d : (xm > 0 ? tol1 : -tol1);
        fb = f(b);
        if (std::isnan(fb)) throw NumericalError("find_root: NaN during iteration");
    }
    return b;
}

std::vector<Interval> scan_sign_changes(const ScalarFn& f, Interval range, int n) {
    if (n < 1) throw InvalidArgument("scan_sign_changes: need at least one step");
    std::vector<Interval> out;
    const double h = range.width() / n;
    double x0 = range.lo;
    double f0 = f(x0);
    for (int i = 1; i <= n; ++i) {
        const double x1 = (i == n) ? range.hi : range.lo + i * h;
        const double f1 = f(x1);
        if (std::isfinite(f0) && std::isfinite(f1)) {
            if (f0 == 0.0) {
                out.push_back({x0, x0});
            } else if ((f0 > 0) != (f1 > 0) && f1 != 0.0) {
                out.push_back({x0, x1});
            }
        }
        x0 = x1;
        f0 = f1;
    }
    if (std::isfinite(f0) && f0 == 0.0) out.push_back({x0, x0});
    return out;
}

}  // namespace ccfuse::numerics
