#pragma once

#include <functional>
#include <vector>

namespace ccfuse::numerics {

struct Interval {
    double lo;
    double hi;
    double width() const { return hi - lo; }
    bool contains(double x) const { return x >= lo && x <= hi; }
};

using ScalarFn = std::function<double(double)>;

// Brent's method. Requires f(lo) * f(hi) <= 0, otherwise throws BracketError.
// Returns a point within tol of a sign change of f.
double find_root(const ScalarFn& f, Interval bracket, double tol = 1e-12, int max_iter = 500);

// Scans [lo, hi] on n equal steps and returns every sub-interval where f
// changes sign (including exact zeros at scan points).
std::vector<Interval> scan_sign_changes(const ScalarFn& f, Interval range, int n);

}  // namespace ccfuse::numerics
