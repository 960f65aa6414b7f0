#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace ccfuse {

// Strictly increasing, finite parameter axis with at least two points.
class ParamGrid {
public:
    ParamGrid() = default;
    explicit ParamGrid(std::vector<double> values);

    static ParamGrid linspace(double lo, double hi, std::size_t n);
    // Union of a base grid and extra points (duplicates removed).
    static ParamGrid merged(const std::vector<double>& base, const std::vector<double>& extra);

    std::size_t size() const { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }
    double front() const { return values_.front(); }
    double back() const { return values_.back(); }
    const std::vector<double>& values() const { return values_; }
    bool contains(double x) const { return x >= front() && x <= back(); }
    // Index i with values[i] <= x <= values[i+1]; requires contains(x).
    std::size_t segment(double x) const;

private:
    std::vector<double> values_;
};

// A confidence distribution C(ψ) tabulated on a grid. Between grid points it
// is linear; below the grid it is 0 and above it 1. A declared boundary mass
// sits at the lower grid end and equals C there.
struct ConfidenceDistribution {
    ParamGrid grid;
    std::vector<double> values;
    double boundary_mass_at_lo = 0.0;
    bool has_boundary_mass = false;

    ConfidenceDistribution() = default;
    ConfidenceDistribution(ParamGrid g, std::vector<double> v);

    double at(double psi) const;
    // Smallest ψ on the grid line with C(ψ) >= p, by linear inversion.
    double quantile(double p) const;
    // Enforces the invariants; throws InvalidArgument when violated.
    void validate() const;
};

// cc(ψ) = |1 - 2C(ψ)| or any curve with values in [0, 1]; no monotonicity.
struct ConfidenceCurve {
    ParamGrid grid;
    std::vector<double> values;
    double boundary_mass_at_lo = 0.0;
    bool has_boundary_mass = false;

    ConfidenceCurve() = default;
    ConfidenceCurve(ParamGrid g, std::vector<double> v);

    // Linear interpolation; 1 outside the grid.
    double at(double psi) const;
    std::size_t argmin() const;
    void validate() const;
};

// Confidence log-likelihood, normalised to max 0. Values of -inf mark
// parameter values excluded by the source.
struct ConfidenceLogLik {
    ParamGrid grid;
    std::vector<double> values;
    std::size_t argmax = 0;

    ConfidenceLogLik() = default;
    // Normalises raw values (subtracts the finite maximum). Throws
    // DegenerateData when every value is -inf, InvalidArgument on NaN/+inf.
    ConfidenceLogLik(ParamGrid g, std::vector<double> raw);

    // Monotone cubic Hermite interpolation with slopes from local
    // quadratics, limited per cell (Fritsch-Carlson). Quadratics are
    // reproduced exactly except in the cells around their vertex, and the
    // interpolant stays between the two node values of each cell. -inf
    // outside the grid or next to a -inf node.
    double at(double psi) const;
    double argmax_value() const { return grid[argmax]; }
};

struct DevianceCurve {
    ParamGrid grid;
    std::vector<double> values;
};

struct StudySummary {
    double estimate = 0.0;
    double stddev = 1.0;
    std::optional<int> df;

    void validate() const;
};

}  // namespace ccfuse
