#pragma once

#include "ccfuse/cd/types.hpp"

#include <vector>

namespace ccfuse {

struct IntervalPiece {
    double lo;
    double hi;
    // Set when the piece runs into the grid end, so the true endpoint may lie
    // beyond the tabulated range.
    bool lo_open = false;
    bool hi_open = false;
};

struct CurveSummary {
    double level = 0.0;
    double point_estimate = 0.0;
    std::vector<IntervalPiece> intervals;
    double boundary_mass = 0.0;
    bool has_boundary_mass = false;
};

// Point estimate = grid argmin of cc (middle of a run of tied minima);
// region = {ψ : cc(ψ) <= level} as a union of intervals with linearly
// interpolated endpoints. With a boundary mass the region is closed at the
// lower end. Throws DegenerateData when cc never drops to `level`.
CurveSummary summarize(const ConfidenceCurve& cc, double level);

}  // namespace ccfuse
