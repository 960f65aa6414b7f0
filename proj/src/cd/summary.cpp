#include "ccfuse/cd/summary.hpp"

#include "ccfuse/error.hpp"

#include <sstream>

namespace ccfuse {

namespace {

double crossing(double x0, double x1, double y0, double y1, double level) {
    if (y1 == y0) return x0;
    return x0 + (level - y0) / (y1 - y0) * (x1 - x0);
}

}  // namespace

CurveSummary summarize(const ConfidenceCurve& cc, double level) {
    if (!(level > 0.0 && level < 1.0)) throw InvalidArgument("summarize: level outside (0, 1)");
    cc.validate();
    const auto& g = cc.grid;
    const auto& v = cc.values;
    const std::size_t n = v.size();

    CurveSummary out;
    out.level = level;
    out.boundary_mass = cc.boundary_mass_at_lo;
    out.has_boundary_mass = cc.has_boundary_mass;

    const std::size_t i_min = cc.argmin();
    std::size_t j = i_min;
    while (j + 1 < n && v[j + 1] == v[i_min]) ++j;
    out.point_estimate = 0.5 * (g[i_min] + g[j]);

    std::size_t i = 0;
    while (i < n) {
        if (v[i] > level) {
            ++i;
            continue;
        }
        IntervalPiece piece{};
        if (i == 0) {
            piece.lo = g[0];
            piece.lo_open = !cc.has_boundary_mass;
        } else {
            piece.lo = crossing(g[i - 1], g[i], v[i - 1], v[i], level);
        }
        std::size_t k = i;
        while (k + 1 < n && v[k + 1] <= level) ++k;
        if (k == n - 1) {
            piece.hi = g[n - 1];
            piece.hi_open = true;
        } else {
            piece.hi = crossing(g[k], g[k + 1], v[k], v[k + 1], level);
        }
        out.intervals.push_back(piece);
        i = k + 1;
    }
    if (out.intervals.empty()) {
        std::ostringstream os;
        os << "summarize: confidence curve stays above level " << level << " on the whole grid";
        throw DegenerateData(os.str());
    }
    return out;
}

}  // namespace ccfuse
