#pragma once

// Threshold-based wave and vortex extraction for the partial dam break.
// The thresholds are ours; the extracted numbers are reported, not gated.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "swell/core.hpp"

namespace swell::bench {

struct DamBreakFeatures {
    double shock_position = std::numeric_limits<double>::quiet_NaN();
    double shock_amplitude = std::numeric_limits<double>::quiet_NaN();
    double rarefaction_head = std::numeric_limits<double>::quiet_NaN();
    double rarefaction_tail = std::numeric_limits<double>::quiet_NaN();
    double rarefaction_size = std::numeric_limits<double>::quiet_NaN();
    double rarefaction_amplitude = std::numeric_limits<double>::quiet_NaN();
    double vortex_depth = std::numeric_limits<double>::quiet_NaN();
    double vortex_size = 0.0;
};

inline constexpr double kUpstreamLevel = 10.0;
inline constexpr double kDownstreamLevel = 5.0;
inline constexpr double kShockThreshold = 0.05;
inline constexpr double kHeadThreshold = 0.01;

/// Free surface along y = 0, averaged over the rows adjacent to the line.
inline std::vector<double> centerline_surface(const Grid2D& grid, const FieldSet& f) {
    int jb = static_cast<int>(std::floor((0.0 - grid.y0) / grid.dy - 0.5));
    jb = std::clamp(jb, 0, grid.ny - 1);
    const int jt = std::min(jb + 1, grid.ny - 1);
    const double wt = std::clamp((0.0 - grid.yc(jb)) / grid.dy, 0.0, 1.0);
    std::vector<double> eta(static_cast<std::size_t>(grid.nx));
    for (int i = 0; i < grid.nx; ++i) {
        const std::size_t b = grid.index(i, jb), t = grid.index(i, jt);
        eta[i] = (1.0 - wt) * (f.w[b].h + f.z[b]) + wt * (f.w[t].h + f.z[t]);
    }
    return eta;
}

/// Linear interpolation of the location where eta crosses `level` between
/// cells i and i + 1.
inline double crossing(const Grid2D& grid, const std::vector<double>& eta, int i, double level) {
    const double a = eta[i], b = eta[i + 1];
    const double s = a == b ? 0.5 : std::clamp((level - a) / (b - a), 0.0, 1.0);
    return grid.xc(i) + s * grid.dx;
}

inline DamBreakFeatures extract_dam_break_features(const Grid2D& grid, const FieldSet& f) {
    DamBreakFeatures r;
    const auto eta = centerline_surface(grid, f);
    const int n = grid.nx;

    // Shock: first rise above the downstream level scanning from the right.
    const double shock_level = kDownstreamLevel + kShockThreshold;
    for (int i = n - 2; i >= 0; --i) {
        if (eta[i] > shock_level && eta[i + 1] <= shock_level) {
            r.shock_position = crossing(grid, eta, i, shock_level);
            double peak = eta[i];
            for (int m = i; m >= 0 && grid.xc(i) - grid.xc(m) <= 10.0; --m) peak = std::max(peak, eta[m]);
            r.shock_amplitude = peak - kDownstreamLevel;
            break;
        }
    }

    // Rarefaction: head where the reservoir first drops, tail where the
    // surface reaches its minimum before the breach.
    const double head_level = kUpstreamLevel - kHeadThreshold;
    int head = -1;
    for (int i = 0; i + 1 < n && grid.xc(i) < -5.0; ++i)
        if (eta[i] >= head_level && eta[i + 1] < head_level) {
            r.rarefaction_head = crossing(grid, eta, i, head_level);
            head = i + 1;
            break;
        }
    if (head >= 0) {
        int tail = head;
        for (int i = head; i < n && grid.xc(i) < -5.0; ++i)
            if (eta[i] < eta[tail]) tail = i;
        r.rarefaction_tail = grid.xc(tail);
        r.rarefaction_size = r.rarefaction_tail - r.rarefaction_head;
        r.rarefaction_amplitude = eta[head - 1] - eta[tail];
    }

    // Top vortex: deepest free surface behind the upper dam edge, and the
    // area it covers below the initial downstream level.
    double depth = std::numeric_limits<double>::infinity();
    for (int j = 0; j < grid.ny; ++j)
        for (int i = 0; i < n; ++i) {
            const double x = grid.xc(i), y = grid.yc(j);
            if (x < 5.0 || x > 35.0 || y < 25.0 || y > 55.0) continue;
            const std::size_t k = grid.index(i, j);
            const double e = f.w[k].h + f.z[k];
            depth = std::min(depth, e);
            if (e < kDownstreamLevel) r.vortex_size += grid.dx * grid.dy;
        }
    if (std::isfinite(depth)) r.vortex_depth = depth;
    return r;
}

}  // namespace swell::bench
