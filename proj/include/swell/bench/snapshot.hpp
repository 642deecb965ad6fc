#pragma once

// Field snapshots as CSV, one row per interior cell in row-major order.

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "swell/core.hpp"
#include "swell/wb_correction.hpp"

namespace swell::bench {

inline constexpr const char* kSnapshotHeader = "x,y,h,qx,qy,z,eta,theta_x,theta_y,cpd";

struct SnapshotRow {
    double x, y, h, qx, qy, z, eta, theta_x, theta_y;
    int cpd;
};

/// Writes the interior cells; theta and cpd may be empty (written as zero).
inline void write_snapshot(const std::string& path, const Grid2D& grid, const FieldSet& f,
                           const wb::ThetaField& theta, const std::vector<int>& cpd) {
    std::FILE* out = std::fopen(path.c_str(), "w");
    if (!out) throw std::runtime_error("cannot write snapshot '" + path + "'");
    std::fprintf(out, "%s\n", kSnapshotHeader);
    for (int j = 0; j < grid.ny; ++j)
        for (int i = 0; i < grid.nx; ++i) {
            const std::size_t k = grid.index(i, j);
            const std::size_t c = static_cast<std::size_t>(i) + static_cast<std::size_t>(j) * grid.nx;
            const State& w = f.w[k];
            const double tx = c < theta.x.size() ? theta.x[c] : 0.0;
            const double ty = c < theta.y.size() ? theta.y[c] : 0.0;
            const int d = c < cpd.size() ? cpd[c] : 0;
            std::fprintf(out, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d\n", grid.xc(i), grid.yc(j),
                         w.h, w.qx, w.qy, f.z[k], w.h + f.z[k], tx, ty, d);
        }
    if (std::fclose(out) != 0) throw std::runtime_error("failed to close snapshot '" + path + "'");
}

inline std::vector<SnapshotRow> read_snapshot(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read snapshot '" + path + "'");
    std::string line;
    if (!std::getline(in, line) || line != kSnapshotHeader)
        throw std::runtime_error("snapshot '" + path + "' has an unexpected header");
    std::vector<SnapshotRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        SnapshotRow r{};
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf,%lf,%lf,%lf,%lf,%lf,%d", &r.x, &r.y, &r.h, &r.qx, &r.qy, &r.z,
                        &r.eta, &r.theta_x, &r.theta_y, &r.cpd) != 10)
            throw std::runtime_error("malformed snapshot row: " + line);
        rows.push_back(r);
    }
    return rows;
}

}  // namespace swell::bench
