#pragma once

// High-order spatial operator: per-cell polynomial traces at Gauss points,
// quadrature interface fluxes, and cell-integral topography and friction
// sources.

#include <array>
#include <cmath>
#include <vector>

#include "swell/core.hpp"
#include "swell/reconstruction.hpp"
#include "swell/riemann1d.hpp"
#include "swell/scheme_fo.hpp"
#include "swell/ssprk.hpp"

namespace swell::ho {

/// Reconstructed (h, qx, qy, z) at a point.
struct PointValues {
    double h = 0.0, qx = 0.0, qy = 0.0, z = 0.0;
};

enum Edge { kWest = 0, kEast = 1, kSouth = 2, kNorth = 3 };

/// Reconstruction state for the interior plus one ghost ring, together with
/// high-order interface fluxes and cell sources. Reused across stages.
class HoContext {
public:
    static constexpr int kVars = 4;  // h, qx, qy, h + z

    HoContext(const Grid2D& grid, int degree)
        : grid_(grid), degree_(degree), rule_(recon::gauss_nodes(degree)),
          plan_(recon::build_plan(degree, grid.dx, grid.dy)) {
        ng_ = static_cast<int>(rule_.nodes.size());
        nc_ = plan_.n_coef();
        rw_ = grid.nx + 2;
        const std::size_t ring = static_cast<std::size_t>(grid.nx + 2) * (grid.ny + 2);
        deg_.assign(ring, 0);
        edge_.assign(ring * 4 * ng_, {});
        pts_.assign(ring * ng_ * ng_, {});
        gradz_.assign(ring * ng_ * ng_, {0.0, 0.0});
        ghost_degree_ = grid.ghost >= recon::stencil_radius(degree) + 1 ? degree : 0;
        build_tables();
    }

    const Grid2D& grid() const { return grid_; }
    int degree() const { return degree_; }
    int gauss_points() const { return ng_; }
    const recon::GaussRule& rule() const { return rule_; }
    const recon::ReconstructionPlan& plan() const { return plan_; }

    std::size_t ring_index(int i, int j) const {
        return static_cast<std::size_t>(j + 1) * rw_ + static_cast<std::size_t>(i + 1);
    }
    int cell_degree(int i, int j) const { return deg_[ring_index(i, j)]; }
    const PointValues& edge_value(int i, int j, int e, int r) const {
        return edge_[(ring_index(i, j) * 4 + e) * ng_ + r];
    }
    const PointValues& cell_value(int i, int j, int p) const { return pts_[ring_index(i, j) * ng_ * ng_ + p]; }

    /// Reconstructs every interior cell with its degree from `cpd` (indexed
    /// i + j*nx) and the ghost ring with the full degree. Ghost cells whose
    /// traces carry a negative height fall back to constants.
    void reconstruct(const FieldSet& f, const std::vector<int>& cpd) {
        for (int j = -1; j <= grid_.ny; ++j)
            for (int i = -1; i <= grid_.nx; ++i) {
                const bool inner = grid_.interior(i, j);
                const int d = inner ? cpd[static_cast<std::size_t>(i + j * grid_.nx)] : ghost_degree_;
                build_cell(f, i, j, d);
                if (!inner && d > 0 && min_height(i, j) < 0.0) build_cell(f, i, j, 0);
            }
        for (int j = 0; j < grid_.ny; ++j) {
            mirror_walls(0, j);
            mirror_walls(grid_.nx - 1, j);
        }
        for (int i = 0; i < grid_.nx; ++i) {
            mirror_walls(i, 0);
            mirror_walls(i, grid_.ny - 1);
        }
    }

    /// Rebuilds one cell as a constant.
    void demote(const FieldSet& f, int i, int j) {
        build_cell(f, i, j, 0);
        mirror_walls(i, j);
    }

    /// Marks the wall sides. Ghost traces facing a wall are then the exact
    /// mirror of the interior traces, so the wall flux carries no mass even
    /// where the ghost reconstruction differs from the mirror in the last bit.
    void set_walls(const BoundarySpec& bc) {
        walls_ = {bc.left.kind == BcKind::wall, bc.right.kind == BcKind::wall, bc.bottom.kind == BcKind::wall,
                  bc.top.kind == BcKind::wall};
    }

    /// Smallest reconstructed height over edge points, then cell points.
    double min_edge_height(int i, int j) const {
        double m = INFINITY;
        const std::size_t b = ring_index(i, j) * 4 * ng_;
        for (int k = 0; k < 4 * ng_; ++k) m = std::min(m, edge_[b + k].h);
        return m;
    }
    double min_cell_height(int i, int j) const {
        double m = INFINITY;
        const std::size_t b = ring_index(i, j) * ng_ * ng_;
        for (int k = 0; k < ng_ * ng_; ++k) m = std::min(m, pts_[b + k].h);
        return m;
    }
    double min_height(int i, int j) const { return std::min(min_edge_height(i, j), min_cell_height(i, j)); }

    /// Quadrature flux through x-interface (i+1/2, j).
    State flux_x(int i, int j, const PhysParams& p, double c) const {
        State sum;
        for (int r = 0; r < ng_; ++r) {
            const PointValues& a = edge_value(i, j, kEast, r);
            const PointValues& b = edge_value(i + 1, j, kWest, r);
            const auto res = riemann::numerical_flux({a.h, a.qx, a.qy}, {b.h, b.qx, b.qy}, a.z, b.z, grid_.dx, p,
                                                     c, degree_);
            sum += rule_.weights[r] * fo::unslice_x(res.flux);
        }
        return sum;
    }

    /// Quadrature flux through y-interface (i, j+1/2).
    State flux_y(int i, int j, const PhysParams& p, double c) const {
        State sum;
        for (int r = 0; r < ng_; ++r) {
            const PointValues& a = edge_value(i, j, kNorth, r);
            const PointValues& b = edge_value(i, j + 1, kSouth, r);
            const auto res = riemann::numerical_flux({a.h, a.qy, a.qx}, {b.h, b.qy, b.qx}, a.z, b.z, grid_.dy, p,
                                                     c, degree_);
            sum += rule_.weights[r] * fo::unslice_y(res.flux);
        }
        return sum;
    }

    /// Cell average of -g h grad z.
    std::array<double, 2> topo_source(int i, int j, double g) const {
        std::array<double, 2> s{0.0, 0.0};
        if (cell_degree(i, j) == 0) return s;
        const std::size_t b = ring_index(i, j) * ng_ * ng_;
        for (int a = 0; a < ng_; ++a)
            for (int c = 0; c < ng_; ++c) {
                const int k = a * ng_ + c;
                const double w = rule_.weights[a] * rule_.weights[c];
                s[0] -= w * g * pts_[b + k].h * gradz_[b + k][0];
                s[1] -= w * g * pts_[b + k].h * gradz_[b + k][1];
            }
        return s;
    }

    /// Cell average of -k q |q| h^-eta; dry points contribute nothing.
    std::array<double, 2> friction_source(int i, int j, const PhysParams& p) const {
        std::array<double, 2> s{0.0, 0.0};
        if (p.manning_k == 0.0) return s;
        const std::size_t b = ring_index(i, j) * ng_ * ng_;
        const int n = cell_degree(i, j) == 0 ? 1 : ng_ * ng_;
        for (int k = 0; k < n; ++k) {
            const PointValues& v = pts_[b + k];
            if (v.h <= kDryHeight) continue;
            const double w = n == 1 ? 1.0 : rule_.weights[k / ng_] * rule_.weights[k % ng_];
            const double f = -p.manning_k * std::hypot(v.qx, v.qy) * std::pow(v.h, -p.eta);
            s[0] += w * f * v.qx;
            s[1] += w * f * v.qy;
        }
        return s;
    }

private:
    // Rows of op_ map neighbor-minus-center differences directly to point
    // values: 4*ng edge points, ng*ng cell points, then the xi and zeta
    // derivatives at the cell points.
    void build_tables() {
        const auto& nodes = rule_.nodes;
        const int ns = plan_.n_stencil();
        rows_ = 4 * ng_ + 3 * ng_ * ng_;
        op_.assign(static_cast<std::size_t>(rows_) * ns, 0.0);
        auto add_row = [&](int row, auto&& basis) {
            for (int a = 0; a < nc_; ++a) {
                const double b = basis(a);
                for (int l = 0; l < ns; ++l) op_[static_cast<std::size_t>(row) * ns + l] += b * plan_.solve[a * ns + l];
            }
        };
        auto value = [&](double xi, double zeta) {
            return [&, xi, zeta](int a) {
                const auto& e = plan_.alphas[a];
                return recon::ipow(xi, e.a1) * recon::ipow(zeta, e.a2) - plan_.unit_mom[a];
            };
        };
        for (int r = 0; r < ng_; ++r) {
            add_row(kWest * ng_ + r, value(-1.0, nodes[r]));
            add_row(kEast * ng_ + r, value(1.0, nodes[r]));
            add_row(kSouth * ng_ + r, value(nodes[r], -1.0));
            add_row(kNorth * ng_ + r, value(nodes[r], 1.0));
        }
        const int base = 4 * ng_, np = ng_ * ng_;
        for (int s = 0; s < ng_; ++s)
            for (int r = 0; r < ng_; ++r) {
                const int k = s * ng_ + r;  // xi = nodes[s], zeta = nodes[r]
                const double xi = nodes[s], zeta = nodes[r];
                add_row(base + k, value(xi, zeta));
                add_row(base + np + k, [&](int a) {
                    const auto& e = plan_.alphas[a];
                    return e.a1 > 0 ? e.a1 * recon::ipow(xi, e.a1 - 1) * recon::ipow(zeta, e.a2) : 0.0;
                });
                add_row(base + 2 * np + k, [&](int a) {
                    const auto& e = plan_.alphas[a];
                    return e.a2 > 0 ? e.a2 * recon::ipow(xi, e.a1) * recon::ipow(zeta, e.a2 - 1) : 0.0;
                });
            }
    }

    void mirror_walls(int i, int j) {
        auto copy = [&](int gi, int gj, int ge, int e, bool normal_x) {
            for (int r = 0; r < ng_; ++r) {
                PointValues v = edge_value(i, j, e, r);
                (normal_x ? v.qx : v.qy) = -(normal_x ? v.qx : v.qy);
                edge_[(ring_index(gi, gj) * 4 + ge) * ng_ + r] = v;
            }
        };
        if (walls_[0] && i == 0) copy(-1, j, kEast, kWest, true);
        if (walls_[1] && i == grid_.nx - 1) copy(grid_.nx, j, kWest, kEast, true);
        if (walls_[2] && j == 0) copy(i, -1, kNorth, kSouth, false);
        if (walls_[3] && j == grid_.ny - 1) copy(i, grid_.ny, kSouth, kNorth, false);
    }

    void build_cell(const FieldSet& f, int i, int j, int d) {
        const std::size_t rc = ring_index(i, j);
        deg_[rc] = d;
        const std::size_t k0 = grid_.index(i, j);
        const State& w0 = f.w[k0];
        const double v0[kVars] = {w0.h, w0.qx, w0.qy, w0.h + f.z[k0]};
        PointValues* edge = &edge_[rc * 4 * ng_];
        PointValues* pts = &pts_[rc * ng_ * ng_];
        std::array<double, 2>* gz = &gradz_[rc * ng_ * ng_];
        if (d == 0) {
            const PointValues c{w0.h, w0.qx, w0.qy, f.z[k0]};
            for (int k = 0; k < 4 * ng_; ++k) edge[k] = c;
            for (int k = 0; k < ng_ * ng_; ++k) { pts[k] = c; gz[k] = {0.0, 0.0}; }
            return;
        }
        const int ns = plan_.n_stencil();
        alignas(32) double diff[recon::kMaxStencil][kVars];
        for (int l = 0; l < ns; ++l) {
            const std::size_t kn = grid_.index(i + plan_.stencil[l].first, j + plan_.stencil[l].second);
            const State& w = f.w[kn];
            diff[l][0] = w.h - v0[0];
            diff[l][1] = w.qx - v0[1];
            diff[l][2] = w.qy - v0[2];
            diff[l][3] = w.h + f.z[kn] - v0[3];
        }
        auto apply = [&](int row, double out[kVars]) {
            const double* op = &op_[static_cast<std::size_t>(row) * ns];
            double acc[kVars] = {0.0, 0.0, 0.0, 0.0};
            for (int l = 0; l < ns; ++l)
                for (int v = 0; v < kVars; ++v) acc[v] += op[l] * diff[l][v];
            for (int v = 0; v < kVars; ++v) out[v] = acc[v];
        };
        double val[kVars];
        for (int k = 0; k < 4 * ng_; ++k) {
            apply(k, val);
            edge[k] = {v0[0] + val[0], v0[1] + val[1], v0[2] + val[2], (v0[3] + val[3]) - (v0[0] + val[0])};
        }
        const int base = 4 * ng_, np = ng_ * ng_;
        const double sx = 2.0 / grid_.dx, sy = 2.0 / grid_.dy;
        double gxv[kVars], gyv[kVars];
        for (int k = 0; k < np; ++k) {
            apply(base + k, val);
            pts[k] = {v0[0] + val[0], v0[1] + val[1], v0[2] + val[2], (v0[3] + val[3]) - (v0[0] + val[0])};
            apply(base + np + k, gxv);
            apply(base + 2 * np + k, gyv);
            gz[k] = {(gxv[3] - gxv[0]) * sx, (gyv[3] - gyv[0]) * sy};
        }
    }

    const Grid2D& grid_;
    int degree_;
    recon::GaussRule rule_;
    recon::ReconstructionPlan plan_;
    int ng_ = 1, nc_ = 0, rw_ = 0, ghost_degree_ = 0;
    std::array<bool, 4> walls_{false, false, false, false};
    std::vector<int> deg_;
    std::vector<PointValues> edge_;
    std::vector<PointValues> pts_;
    std::vector<std::array<double, 2>> gradz_;
    int rows_ = 0;
    std::vector<double> op_;
};

/// Per-cell right-hand side pieces of the high-order scheme.
struct HoIncrement {
    State flux_div;                 // (F_{i+1/2} - F_{i-1/2})/dx + (G_{j+1/2} - G_{j-1/2})/dy
    std::array<double, 2> topo_src{0.0, 0.0};
    std::array<double, 2> fric_src{0.0, 0.0};
};

/// Evaluates the high-order operator on interior cells (indexed i + j*nx).
/// Ghost cells of `f` must be filled.
inline std::vector<HoIncrement> ho_spatial_operator(HoContext& ctx, const FieldSet& f, const std::vector<int>& cpd,
                                                    const PhysParams& p, double c) {
    const Grid2D& g = ctx.grid();
    ctx.reconstruct(f, cpd);
    std::vector<State> fx(static_cast<std::size_t>(g.nx + 1) * g.ny), fy(static_cast<std::size_t>(g.ny + 1) * g.nx);
    for (int j = 0; j < g.ny; ++j)
        for (int i = -1; i < g.nx; ++i) fx[(i + 1) + j * (g.nx + 1)] = ctx.flux_x(i, j, p, c);
    for (int j = -1; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) fy[i + (j + 1) * g.nx] = ctx.flux_y(i, j, p, c);
    std::vector<HoIncrement> out(static_cast<std::size_t>(g.nx) * g.ny);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            HoIncrement& o = out[i + j * g.nx];
            o.flux_div = (1.0 / g.dx) * (fx[(i + 1) + j * (g.nx + 1)] - fx[i + j * (g.nx + 1)]) +
                         (1.0 / g.dy) * (fy[i + (j + 1) * g.nx] - fy[i + j * g.nx]);
            o.topo_src = ctx.topo_source(i, j, p.g);
            o.fric_src = ctx.friction_source(i, j, p);
        }
    return out;
}

}  // namespace swell::ho
