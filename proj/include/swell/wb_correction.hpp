#pragma once

// Steady-state detector and the per-cell convex combination between the
// first-order well-balanced scheme and the high-order scheme.

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "swell/core.hpp"
#include "swell/riemann1d.hpp"
#include "swell/scheme_fo.hpp"
#include "swell/scheme_ho.hpp"

namespace swell::wb {

/// Differences below this fraction of the magnitudes involved are treated
/// as round-off when testing for steady pairs.
inline constexpr double kDetectorRoundoff = 1e-12;

inline double psi_t(const riemann::Slice& w, double z, double g) {
    if (w.h <= kDryHeight) return g * z;
    return w.qn * w.qn / (2.0 * w.h * w.h) + g * (w.h + z);
}

inline double psi_f(const riemann::Slice& w, double x, const PhysParams& p) {
    const double h = std::max(w.h, 0.0);
    return -w.qn * w.qn * std::pow(h, p.eta - 1.0) / (p.eta - 1.0) + p.g * std::pow(h, p.eta + 2.0) / (p.eta + 2.0) +
           p.manning_k * w.qn * std::abs(w.qn) * x;
}

namespace detail {

inline double psi_f_scale(const riemann::Slice& w, double x, const PhysParams& p) {
    const double h = std::max(w.h, 0.0);
    return w.qn * w.qn * std::pow(h, p.eta - 1.0) / (p.eta - 1.0) + p.g * std::pow(h, p.eta + 2.0) / (p.eta + 2.0) +
           std::abs(p.manning_k * w.qn * w.qn * x);
}

inline double snap(double v, double scale) { return std::abs(v) <= kDetectorRoundoff * scale ? 0.0 : v; }

}  // namespace detail

/// Product of the topography and friction steady-state residuals between
/// two neighboring slices. A dry side whose bed rises above the wet free
/// surface is measured against that free surface, so the wet/dry lake at
/// rest counts as steady.
inline double steady_detector(const riemann::Slice& l, double zl, double xl, const riemann::Slice& r, double zr,
                              double xr, const PhysParams& p) {
    const double g = p.g;
    const bool dry_l = l.h <= kDryHeight, dry_r = r.h <= kDryHeight;
    double zle = zl, zre = zr;
    if (dry_l && !dry_r) zle = std::min(zl, r.h + zr);
    if (dry_r && !dry_l) zre = std::min(zr, l.h + zl);
    const double tl = psi_t(l, zle, g), tr = psi_t(r, zre, g);
    const double dpt = detail::snap(tr - tl, std::max(std::abs(tl), std::abs(tr)));
    const double dpf = detail::snap(psi_f(r, xr, p) - psi_f(l, xl, p),
                                    std::max(detail::psi_f_scale(l, xl, p), detail::psi_f_scale(r, xr, p)));
    const double hm = std::max({l.h, r.h, 0.0});
    const double qscale = std::max({std::abs(l.qn), std::abs(r.qn), std::abs(l.qt), std::abs(r.qt), hm * std::sqrt(g * hm)});
    const double dq = detail::snap(r.qn - l.qn, qscale);
    const double qtl = detail::snap(l.qt, qscale), qtr = detail::snap(r.qt, qscale);
    const double common = dq * dq + 0.5 * (qtr * qtr + qtl * qtl);
    return std::sqrt(dpt * dpt + common) * std::sqrt(dpf * dpf + common);
}

inline double theta_interface(double eps, double dx, double length, double kexp) {
    if (eps == 0.0) return 0.0;
    return eps / (eps + std::pow(dx / length, kexp));
}

inline double theta_cell(double tl, double tr) { return std::sqrt(0.5 * (tl * tl + tr * tr)); }

struct DetectorParams {
    double length_x = 1.0;
    double length_y = 1.0;
    double kexp = 1.0;
};

/// Per-cell blend weights (indexed i + j*nx).
struct ThetaField {
    std::vector<double> x, y;

    void fill(std::size_t n, double v) { x.assign(n, v); y.assign(n, v); }
};

/// Blend weights from the current fields; ghost cells must be filled.
inline void compute_theta(const FieldSet& f, const Grid2D& grid, const PhysParams& p, const DetectorParams& dp,
                          ThetaField& out) {
    const std::size_t n = static_cast<std::size_t>(grid.nx) * grid.ny;
    out.x.resize(n);
    out.y.resize(n);
    std::vector<double> tx(static_cast<std::size_t>(grid.nx + 1)), ty(static_cast<std::size_t>(grid.nx) * (grid.ny + 1));
    for (int j = -1; j < grid.ny; ++j)
        for (int i = 0; i < grid.nx; ++i) {
            const std::size_t a = grid.index(i, j), b = grid.index(i, j + 1);
            const double e = steady_detector(fo::slice_y(f.w[a]), f.z[a], grid.yc(j), fo::slice_y(f.w[b]), f.z[b],
                                             grid.yc(j + 1), p);
            ty[i + (j + 1) * grid.nx] = theta_interface(e, grid.dy, dp.length_y, dp.kexp);
        }
    for (int j = 0; j < grid.ny; ++j) {
        for (int i = -1; i < grid.nx; ++i) {
            const std::size_t a = grid.index(i, j), b = grid.index(i + 1, j);
            const double e = steady_detector(fo::slice_x(f.w[a]), f.z[a], grid.xc(i), fo::slice_x(f.w[b]), f.z[b],
                                             grid.xc(i + 1), p);
            tx[i + 1] = theta_interface(e, grid.dx, dp.length_x, dp.kexp);
        }
        for (int i = 0; i < grid.nx; ++i) {
            const std::size_t c = i + static_cast<std::size_t>(j) * grid.nx;
            out.x[c] = theta_cell(tx[i], tx[i + 1]);
            out.y[c] = theta_cell(ty[i + j * grid.nx], ty[i + (j + 1) * grid.nx]);
        }
    }
}

/// Computes blended candidates. A full evaluation covers every cell; after
/// some cells drop to first order, `update` recomputes only the faces and
/// cells those changes can reach.
class Blender {
public:
    Blender(const Grid2D& grid, const BoundarySpec& bc, const PhysParams& p, double c)
        : grid_(grid), bc_(bc), p_(p), c_(c) {}

    /// First-order interface data of the stage input, shared by all passes.
    void prepare(const FieldSet& f) { fo::compute_interfaces(f, grid_, p_, c_, fo_); }

    /// Full candidate. `ctx` must hold reconstructions of `f` consistent
    /// with `cpd`. Cells with cpd == 0 use the first-order scheme; cells with
    /// a positive weight may come out with a negative height, which the
    /// caller detects.
    void full(const FieldSet& f, double dt, const std::vector<int>& cpd, const ThetaField& theta,
              const ho::HoContext& ctx, FieldSet& out) {
        const int nx = grid_.nx, ny = grid_.ny;
        hx_.resize(static_cast<std::size_t>(nx + 1) * ny);
        hy_.resize(static_cast<std::size_t>(ny + 1) * nx);
        for (int j = 0; j < ny; ++j)
            for (int i = -1; i < nx; ++i) face_x(i, j, cpd, theta, ctx);
        for (int j = -1; j < ny; ++j)
            for (int i = 0; i < nx; ++i) face_y(i, j, cpd, theta, ctx);
        half_ = f;
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) half_cell(f, dt, cpd, theta, ctx, i, j);
        fill_ghosts(half_, grid_, bc_, false);
        out = half_;
        out.time = f.time + dt;
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) out_cell(f, dt, cpd, theta, ctx, i, j, out);
    }

    /// Recomputes `out` after the cells in `demoted` switched to cpd == 0
    /// (their reconstructions in `ctx` already lowered). The interior cells
    /// whose candidate was recomputed are returned through `changed`.
    void update(const FieldSet& f, double dt, const std::vector<int>& cpd, const ThetaField& theta,
                const ho::HoContext& ctx, const std::vector<std::pair<int, int>>& demoted, FieldSet& out,
                std::vector<std::pair<int, int>>& changed) {
        const int nx = grid_.nx, ny = grid_.ny;
        const std::size_t n = static_cast<std::size_t>(nx) * ny;
        if (mark_.size() != n) mark_.assign(n, 0);
        ++stamp_;
        for (const auto& [i, j] : demoted) {
            face_x(i - 1, j, cpd, theta, ctx);
            face_x(i, j, cpd, theta, ctx);
            face_y(i, j - 1, cpd, theta, ctx);
            face_y(i, j, cpd, theta, ctx);
        }
        std::vector<std::pair<int, int>>& halfset = scratch_;
        halfset.clear();
        bool frame = false;
        for (const auto& [i, j] : demoted)
            for_cross(i, j, [&](int a, int b) {
                if (!claim(a, b)) return;
                halfset.push_back({a, b});
                half_cell(f, dt, cpd, theta, ctx, a, b);
                frame = frame || on_frame(a, b);
            });
        fill_ghosts(half_, grid_, bc_, false);
        ++stamp_;
        changed.clear();
        auto recompute = [&](int a, int b) {
            if (!claim(a, b)) return;
            changed.push_back({a, b});
            out_cell(f, dt, cpd, theta, ctx, a, b, out);
        };
        for (const auto& [i, j] : halfset) for_cross(i, j, recompute);
        if (frame) {
            for (int i = 0; i < nx; ++i) { recompute(i, 0); recompute(i, ny - 1); }
            for (int j = 0; j < ny; ++j) { recompute(0, j); recompute(nx - 1, j); }
        }
    }

    bool on_frame(int i, int j) const { return i == 0 || j == 0 || i == grid_.nx - 1 || j == grid_.ny - 1; }

private:
    double weight_x(const std::vector<int>& cpd, const ThetaField& theta, int i, int j) const {
        const std::size_t c = cell(i, j);
        return cpd[c] > 0 ? theta.x[c] : 0.0;
    }
    double weight_y(const std::vector<int>& cpd, const ThetaField& theta, int i, int j) const {
        const std::size_t c = cell(i, j);
        return cpd[c] > 0 ? theta.y[c] : 0.0;
    }
    std::size_t cell(int i, int j) const {
        return static_cast<std::size_t>(i) + static_cast<std::size_t>(j) * grid_.nx;
    }

    template <class F>
    void for_cross(int i, int j, F&& fn) const {
        fn(i, j);
        if (i > 0) fn(i - 1, j);
        if (i + 1 < grid_.nx) fn(i + 1, j);
        if (j > 0) fn(i, j - 1);
        if (j + 1 < grid_.ny) fn(i, j + 1);
    }

    bool claim(int i, int j) {
        int& m = mark_[cell(i, j)];
        if (m == stamp_) return false;
        m = stamp_;
        return true;
    }

    // High-order flux on x-face (i+1/2, j), computed only if an adjacent cell uses it.
    void face_x(int i, int j, const std::vector<int>& cpd, const ThetaField& theta, const ho::HoContext& ctx) {
        if (i < -1 || i >= grid_.nx) return;
        const bool need = (i >= 0 && weight_x(cpd, theta, i, j) > 0.0) ||
                          (i + 1 < grid_.nx && weight_x(cpd, theta, i + 1, j) > 0.0);
        if (need) hx_[fo_.ix(grid_, i, j)] = ctx.flux_x(i, j, p_, c_);
    }
    void face_y(int i, int j, const std::vector<int>& cpd, const ThetaField& theta, const ho::HoContext& ctx) {
        if (j < -1 || j >= grid_.ny) return;
        const bool need = (j >= 0 && weight_y(cpd, theta, i, j) > 0.0) ||
                          (j + 1 < grid_.ny && weight_y(cpd, theta, i, j + 1) > 0.0);
        if (need) hy_[fo_.iy(grid_, i, j)] = ctx.flux_y(i, j, p_, c_);
    }

    // Explicit flux and topography part of one cell.
    void half_cell(const FieldSet& f, double dt, const std::vector<int>& cpd, const ThetaField& theta,
                   const ho::HoContext& ctx, int i, int j) {
        const std::size_t k = grid_.index(i, j);
        const fo::CellIncrement inc = fo::fo_increment(fo_, grid_, i, j, dt);
        const double ax = weight_x(cpd, theta, i, j), ay = weight_y(cpd, theta, i, j);
        if (ax == 0.0 && ay == 0.0) {
            half_.w[k] = fo::apply_increment(f.w[k], inc.flux_x, inc.flux_y, inc.src_x, inc.src_y, dt);
            return;
        }
        State fx = inc.flux_x, fy = inc.flux_y;
        double sx = inc.src_x, sy = inc.src_y;
        const auto st = ctx.topo_source(i, j, p_.g);
        if (ax > 0.0) {
            const State hox = (dt / grid_.dx) * (hx_[fo_.ix(grid_, i, j)] - hx_[fo_.ix(grid_, i - 1, j)]);
            fx = ax * hox + (1.0 - ax) * fx;
            sx = ax * st[0] + (1.0 - ax) * sx;
        }
        if (ay > 0.0) {
            const State hoy = (dt / grid_.dy) * (hy_[fo_.iy(grid_, i, j)] - hy_[fo_.iy(grid_, i, j - 1)]);
            fy = ay * hoy + (1.0 - ay) * fy;
            sy = ay * st[1] + (1.0 - ay) * sy;
        }
        half_.w[k] = fo::apply_increment(f.w[k], fx, fy, sx, sy, dt);
    }

    // Friction part of one cell; reads the half-step heights of its neighbors.
    void out_cell(const FieldSet& f, double dt, const std::vector<int>& cpd, const ThetaField& theta,
                  const ho::HoContext& ctx, int i, int j, FieldSet& out) const {
        const std::size_t k = grid_.index(i, j);
        const double ax = weight_x(cpd, theta, i, j), ay = weight_y(cpd, theta, i, j);
        if (ax == 0.0 && ay == 0.0) {
            out.w[k] = fo::friction_cell(half_, f, grid_, p_, dt, i, j);
            return;
        }
        const State& hw = half_.w[k];
        if (!(hw.h >= -kDryHeight) || !is_finite(hw)) {
            out.w[k] = hw;  // left for the admissibility check
            return;
        }
        State clean;
        const State wbq = fo::friction_cell(half_, f, grid_, p_, dt, i, j, &clean);
        const auto sf = ctx.friction_source(i, j, p_);
        State r = wbq;
        if (ax > 0.0) r.qx = ax * (clean.qx + dt * sf[0]) + (1.0 - ax) * wbq.qx;
        if (ay > 0.0) r.qy = ay * (clean.qy + dt * sf[1]) + (1.0 - ay) * wbq.qy;
        if (r.h <= kDryHeight) r.qx = r.qy = 0.0;
        out.w[k] = r;
    }

    const Grid2D& grid_;
    const BoundarySpec& bc_;
    PhysParams p_;
    double c_;
    fo::InterfaceData fo_;
    std::vector<State> hx_, hy_;
    FieldSet half_;
    std::vector<int> mark_;
    int stamp_ = 0;
    std::vector<std::pair<int, int>> scratch_;
};

/// One blended two-step update of the whole grid. See Blender::full.
inline FieldSet blended_step(const FieldSet& f, const Grid2D& grid, const BoundarySpec& bc, const PhysParams& p,
                             double dt, double c, const std::vector<int>& cpd, const ThetaField& theta,
                             const ho::HoContext& ctx) {
    Blender b(grid, bc, p, c);
    b.prepare(f);
    FieldSet out;
    b.full(f, dt, cpd, theta, ctx, out);
    return out;
}

}  // namespace swell::wb
