#pragma once

// First-order well-balanced scheme: explicit flux/topography step followed
// by a semi-implicit friction relaxation.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "swell/core.hpp"
#include "swell/riemann1d.hpp"

namespace swell::fo {

inline riemann::Slice slice_x(const State& w) { return {w.h, w.qx, w.qy}; }
inline riemann::Slice slice_y(const State& w) { return {w.h, w.qy, w.qx}; }
inline State unslice_x(const riemann::Flux1D& f) { return {f.mass, f.normal, f.transverse}; }
inline State unslice_y(const riemann::Flux1D& f) { return {f.mass, f.transverse, f.normal}; }

/// Interface fluxes and topography source pairs. x-interface (i+1/2, j) is
/// stored at ix = (i+1) + j*(nx+1); y-interface (i, j+1/2) at i + (j+1)*nx.
struct InterfaceData {
    std::vector<State> fx, fy;
    std::vector<double> sx, sy;

    std::size_t ix(const Grid2D& g, int i, int j) const {
        return static_cast<std::size_t>(i + 1) + static_cast<std::size_t>(j) * (g.nx + 1);
    }
    std::size_t iy(const Grid2D& g, int i, int j) const {
        return static_cast<std::size_t>(i) + static_cast<std::size_t>(j + 1) * g.nx;
    }
    void resize(const Grid2D& g) {
        const std::size_t nxf = static_cast<std::size_t>(g.nx + 1) * g.ny;
        const std::size_t nyf = static_cast<std::size_t>(g.ny + 1) * g.nx;
        fx.resize(nxf); sx.resize(nxf); fy.resize(nyf); sy.resize(nyf);
    }
};

inline void compute_interfaces(const FieldSet& f, const Grid2D& grid, const PhysParams& p, double c,
                               InterfaceData& out) {
    out.resize(grid);
    for (int j = 0; j < grid.ny; ++j) {
        for (int i = -1; i < grid.nx; ++i) {
            const std::size_t a = grid.index(i, j), b = grid.index(i + 1, j);
            const auto r = riemann::numerical_flux(slice_x(f.w[a]), slice_x(f.w[b]), f.z[a], f.z[b],
                                                   grid.dx, p, c, 0);
            const std::size_t k = out.ix(grid, i, j);
            out.fx[k] = unslice_x(r.flux);
            out.sx[k] = r.topo.s_dx;
        }
    }
    for (int j = -1; j < grid.ny; ++j) {
        for (int i = 0; i < grid.nx; ++i) {
            const std::size_t a = grid.index(i, j), b = grid.index(i, j + 1);
            const auto r = riemann::numerical_flux(slice_y(f.w[a]), slice_y(f.w[b]), f.z[a], f.z[b],
                                                   grid.dy, p, c, 0);
            const std::size_t k = out.iy(grid, i, j);
            out.fy[k] = unslice_y(r.flux);
            out.sy[k] = r.topo.s_dx;
        }
    }
}

/// Flux differences (already scaled by dt/dx, dt/dy) and topography source
/// of one cell, split by direction.
struct CellIncrement {
    State flux_x, flux_y;
    double src_x = 0.0, src_y = 0.0;
};

inline CellIncrement fo_increment(const InterfaceData& d, const Grid2D& grid, int i, int j, double dt) {
    const std::size_t xl = d.ix(grid, i - 1, j), xr = d.ix(grid, i, j);
    const std::size_t yb = d.iy(grid, i, j - 1), yt = d.iy(grid, i, j);
    CellIncrement c;
    c.flux_x = (dt / grid.dx) * (d.fx[xr] - d.fx[xl]);
    c.flux_y = (dt / grid.dy) * (d.fy[yt] - d.fy[yb]);
    c.src_x = 0.5 * (d.sx[xl] + d.sx[xr]) / grid.dx;
    c.src_y = 0.5 * (d.sy[yb] + d.sy[yt]) / grid.dy;
    return c;
}

inline State apply_increment(const State& w, const State& fx, const State& fy, double sx, double sy,
                             double dt) {
    return {w.h - fx.h - fy.h, w.qx - fx.qx - fy.qx + dt * sx, w.qy - fx.qy - fy.qy + dt * sy};
}

/// Removes round-off negativity and zeroes the discharge of dry cells.
/// A genuinely negative height is a fault.
inline void sanitize(State& w) {
    if (w.h < 0.0) {
        if (w.h < -kDryHeight || !std::isfinite(w.h)) throw NumericalFault("negative water height");
        w.h = 0.0;
    }
    if (w.h <= kDryHeight) w.qx = w.qy = 0.0;
}

/// Explicit flux and topography step. Ghost cells of the input must be filled.
inline FieldSet explicit_step(const FieldSet& f, const Grid2D& grid, const PhysParams& p, double dt, double c,
                              InterfaceData* scratch = nullptr) {
    InterfaceData local;
    InterfaceData& d = scratch ? *scratch : local;
    compute_interfaces(f, grid, p, c, d);
    FieldSet out = f;
    for (int j = 0; j < grid.ny; ++j)
        for (int i = 0; i < grid.nx; ++i) {
            const std::size_t k = grid.index(i, j);
            const CellIncrement inc = fo_increment(d, grid, i, j, dt);
            out.w[k] = apply_increment(f.w[k], inc.flux_x, inc.flux_y, inc.src_x, inc.src_y, dt);
        }
    return out;
}

/// Analytic relaxation of dq/dt = -k q |q| h^-eta over dt at fixed h.
inline double friction_plain(double h, double q, double qnorm, double dt, const PhysParams& p) {
    if (p.manning_k == 0.0) return q;
    if (h <= kDryHeight) return 0.0;
    const double he = std::pow(h, p.eta);
    return he * q / (he + p.manning_k * dt * qnorm);
}

/// Well-balanced relaxation along one direction. hm, h0, hp are the updated
/// heights of the left neighbor, the cell and the right neighbor; delta is
/// the cell width in that direction.
inline double friction_wb(double hm, double h0, double hp, double q_half, double q_old, double qnorm,
                          double dt, double delta, const PhysParams& p) {
    const double k = p.manning_k;
    if (k == 0.0) return q_half;
    if (h0 <= kDryHeight) return 0.0;
    const double plain = friction_plain(h0, q_half, qnorm, dt, p);
    if (q_half == 0.0 || q_old == 0.0 || hm <= kDryHeight || hp <= kDryHeight) return plain;
    const double mu_old = riemann::sgn(q_old), mu_half = riemann::sgn(q_half);
    const auto left = riemann::friction_ratios(hm, h0, p.eta);
    const auto right = riemann::friction_ratios(h0, hp, p.eta);
    const double gamma_sum = (h0 - hm) * left.bracket + (hp - h0) * right.bracket;
    const double den = k * mu_old * delta * (left.beta + right.beta) - gamma_sum;
    // The average is 2k*mu*delta/den, so a valid denominator carries the
    // sign of mu; a negative den is expected for negative discharge.
    if (!(mu_half * den > 0.0) || !std::isfinite(den)) return plain;
    const double heta = 2.0 * k * mu_half * delta / den + k * dt * mu_half * q_old;
    if (!(heta > 0.0) || !std::isfinite(heta)) return plain;
    return heta * q_half / (heta + k * dt * qnorm);
}

/// Friction update of interior cell (i, j). `half` must have its ghost
/// heights filled; `old` supplies the discharge signs at the start of the
/// step. The sanitized explicit-step state is returned through `cleaned`.
inline State friction_cell(const FieldSet& half, const FieldSet& old, const Grid2D& grid, const PhysParams& p,
                           double dt, int i, int j, State* cleaned = nullptr) {
    const std::size_t k = grid.index(i, j);
    State w = half.w[k];
    sanitize(w);
    if (cleaned) *cleaned = w;
    const double qnorm = std::hypot(w.qx, w.qy);
    const double hl = half.w[grid.index(i - 1, j)].h, hr = half.w[grid.index(i + 1, j)].h;
    const double hb = half.w[grid.index(i, j - 1)].h, ht = half.w[grid.index(i, j + 1)].h;
    const State& wo = old.w[k];
    State res{w.h, friction_wb(hl, w.h, hr, w.qx, wo.qx, qnorm, dt, grid.dx, p),
              friction_wb(hb, w.h, ht, w.qy, wo.qy, qnorm, dt, grid.dy, p)};
    sanitize(res);
    return res;
}

inline FieldSet friction_implicit_step(const FieldSet& half, const FieldSet& old, const Grid2D& grid,
                                       const PhysParams& p, double dt) {
    FieldSet out = half;
    for (int j = 0; j < grid.ny; ++j)
        for (int i = 0; i < grid.nx; ++i) out.w[grid.index(i, j)] = friction_cell(half, old, grid, p, dt, i, j);
    return out;
}

/// Largest wave speed over all interfaces touching the interior.
inline double max_wave_speed(const FieldSet& f, const Grid2D& grid, double g) {
    double lam = 0.0;
    for (int j = 0; j < grid.ny; ++j)
        for (int i = -1; i < grid.nx; ++i) {
            const auto s = riemann::wave_speeds(slice_x(f.w[grid.index(i, j)]), slice_x(f.w[grid.index(i + 1, j)]), g);
            lam = std::max({lam, -s.lam_l, s.lam_r});
        }
    for (int j = -1; j < grid.ny; ++j)
        for (int i = 0; i < grid.nx; ++i) {
            const auto s = riemann::wave_speeds(slice_y(f.w[grid.index(i, j)]), slice_y(f.w[grid.index(i, j + 1)]), g);
            lam = std::max({lam, -s.lam_l, s.lam_r});
        }
    return lam;
}

/// Time step cfl * delta^(max(d,3)/3) / (2 Lambda).
inline double cfl_dt(const FieldSet& f, const Grid2D& grid, double g, int degree, double cfl) {
    const double lam = max_wave_speed(f, grid, g);
    const double expo = std::max(degree, 3) / 3.0;
    return cfl * std::pow(grid.delta(), expo) / (2.0 * lam);
}

/// Full first-order step: explicit part, ghost refresh, friction relaxation.
inline FieldSet step(const FieldSet& f, const Grid2D& grid, const BoundarySpec& bc, const PhysParams& p,
                     double dt, double c) {
    FieldSet half = explicit_step(f, grid, p, dt, c);
    fill_ghosts(half, grid, bc, false);
    FieldSet out = friction_implicit_step(half, f, grid, p, dt);
    out.time = f.time + dt;
    return out;
}

}  // namespace swell::fo
