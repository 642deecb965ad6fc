#pragma once

// State vector, Cartesian grid with ghost frame, physical fluxes and
// boundary fill for the 2D shallow-water system with Manning friction.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace swell {

/// Heights at or below this value are treated as dry.
inline constexpr double kDryHeight = 1e-12;

struct PhysParams {
    double g = 9.81;
    double manning_k = 0.0;
    double eta = 7.0 / 3.0;
};

struct State {
    double h = 0.0;
    double qx = 0.0;
    double qy = 0.0;

    State& operator+=(const State& o) { h += o.h; qx += o.qx; qy += o.qy; return *this; }
    State& operator-=(const State& o) { h -= o.h; qx -= o.qx; qy -= o.qy; return *this; }
    State& operator*=(double a) { h *= a; qx *= a; qy *= a; return *this; }
    friend State operator+(State a, const State& b) { return a += b; }
    friend State operator-(State a, const State& b) { return a -= b; }
    friend State operator*(double a, State s) { return s *= a; }
    friend bool operator==(const State&, const State&) = default;
};

inline bool is_finite(const State& s) {
    return std::isfinite(s.h) && std::isfinite(s.qx) && std::isfinite(s.qy);
}

/// Velocity component q/h, zero on dry states.
inline double velocity(double h, double q) { return h > kDryHeight ? q / h : 0.0; }

/// x-directional physical flux (qx, qx^2/h + g h^2/2, qx qy/h).
inline State physical_flux_x(const State& w, double g) {
    const double u = velocity(w.h, w.qx);
    return {w.qx, w.qx * u + 0.5 * g * w.h * w.h, w.qy * u};
}

/// y-directional physical flux (qy, qx qy/h, qy^2/h + g h^2/2).
inline State physical_flux_y(const State& w, double g) {
    const double v = velocity(w.h, w.qy);
    return {w.qy, w.qx * v, w.qy * v + 0.5 * g * w.h * w.h};
}

/// Uniform Cartesian grid. Interior cells are (i, j) with 0 <= i < nx,
/// 0 <= j < ny; ghost cells extend `ghost` layers beyond on every side.
struct Grid2D {
    int nx = 0;
    int ny = 0;
    double dx = 0.0;
    double dy = 0.0;
    double x0 = 0.0;
    double y0 = 0.0;
    int ghost = 2;

    Grid2D() = default;
    Grid2D(int nx_, int ny_, double x0_, double x1, double y0_, double y1, int ghost_ = 2)
        : nx(nx_), ny(ny_), dx((x1 - x0_) / nx_), dy((y1 - y0_) / ny_), x0(x0_), y0(y0_),
          ghost(ghost_) {
        if (nx_ < 1 || ny_ < 1) throw std::invalid_argument("grid needs at least one cell per direction");
        if (!(x1 > x0_) || !(y1 > y0_)) throw std::invalid_argument("grid extent must be positive");
        if (ghost_ < 1) throw std::invalid_argument("ghost width must be positive");
    }

    int stride() const { return nx + 2 * ghost; }
    std::size_t size() const {
        return static_cast<std::size_t>(nx + 2 * ghost) * static_cast<std::size_t>(ny + 2 * ghost);
    }
    std::size_t index(int i, int j) const {
        return static_cast<std::size_t>(j + ghost) * static_cast<std::size_t>(stride()) +
               static_cast<std::size_t>(i + ghost);
    }
    bool interior(int i, int j) const { return i >= 0 && i < nx && j >= 0 && j < ny; }
    double xc(int i) const { return x0 + (i + 0.5) * dx; }
    double yc(int j) const { return y0 + (j + 0.5) * dy; }
    double delta() const { return dx < dy ? dx : dy; }
    double length_x() const { return nx * dx; }
    double length_y() const { return ny * dy; }
};

/// Cell averages of (h, qx, qy) and topography z over the full ghost frame.
struct FieldSet {
    std::vector<State> w;
    std::vector<double> z;
    double time = 0.0;

    FieldSet() = default;
    explicit FieldSet(const Grid2D& grid) : w(grid.size()), z(grid.size(), 0.0) {}
};

enum class BcKind { neumann, wall, dirichlet, periodic };

struct GhostValue {
    State w;
    double z = 0.0;
};

/// Supplies ghost cell (i, j) at time t. `mirror` is the nearest interior
/// cell, which lets mixed conditions keep some components free.
using GhostFn = std::function<GhostValue(int i, int j, double t, const GhostValue& mirror)>;

struct BoundarySide {
    BcKind kind = BcKind::neumann;
    GhostFn fn;
};

struct BoundarySpec {
    BoundarySide left, right, bottom, top;

    static BoundarySpec all(BcKind k) {
        BoundarySpec b;
        b.left.kind = b.right.kind = b.bottom.kind = b.top.kind = k;
        return b;
    }
};

inline void validate(const BoundarySpec& bc) {
    for (const BoundarySide* s : {&bc.left, &bc.right, &bc.bottom, &bc.top}) {
        if (s->kind == BcKind::dirichlet && !s->fn)
            throw std::invalid_argument("dirichlet boundary requires an analytic handle");
    }
    if ((bc.left.kind == BcKind::periodic) != (bc.right.kind == BcKind::periodic) ||
        (bc.bottom.kind == BcKind::periodic) != (bc.top.kind == BcKind::periodic))
        throw std::invalid_argument("periodic boundaries must be paired");
}

namespace detail {

// Fills one ghost cell (gi, gj) from interior column/row data along one axis.
// `near` is the nearest interior cell, `mirror` its reflection across the face.
inline void fill_one(FieldSet& f, const Grid2D& grid, const BoundarySide& side, int gi, int gj,
                     std::size_t near, std::size_t mirror, std::size_t wrap, bool normal_is_x,
                     bool with_z) {
    const std::size_t g = grid.index(gi, gj);
    switch (side.kind) {
    case BcKind::neumann:
        f.w[g] = f.w[near];
        if (with_z) f.z[g] = f.z[near];
        break;
    case BcKind::wall:
        f.w[g] = f.w[mirror];
        if (normal_is_x) f.w[g].qx = -f.w[g].qx; else f.w[g].qy = -f.w[g].qy;
        if (with_z) f.z[g] = f.z[mirror];
        break;
    case BcKind::periodic:
        f.w[g] = f.w[wrap];
        if (with_z) f.z[g] = f.z[wrap];
        break;
    case BcKind::dirichlet: {
        const GhostValue gv = side.fn(gi, gj, f.time, GhostValue{f.w[near], f.z[near]});
        f.w[g] = gv.w;
        if (with_z) f.z[g] = gv.z;
        break;
    }
    }
}

}  // namespace detail

/// Fills every ghost cell. x-ghosts of interior rows first, then y-ghosts
/// over full rows so that corners inherit both conditions.
inline void fill_ghosts(FieldSet& f, const Grid2D& grid, const BoundarySpec& bc, bool with_z = true) {
    const int G = grid.ghost;
    for (int j = 0; j < grid.ny; ++j) {
        for (int m = 0; m < G; ++m) {
            const int gl = -1 - m, gr = grid.nx + m;
            const int ml = std::min(m, grid.nx - 1), mr = std::max(grid.nx - 1 - m, 0);
            const int wl = ((gl % grid.nx) + grid.nx) % grid.nx, wr = gr % grid.nx;
            detail::fill_one(f, grid, bc.left, gl, j, grid.index(0, j), grid.index(ml, j),
                             grid.index(wl, j), true, with_z);
            detail::fill_one(f, grid, bc.right, gr, j, grid.index(grid.nx - 1, j), grid.index(mr, j),
                             grid.index(wr, j), true, with_z);
        }
    }
    for (int i = -G; i < grid.nx + G; ++i) {
        for (int m = 0; m < G; ++m) {
            const int gb = -1 - m, gt = grid.ny + m;
            const int mb = std::min(m, grid.ny - 1), mt = std::max(grid.ny - 1 - m, 0);
            const int wb = ((gb % grid.ny) + grid.ny) % grid.ny, wt = gt % grid.ny;
            detail::fill_one(f, grid, bc.bottom, i, gb, grid.index(i, 0), grid.index(i, mb),
                             grid.index(i, wb), false, with_z);
            detail::fill_one(f, grid, bc.top, i, gt, grid.index(i, grid.ny - 1), grid.index(i, mt),
                             grid.index(i, wt), false, with_z);
        }
    }
}

/// Thrown when the solution leaves the admissible set during a run.
struct NumericalFault : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace swell
