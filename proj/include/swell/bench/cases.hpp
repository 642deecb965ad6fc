#pragma once

// Benchmark case library: domains, default run settings, initial cell
// averages, boundary conditions, and exact-solution error functionals.

#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "swell/bench/config.hpp"
#include "swell/core.hpp"
#include "swell/reconstruction.hpp"
#include "swell/riemann1d.hpp"
#include "swell/wb_correction.hpp"

namespace swell::bench {

/// Pointwise data: height, discharge and topography at one location.
struct PointData {
    double h = 0.0, qx = 0.0, qy = 0.0, z = 0.0;
};

/// Tensor Gauss average over cell (i, j) with 1 + d/2 points per direction,
/// exact for polynomials of degree d + 1.
template <class F>
PointData cell_average(const Grid2D& g, int i, int j, int degree, F&& point) {
    const auto rule = recon::gauss_nodes(degree);
    const double xc = g.xc(i), yc = g.yc(j);
    PointData avg;
    for (std::size_t a = 0; a < rule.nodes.size(); ++a)
        for (std::size_t b = 0; b < rule.nodes.size(); ++b) {
            const double w = rule.weights[a] * rule.weights[b];
            const PointData s = point(xc + 0.5 * g.dx * rule.nodes[a], yc + 0.5 * g.dy * rule.nodes[b]);
            avg.h += w * s.h;
            avg.qx += w * s.qx;
            avg.qy += w * s.qy;
            avg.z += w * s.z;
        }
    return avg;
}

inline GhostValue to_ghost(const PointData& d) { return {{d.h, d.qx, d.qy}, d.z}; }

/// Pointwise error samples for one derived quantity.
struct ErrorSeries {
    std::string name;
    std::vector<double> values;  // signed or absolute per-cell errors
};

struct NormTriple {
    double l1 = 0.0, l2 = 0.0, linf = 0.0;
};

/// L1 = mean |e|, L2 = root mean square, Linf = max |e|.
inline NormTriple norms(const std::vector<double>& e) {
    NormTriple n;
    if (e.empty()) return n;
    for (double v : e) {
        const double a = std::abs(v);
        n.l1 += a;
        n.l2 += a * a;
        n.linf = std::max(n.linf, a);
    }
    n.l1 /= static_cast<double>(e.size());
    n.l2 = std::sqrt(n.l2 / static_cast<double>(e.size()));
    return n;
}

struct VariableError {
    std::string name;
    NormTriple norm;
};

struct ErrorReport {
    std::vector<VariableError> vars;

    const VariableError* find(const std::string& name) const {
        for (const auto& v : vars)
            if (v.name == name) return &v;
        return nullptr;
    }
};

/// Context handed to case callbacks.
struct CaseEnv {
    const Grid2D& grid;
    PhysParams phys;
    int degree = 0;
};

using CellFn = std::function<GhostValue(const CaseEnv&, int i, int j)>;
using BoundaryFn = std::function<BoundarySpec(const CaseEnv&, const CellFn& exact)>;
using ErrorFn = std::function<std::vector<ErrorSeries>(const CaseEnv&, const FieldSet&, const CellFn& exact)>;

struct CaseSpec {
    std::string name;
    std::string summary;
    double x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;
    RunConfig defaults;
    CellFn initial;
    CellFn exact;  // empty when no analytic solution is known
    BoundaryFn boundary;
    ErrorFn errors;  // empty when no error functional applies
};

/// Dirichlet handle that serves exact cell values, cached per ghost cell
/// because quadrature averages are costly and the data is time-independent.
inline GhostFn cached_exact(const CaseEnv& env, const CellFn& exact) {
    auto cache = std::make_shared<std::unordered_map<long long, GhostValue>>();
    auto grid = std::make_shared<Grid2D>(env.grid);
    return [cache, grid, phys = env.phys, degree = env.degree, exact](int i, int j, double, const GhostValue&) {
        const long long key = (static_cast<long long>(j) << 32) ^ static_cast<long long>(static_cast<unsigned>(i));
        auto it = cache->find(key);
        if (it != cache->end()) return it->second;
        const GhostValue v = exact(CaseEnv{*grid, phys, degree}, i, j);
        cache->emplace(key, v);
        return v;
    };
}

inline BoundarySpec dirichlet_everywhere(const CaseEnv& env, const CellFn& exact) {
    BoundarySpec bc = BoundarySpec::all(BcKind::dirichlet);
    const GhostFn fn = cached_exact(env, exact);
    bc.left.fn = bc.right.fn = bc.bottom.fn = bc.top.fn = fn;
    return bc;
}

namespace cases {

inline RunConfig defaults(const std::string& name, int nx, int ny, int degree, double t_end, double k) {
    RunConfig c;
    c.case_name = name;
    c.nx = nx;
    c.ny = ny;
    c.degree = degree;
    c.t_end = t_end;
    c.manning_k = k;
    c.mood = degree > 0;
    c.cfl = ny == 1 ? 1.0 : 0.5;
    return c;
}

inline double norm_q(const State& w) { return std::hypot(w.qx, w.qy); }

// Lake at rest with an emerged cone: Z = r, h = (1 - Z)+ on cell averages.
inline CaseSpec lake_at_rest_cone() {
    CaseSpec s;
    s.name = "lake_at_rest_cone";
    s.summary = "lake at rest around an emerged cone, Manning k = 10";
    s.defaults = defaults(s.name, 50, 50, 5, 0.1, 10.0);
    s.exact = [](const CaseEnv& e, int i, int j) {
        const PointData a = cell_average(e.grid, i, j, e.degree, [](double x, double y) {
            return PointData{0.0, 0.0, 0.0, std::hypot(x, y)};
        });
        return GhostValue{{std::max(1.0 - a.z, 0.0), 0.0, 0.0}, a.z};
    };
    s.initial = s.exact;
    s.boundary = dirichlet_everywhere;
    s.errors = [](const CaseEnv& e, const FieldSet& f, const CellFn& exact) {
        ErrorSeries eta{"h+z", {}}, q{"q", {}};
        for (int j = 0; j < e.grid.ny; ++j)
            for (int i = 0; i < e.grid.nx; ++i) {
                const std::size_t k = e.grid.index(i, j);
                const GhostValue ex = exact(e, i, j);
                eta.values.push_back((f.w[k].h + f.z[k]) - (ex.w.h + ex.z));
                q.values.push_back(norm_q(f.w[k]));
            }
        return std::vector<ErrorSeries>{eta, q};
    };
    return s;
}

// Subcritical flow over a bump with the inflow discharge imposed upstream
// and the height imposed downstream.
inline CaseSpec goutal_maurel() {
    constexpr double q0 = 4.42, h_out = 2.0;
    CaseSpec s;
    s.name = "goutal_maurel";
    s.summary = "subcritical flow over a parabolic bump, steady-state capture";
    s.x0 = 0.0; s.x1 = 25.0; s.y0 = 0.0; s.y1 = 1.0;
    s.defaults = defaults(s.name, 100, 1, 5, 500.0, 0.0);
    s.defaults.char_len_x = 0.5;
    s.initial = [](const CaseEnv& e, int i, int j) {
        const PointData a = cell_average(e.grid, i, j, e.degree, [](double x, double) {
            return PointData{0.0, 0.0, 0.0, std::max(0.2 - 0.05 * (x - 10.0) * (x - 10.0), 0.0)};
        });
        return GhostValue{{2.0 - a.z, 0.0, 0.0}, a.z};
    };
    s.boundary = [](const CaseEnv&, const CellFn&) {
        BoundarySpec bc = BoundarySpec::all(BcKind::neumann);
        bc.left.kind = bc.right.kind = BcKind::dirichlet;
        bc.left.fn = [](int, int, double, const GhostValue& m) {
            return GhostValue{{m.w.h, q0, m.w.qy}, m.z};
        };
        bc.right.fn = [](int, int, double, const GhostValue& m) {
            return GhostValue{{h_out, m.w.qx, m.w.qy}, m.z};
        };
        return bc;
    };
    s.errors = [](const CaseEnv& e, const FieldSet& f, const CellFn&) {
        const double psi_ex = q0 * q0 / (2.0 * h_out * h_out) + e.phys.g * h_out;
        ErrorSeries pt{"psi_t", {}}, q{"q", {}};
        for (int j = 0; j < e.grid.ny; ++j)
            for (int i = 0; i < e.grid.nx; ++i) {
                const std::size_t k = e.grid.index(i, j);
                const State& w = f.w[k];
                pt.values.push_back(wb::psi_t({w.h, w.qx, w.qy}, f.z[k], e.phys.g) - psi_ex);
                q.values.push_back(std::hypot(w.qx - q0, w.qy));
            }
        return std::vector<ErrorSeries>{pt, q};
    };
    return s;
}

inline constexpr double kFrictionDischarge = -0.5;
inline constexpr double kFrictionLevel = 0.02;

/// Height solving psi_f(h; q, x) = level by bisection on [1e-8, 10].
inline double friction_height(double x, const PhysParams& p) {
    auto residual = [&](double h) {
        return wb::psi_f({h, kFrictionDischarge, 0.0}, x, p) - kFrictionLevel;
    };
    double lo = 1e-8, hi = 10.0;
    double rlo = residual(lo), rhi = residual(hi);
    if (rlo * rhi > 0.0) {
        std::ostringstream os;
        os << "friction steady state: no sign change on [1e-8, 10] at x = " << x << " (residuals " << rlo << ", "
           << rhi << ")";
        throw ConfigError(os.str());
    }
    double mid = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        mid = 0.5 * (lo + hi);
        const double r = residual(mid);
        if (r == 0.0 || hi - lo <= 2.0 * std::numeric_limits<double>::epsilon() * mid) break;
        if ((r < 0.0) == (rlo < 0.0)) {
            lo = mid;
            rlo = r;
        } else {
            hi = mid;
        }
    }
    if (!(std::abs(residual(mid)) <= 1e-12)) {
        std::ostringstream os;
        os << "friction steady state: bisection residual " << residual(mid) << " at x = " << x;
        throw ConfigError(os.str());
    }
    return mid;
}

// Moving steady state driven by friction on flat ground, perturbed on a box.
inline CaseSpec friction_steady_perturbed() {
    CaseSpec s;
    s.name = "friction_steady_perturbed";
    s.summary = "perturbed friction-driven moving steady state, k = 1";
    s.defaults = defaults(s.name, 100, 1, 5, 5.0, 1.0);
    s.defaults.char_len_x = 1.0 / 15.0;
    s.exact = [](const CaseEnv& e, int i, int) {
        return GhostValue{{friction_height(e.grid.xc(i), e.phys), kFrictionDischarge, 0.0}, 0.0};
    };
    s.initial = [exact = s.exact](const CaseEnv& e, int i, int j) {
        GhostValue v = exact(e, i, j);
        const double x = e.grid.xc(i);
        if (x > 3.0 / 7.0 && x < 4.0 / 7.0) {
            v.w.h += 0.05;
            v.w.qx += 0.5;
        }
        return v;
    };
    s.boundary = [](const CaseEnv& e, const CellFn& exact) {
        BoundarySpec bc = BoundarySpec::all(BcKind::neumann);
        bc.left.kind = bc.right.kind = BcKind::dirichlet;
        bc.left.fn = bc.right.fn = cached_exact(e, exact);
        return bc;
    };
    s.errors = [](const CaseEnv& e, const FieldSet& f, const CellFn&) {
        ErrorSeries pf{"psi_f", {}}, q{"q", {}};
        for (int j = 0; j < e.grid.ny; ++j)
            for (int i = 0; i < e.grid.nx; ++i) {
                const State& w = f.w[e.grid.index(i, j)];
                pf.values.push_back(wb::psi_f({w.h, w.qx, w.qy}, e.grid.xc(i), e.phys) - kFrictionLevel);
                q.values.push_back(std::hypot(w.qx - kFrictionDischarge, w.qy));
            }
        return std::vector<ErrorSeries>{pf, q};
    };
    return s;
}

/// Errors on h, |q| magnitude and h + z against exact cell averages.
inline std::vector<ErrorSeries> smooth_errors(const CaseEnv& e, const FieldSet& f, const CellFn& exact) {
    ErrorSeries h{"h", {}}, q{"q", {}}, eta{"h+z", {}};
    for (int j = 0; j < e.grid.ny; ++j)
        for (int i = 0; i < e.grid.nx; ++i) {
            const std::size_t k = e.grid.index(i, j);
            const GhostValue ex = exact(e, i, j);
            h.values.push_back(f.w[k].h - ex.w.h);
            q.values.push_back(norm_q(f.w[k]) - norm_q(ex.w));
            eta.values.push_back((f.w[k].h + f.z[k]) - (ex.w.h + ex.z));
        }
    return {h, q, eta};
}

// Stationary vortex over a Gaussian bump.
inline CaseSpec steady_vortex() {
    CaseSpec s;
    s.name = "steady_vortex";
    s.summary = "smooth stationary vortex over a bump (convergence)";
    s.x0 = -1.0; s.x1 = 1.0; s.y0 = -1.0; s.y1 = 1.0;
    s.defaults = defaults(s.name, 40, 40, 3, 1.0, 0.0);
    s.exact = [](const CaseEnv& e, int i, int j) {
        const double g = e.phys.g;
        return to_ghost(cell_average(e.grid, i, j, e.degree, [g](double x, double y) {
            const double r2 = x * x + y * y;
            const double z = 0.2 * std::exp(0.5 * (1.0 - r2));
            const double h = 1.0 - std::exp(2.0 * (1.0 - r2)) / (4.0 * g) - z;
            const double e1 = std::exp(1.0 - r2);
            return PointData{h, h * y * e1, -h * x * e1, z};
        }));
    };
    s.initial = s.exact;
    s.boundary = dirichlet_everywhere;
    s.errors = smooth_errors;
    return s;
}

// Radial moving steady state balancing topography and friction.
inline CaseSpec topo_friction_exact() {
    CaseSpec s;
    s.name = "topo_friction_exact";
    s.summary = "radial steady state with topography and friction, k = 1 (convergence)";
    s.x0 = 0.4; s.x1 = 1.0; s.y0 = 0.4; s.y1 = 1.0;
    s.defaults = defaults(s.name, 40, 40, 3, 0.1, 1.0);
    s.exact = [](const CaseEnv& e, int i, int j) {
        const double g = e.phys.g, k = e.phys.manning_k;
        return to_ghost(cell_average(e.grid, i, j, e.degree, [g, k](double x, double y) {
            const double r2 = x * x + y * y, r = std::sqrt(r2);
            return PointData{1.0, x / r2, y / r2, (2.0 * k * r - 1.0) / (2.0 * g * r2)};
        }));
    };
    s.initial = s.exact;
    s.boundary = dirichlet_everywhere;
    s.errors = smooth_errors;
    return s;
}

// Dam break onto a dry rising slope.
inline CaseSpec dry_dam_break() {
    CaseSpec s;
    s.name = "dry_dam_break";
    s.summary = "dam break onto a dry exponential slope, walls, k = 1";
    s.defaults = defaults(s.name, 25, 2, 5, 0.07, 1.0);
    s.defaults.char_len_x = 0.1;
    s.initial = [](const CaseEnv& e, int i, int j) {
        return to_ghost(cell_average(e.grid, i, j, e.degree, [](double x, double) {
            const double z = std::exp(x - 1.0) - std::exp(-1.0);
            return PointData{x < 0.5 ? std::max(2.0 - z, 0.0) : 0.0, 0.0, 0.0, z};
        }));
    };
    s.boundary = [](const CaseEnv&, const CellFn&) { return BoundarySpec::all(BcKind::wall); };
    return s;
}

/// Partial dam-break topography and initial height at one point.
inline PointData partial_dam_point(double x, double y) {
    const bool gap = y > -40.0 && y < 40.0;
    if (x <= -5.0) return {9.0, 0.0, 0.0, 1.0};
    if (x >= 5.0) return {5.0, 0.0, 0.0, 0.0};
    if (gap) {
        const double z = 0.1 * (5.0 - x);
        return {5.0 - z, 0.0, 0.0, z};
    }
    return {0.0, 0.0, 0.0, 12.0};
}

// Partial breach of a dam with a reservoir on the left.
inline CaseSpec partial_dam_break() {
    CaseSpec s;
    s.name = "partial_dam_break";
    s.summary = "partial dam break through a 80 m breach, walls";
    s.x0 = -100.0; s.x1 = 100.0; s.y0 = -100.0; s.y1 = 100.0;
    s.defaults = defaults(s.name, 100, 100, 1, 7.0, 0.0);
    s.defaults.cutoff_c = 0.5;
    s.initial = [](const CaseEnv& e, int i, int j) {
        return to_ghost(cell_average(e.grid, i, j, e.degree, partial_dam_point));
    };
    s.boundary = [](const CaseEnv&, const CellFn&) { return BoundarySpec::all(BcKind::wall); };
    return s;
}

}  // namespace cases

inline const std::vector<CaseSpec>& case_library() {
    static const std::vector<CaseSpec> lib = {
        cases::lake_at_rest_cone(), cases::goutal_maurel(), cases::friction_steady_perturbed(),
        cases::steady_vortex(),     cases::topo_friction_exact(), cases::dry_dam_break(),
        cases::partial_dam_break()};
    return lib;
}

inline const CaseSpec& find_case(const std::string& name) {
    for (const auto& c : case_library())
        if (c.name == name) return c;
    throw ConfigError("unknown case '" + name + "'");
}

/// Builds a validated configuration from key = value text. Missing keys take
/// the case defaults; mood defaults to on exactly when degree >= 1.
inline RunConfig load_config(const std::string& text) {
    const auto kv = parse_pairs(text);
    const auto it = kv.find("case");
    if (it == kv.end()) throw ConfigError("missing key 'case'");
    RunConfig cfg = apply_pairs(find_case(it->second).defaults, kv);
    if (!kv.count("mood")) cfg.mood = cfg.degree > 0;
    if (cfg.mood && cfg.degree == 0) throw ConfigError("mood requires degree >= 1");
    check(cfg);
    return cfg;
}

}  // namespace swell::bench
