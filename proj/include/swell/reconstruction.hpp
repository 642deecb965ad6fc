#pragma once

// Gauss-Legendre rules and mean-preserving least-squares polynomial
// reconstruction on Cartesian cells.
//
// Polynomials are stored in normalized coordinates xi = 2 (x - xc) / dx,
// zeta = 2 (y - yc) / dy, so a cell spans [-1, 1]^2:
//   p(xi, zeta) = mean + sum_a c_a (xi^a1 zeta^a2 - m_a),
// where m_a is the cell average of xi^a1 zeta^a2. Physical coefficients are
// c_a / ((dx/2)^a1 (dy/2)^a2).

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace swell::recon {

inline constexpr int kMaxDegree = 5;
/// Largest stencil size over all degrees.
inline constexpr int kMaxStencil = 28;

struct GaussRule {
    std::vector<double> nodes;    // on [-1, 1]
    std::vector<double> weights;  // sum to 1
};

inline GaussRule gauss_legendre(int n) {
    switch (n) {
    case 1: return {{0.0}, {1.0}};
    case 2: {
        const double a = 1.0 / std::sqrt(3.0);
        return {{-a, a}, {0.5, 0.5}};
    }
    case 3: {
        const double a = std::sqrt(0.6);
        return {{-a, 0.0, a}, {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0}};
    }
    case 4: {
        const double s = 2.0 * std::sqrt(6.0 / 5.0);
        const double a = std::sqrt((3.0 - s) / 7.0), b = std::sqrt((3.0 + s) / 7.0);
        const double wa = (18.0 + std::sqrt(30.0)) / 72.0, wb = (18.0 - std::sqrt(30.0)) / 72.0;
        return {{-b, -a, a, b}, {wb, wa, wa, wb}};
    }
    case 5: {
        const double s = 2.0 * std::sqrt(10.0 / 7.0);
        const double a = std::sqrt(5.0 - s) / 3.0, b = std::sqrt(5.0 + s) / 3.0;
        const double wa = (322.0 + 13.0 * std::sqrt(70.0)) / 1800.0;
        const double wb = (322.0 - 13.0 * std::sqrt(70.0)) / 1800.0;
        return {{-b, -a, 0.0, a, b}, {wb, wa, 128.0 / 450.0, wa, wb}};
    }
    default: throw std::invalid_argument("unsupported Gauss-Legendre order");
    }
}

/// Points per edge for reconstruction degree d: 1 + floor(d/2).
inline int gauss_count(int degree) { return 1 + degree / 2; }

inline GaussRule gauss_nodes(int degree) { return gauss_legendre(gauss_count(degree)); }

/// Average of (xi^a1 zeta^a2) over cell [-1,1]^2.
inline double unit_moment(int a) { return (a % 2 == 0) ? 1.0 / (a + 1) : 0.0; }

/// Physical moment M^a: average of (x-xc)^a1 (y-yc)^a2 over the cell.
inline double moments(int a1, int a2, double dx, double dy) {
    return unit_moment(a1) * std::pow(0.5 * dx, a1) * unit_moment(a2) * std::pow(0.5 * dy, a2);
}

/// Average of xi^a over the neighbor at offset sigma, in normalized units.
inline double offset_moment(int sigma, int a) {
    const double hi = 2.0 * sigma + 1.0, lo = 2.0 * sigma - 1.0;
    return (std::pow(hi, a + 1) - std::pow(lo, a + 1)) / (2.0 * (a + 1));
}

struct Exponent {
    int a1 = 0;
    int a2 = 0;
};

inline std::vector<Exponent> exponents(int degree) {
    std::vector<Exponent> out;
    for (int t = 1; t <= degree; ++t)
        for (int a1 = t; a1 >= 0; --a1) out.push_back({a1, t - a1});
    return out;
}

/// Neighbor offsets used for degree d.
inline std::vector<std::pair<int, int>> stencil_offsets(int degree) {
    std::vector<std::pair<int, int>> s;
    if (degree <= 0) return s;
    if (degree == 1) return {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
    const int r = degree <= 2 ? 1 : 2;
    for (int sy = -r; sy <= r; ++sy)
        for (int sx = -r; sx <= r; ++sx) {
            if (sx == 0 && sy == 0) continue;
            const bool corner2 = std::abs(sx) == 2 || std::abs(sy) == 2;
            if (degree == 3 && corner2 && sx != 0 && sy != 0) continue;
            s.push_back({sx, sy});
        }
    // Five columns cannot separate x^5 from lower powers; widen the axes.
    if (degree == 5) s.insert(s.end(), {{3, 0}, {-3, 0}, {0, 3}, {0, -3}});
    return s;
}

inline int stencil_radius(int degree) {
    if (degree <= 0) return 0;
    if (degree <= 2) return 1;
    return degree <= 4 ? 2 : 3;
}

struct ReconstructionPlan {
    int degree = 0;
    double dx = 1.0, dy = 1.0;
    std::vector<Exponent> alphas;
    std::vector<std::pair<int, int>> stencil;
    std::vector<double> unit_mom;  // m_a per exponent
    /// Row-major (n_coef x n_stencil) map from neighbor-minus-center
    /// averages to normalized coefficients.
    std::vector<double> solve;

    int n_coef() const { return static_cast<int>(alphas.size()); }
    int n_stencil() const { return static_cast<int>(stencil.size()); }

    /// Physical solve matrix (n_coef x n_stencil).
    Eigen::MatrixXd solve_matrix() const {
        Eigen::MatrixXd m(n_coef(), n_stencil());
        for (int a = 0; a < n_coef(); ++a) {
            const double s = std::pow(0.5 * dx, alphas[a].a1) * std::pow(0.5 * dy, alphas[a].a2);
            for (int l = 0; l < n_stencil(); ++l) m(a, l) = solve[a * n_stencil() + l] / s;
        }
        return m;
    }
};

inline ReconstructionPlan build_plan(int degree, double dx, double dy) {
    if (degree < 0 || degree > kMaxDegree) throw std::invalid_argument("degree must lie in [0, 5]");
    ReconstructionPlan plan;
    plan.degree = degree;
    plan.dx = dx;
    plan.dy = dy;
    plan.alphas = exponents(degree);
    plan.stencil = stencil_offsets(degree);
    for (const auto& a : plan.alphas) plan.unit_mom.push_back(unit_moment(a.a1) * unit_moment(a.a2));
    if (degree == 0) return plan;
    const int m = plan.n_coef(), n = plan.n_stencil();
    Eigen::MatrixXd x(n, m);
    for (int l = 0; l < n; ++l)
        for (int a = 0; a < m; ++a)
            x(l, a) = offset_moment(plan.stencil[l].first, plan.alphas[a].a1) *
                          offset_moment(plan.stencil[l].second, plan.alphas[a].a2) -
                      plan.unit_mom[a];
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(x);
    if (cod.rank() != m)
        throw std::runtime_error("reconstruction stencil of degree " + std::to_string(degree) + " (" +
                                 std::to_string(n) + " cells) is rank deficient");
    const Eigen::MatrixXd pinv = cod.pseudoInverse();
    plan.solve.resize(static_cast<std::size_t>(m) * n);
    for (int a = 0; a < m; ++a)
        for (int l = 0; l < n; ++l) plan.solve[a * n + l] = pinv(a, l);
    return plan;
}

/// Reconstructed polynomial of one cell in normalized coordinates.
struct CellPolynomial {
    int degree = 0;
    double mean = 0.0;
    std::array<double, 20> c{};
};

/// phi_neighbors follows plan.stencil order.
inline CellPolynomial reconstruct(const ReconstructionPlan& plan, double phi_center,
                                  const std::vector<double>& phi_neighbors) {
    CellPolynomial p;
    p.degree = plan.degree;
    p.mean = phi_center;
    const int m = plan.n_coef(), n = plan.n_stencil();
    for (int a = 0; a < m; ++a) {
        double s = 0.0;
        for (int l = 0; l < n; ++l) s += plan.solve[a * n + l] * (phi_neighbors[l] - phi_center);
        p.c[a] = s;
    }
    return p;
}

inline double ipow(double x, int a) {
    double r = 1.0;
    for (int i = 0; i < a; ++i) r *= x;
    return r;
}

/// Evaluates at normalized coordinates.
inline double evaluate_unit(const ReconstructionPlan& plan, const CellPolynomial& p, double xi, double zeta) {
    double v = p.mean;
    for (int a = 0; a < plan.n_coef() && p.degree > 0; ++a)
        v += p.c[a] * (ipow(xi, plan.alphas[a].a1) * ipow(zeta, plan.alphas[a].a2) - plan.unit_mom[a]);
    return v;
}

/// Evaluates at physical offset (x - xc, y - yc).
inline double evaluate(const ReconstructionPlan& plan, const CellPolynomial& p, double ox, double oy) {
    return evaluate_unit(plan, p, 2.0 * ox / plan.dx, 2.0 * oy / plan.dy);
}

/// Physical gradient at normalized coordinates.
inline std::array<double, 2> gradient_unit(const ReconstructionPlan& plan, const CellPolynomial& p, double xi,
                                           double zeta) {
    double gx = 0.0, gy = 0.0;
    for (int a = 0; a < plan.n_coef() && p.degree > 0; ++a) {
        const int a1 = plan.alphas[a].a1, a2 = plan.alphas[a].a2;
        if (a1 > 0) gx += p.c[a] * a1 * ipow(xi, a1 - 1) * ipow(zeta, a2);
        if (a2 > 0) gy += p.c[a] * a2 * ipow(xi, a1) * ipow(zeta, a2 - 1);
    }
    return {gx * 2.0 / plan.dx, gy * 2.0 / plan.dy};
}

}  // namespace swell::recon
