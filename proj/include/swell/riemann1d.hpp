#pragma once

// One-dimensional approximate Riemann solver with topography and Manning
// friction built into the intermediate states. Works on slices normal to an
// interface; the transverse discharge is carried passively.

#include <algorithm>
#include <cmath>
#include <limits>

#include "swell/core.hpp"

namespace swell::riemann {

inline constexpr double kSpeedFloor = 1e-10;
inline constexpr double kAlphaFloor = 1e-10;
inline constexpr double kEqualHeight = 1e-12;
/// A discharge counts as vanishing when its Froude number is below this.
inline constexpr double kQuiescent = 1e-10;

/// Conserved variables along the interface normal.
struct Slice {
    double h = 0.0;
    double qn = 0.0;
    double qt = 0.0;
};

struct Flux1D {
    double mass = 0.0;
    double normal = 0.0;
    double transverse = 0.0;
};

struct WaveSpeeds {
    double lam_l = 0.0;
    double lam_r = 0.0;
};

struct HllMeans {
    double h = 0.0;
    double q = 0.0;
};

/// Interface source integral times dx, and the same quantity divided by alpha.
struct SourcePair {
    double s_dx = 0.0;
    double s_dx_over_alpha = 0.0;

    SourcePair& operator+=(const SourcePair& o) {
        s_dx += o.s_dx;
        s_dx_over_alpha += o.s_dx_over_alpha;
        return *this;
    }
};

struct IntermediateStates {
    double h_l = 0.0;
    double h_r = 0.0;
    double q = 0.0;
};

struct AlphaResult {
    double value = 0.0;
    bool near_singular = false;
};

struct InterfaceFlux {
    Flux1D flux;
    SourcePair topo;
    WaveSpeeds speeds;
};

inline double sgn(double v) { return (v > 0.0) - (v < 0.0); }

inline double pressure_flux(double h, double q, double g) {
    return q * velocity(h, q) + 0.5 * g * h * h;
}

inline WaveSpeeds wave_speeds(const Slice& l, const Slice& r, double g) {
    const double cl = std::sqrt(g * std::max(l.h, 0.0));
    const double cr = std::sqrt(g * std::max(r.h, 0.0));
    const double ul = std::abs(velocity(l.h, l.qn));
    const double ur = std::abs(velocity(r.h, r.qn));
    return {std::min({-ul - cl, -ur - cr, -kSpeedFloor}), std::max({ul + cl, ur + cr, kSpeedFloor})};
}

inline HllMeans hll_means(const Slice& l, const Slice& r, const WaveSpeeds& s, double g) {
    const double inv = 1.0 / (s.lam_r - s.lam_l);
    return {(s.lam_r * r.h - s.lam_l * l.h - (r.qn - l.qn)) * inv,
            (s.lam_r * r.qn - s.lam_l * l.qn - (pressure_flux(r.h, r.qn, g) - pressure_flux(l.h, l.qn, g))) *
                inv};
}

inline double harmonic_discharge(double ql, double qr) {
    if (ql == 0.0 || qr == 0.0) return 0.0;
    const double al = std::abs(ql), ar = std::abs(qr);
    return 2.0 * al * ar / (al + ar) * sgn(ql + qr);
}

inline AlphaResult alpha_coeff(double hl, double hr, double qbar, double g) {
    const double a = -qbar * qbar / (hl * hr) + 0.5 * g * (hl + hr);
    const double floor = kAlphaFloor * g * std::max({hl, hr, 1.0});
    return {a, !(std::abs(a) >= floor)};
}

/// Divides by alpha, replacing a near-singular alpha by a floor of the same sign.
inline double divide_by_alpha(double s_dx, const AlphaResult& a, double g, double hl, double hr) {
    if (!a.near_singular) return s_dx / a.value;
    const double floor = kAlphaFloor * g * std::max({hl, hr, 1.0});
    return s_dx / (a.value < 0.0 ? -floor : floor);
}

/// Height jump limited to magnitude C * dx. C may be +infinity.
inline double height_cutoff(double hl, double hr, double c, double dx) {
    const double jump = hr - hl;
    const double cap = c * dx;
    if (std::abs(jump) <= cap) return jump;
    return sgn(jump) * cap;
}

inline bool quiescent(double h, double q, double g) {
    return std::abs(q) <= kQuiescent * std::max(h, 0.0) * std::sqrt(g * std::max(h, 0.0));
}

inline SourcePair source_topo(const Slice& l, const Slice& r, double zl, double zr, double dx, double c,
                              double g) {
    const bool dry_l = l.h <= kDryHeight, dry_r = r.h <= kDryHeight;
    if (dry_l && quiescent(r.h, r.qn, g) && r.h + zr <= zl) return {0.5 * g * r.h * r.h, r.h};
    if (dry_r && quiescent(l.h, l.qn, g) && l.h + zl <= zr) return {-0.5 * g * l.h * l.h, -l.h};
    const double dz = zr - zl;
    if (dry_l || dry_r) return {-0.5 * g * dz * (l.h + r.h), -dz};
    // On flat ground the topography source vanishes; keeping the cubic
    // correction there would break friction-only steady states.
    if (dz == 0.0) return {};
    const double hsum = l.h + r.h;
    const double hc = height_cutoff(l.h, r.h, c, dx);
    const double s = -2.0 * g * dz * l.h * r.h / hsum + 0.5 * g * hc * hc * hc / hsum;
    const AlphaResult a = alpha_coeff(l.h, r.h, harmonic_discharge(l.qn, r.qn), g);
    return {s, divide_by_alpha(s, a, g, l.h, r.h)};
}

/// Coefficients shared by the interface friction average and the
/// well-balanced implicit friction update:
///   beta    = ((eta+2)/2) [h^2] / [h^(eta+2)]
///   bracket = -1/(hl hr) + ((hl+hr)/2) ([h^(eta-1)]/(eta-1)) (eta+2)/[h^(eta+2)]
/// Jumps of powers are evaluated through expm1/log1p to avoid cancellation.
struct FrictionRatios {
    double beta = 0.0;
    double bracket = 0.0;
};

inline FrictionRatios friction_ratios(double hl, double hr, double eta) {
    const double e2 = eta + 2.0, em1 = eta - 1.0;
    if (std::abs(hr - hl) < kEqualHeight * std::max(hl, hr)) {
        const double hm = 0.5 * (hl + hr);
        const double beta = std::pow(hm, -eta);
        const double bracket = -1.0 / (hl * hr) + 0.5 * (hl + hr) / (hm * hm * hm);
        return {beta, bracket};
    }
    const double l = std::log1p((hr - hl) / hl);
    const double den = std::expm1(e2 * l);
    const double r2 = std::pow(hl, -eta) * std::expm1(2.0 * l) / den;
    const double r3 = std::expm1(em1 * l) / (den * hl * hl * hl);
    return {0.5 * e2 * r2, -1.0 / (hl * hr) + 0.5 * (hl + hr) * r3 / em1 * e2};
}

/// Interface friction source for reconstruction degree d (d = 0 is the
/// first-order average).
inline SourcePair source_fric(const Slice& l, const Slice& r, double dx, double c, const PhysParams& p,
                              int d) {
    if (l.h <= kDryHeight || r.h <= kDryHeight || p.manning_k == 0.0) return {};
    const double qbar = harmonic_discharge(l.qn, r.qn);
    if (qbar == 0.0) return {};
    const double scale = std::pow(dx, d + 1);
    const FrictionRatios fr = friction_ratios(l.h, r.h, p.eta);
    const double hc = height_cutoff(l.h, r.h, c, dx);
    const double hbar = fr.beta - sgn(qbar) / (p.manning_k * scale) * hc * fr.bracket;
    const double s = -p.manning_k * qbar * std::abs(qbar) * hbar * scale;
    const AlphaResult a = alpha_coeff(l.h, r.h, qbar, p.g);
    return {s, divide_by_alpha(s, a, p.g, l.h, r.h)};
}

inline IntermediateStates intermediate_states(const WaveSpeeds& s, const HllMeans& m, const SourcePair& src) {
    const double span = s.lam_r - s.lam_l;
    const double ratio = src.s_dx_over_alpha / span;
    IntermediateStates out;
    out.q = m.q + src.s_dx / span;
    out.h_l = std::min(std::max(m.h - s.lam_r * ratio, 0.0), (1.0 - s.lam_r / s.lam_l) * m.h);
    out.h_r = std::min(std::max(m.h - s.lam_l * ratio, 0.0), (1.0 - s.lam_l / s.lam_r) * m.h);
    return out;
}

/// Numerical flux between two slices. `d` selects the friction scaling.
inline InterfaceFlux numerical_flux(const Slice& l, const Slice& r, double zl, double zr, double dx,
                                    const PhysParams& p, double c, int d) {
    InterfaceFlux out;
    const double g = p.g;
    out.speeds = wave_speeds(l, r, g);
    const HllMeans m = hll_means(l, r, out.speeds, g);
    out.topo = source_topo(l, r, zl, zr, dx, c, g);
    SourcePair src = out.topo;
    src += source_fric(l, r, dx, c, p, d);
    const IntermediateStates st = intermediate_states(out.speeds, m, src);

    const double ul = velocity(l.h, l.qn), ur = velocity(r.h, r.qn);
    const double tl = velocity(l.h, l.qt), tr = velocity(r.h, r.qt);
    const double tu = st.q > 0.0 ? tl : (st.q < 0.0 ? tr : 0.5 * (tl + tr));
    const double ll = 0.5 * out.speeds.lam_l, lr = 0.5 * out.speeds.lam_r;

    out.flux.mass = 0.5 * (l.qn + r.qn) + ll * (st.h_l - l.h) + lr * (st.h_r - r.h);
    out.flux.normal = 0.5 * (pressure_flux(l.h, l.qn, g) + pressure_flux(r.h, r.qn, g)) + ll * (st.q - l.qn) +
                      lr * (st.q - r.qn);
    out.flux.transverse =
        0.5 * (l.qt * ul + r.qt * ur) + ll * (st.h_l * tu - l.qt) + lr * (st.h_r * tu - r.qt);
    return out;
}

}  // namespace swell::riemann
