#pragma once

// A posteriori limiting: admissibility, maximum-principle and curvature
// detectors, and the per-stage loop that lowers the cell polynomial degree
// to zero wherever the high-order candidate is rejected.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "swell/core.hpp"
#include "swell/reconstruction.hpp"
#include "swell/scheme_fo.hpp"
#include "swell/scheme_ho.hpp"
#include "swell/wb_correction.hpp"

namespace swell::mood {

struct Tolerances {
    double eps_h = 0.0;
    double eps_q = 0.0;
    double delta = 0.0;

    static Tolerances from_grid(const Grid2D& g) {
        const double d = g.delta();
        return {d * d * d, d * d * d, d};
    }
};

inline bool pad_check(const State& w) { return w.h >= 0.0 && is_finite(w); }

inline bool dmp_check(double value, double lo, double hi, double eps) {
    return value >= lo - eps && value <= hi + eps;
}

enum class U2 { pass, fail, inconclusive };

/// Curvature test on the extreme second derivatives over a neighborhood.
/// A plateau passes; opposite-sign curvatures beyond delta fail; otherwise
/// comparable magnitudes pass and anything else is inconclusive.
inline U2 u2_check(double xmin, double xmax, double ymin, double ymax, double delta) {
    const double m = std::max({std::abs(xmin), std::abs(xmax), std::abs(ymin), std::abs(ymax)});
    if (m <= delta) return U2::pass;
    if (xmin * xmax < -delta || ymin * ymax < -delta) return U2::fail;
    auto ratio = [](double a, double b) {
        const double hi = std::max(std::abs(a), std::abs(b));
        return hi == 0.0 ? 1.0 : std::min(std::abs(a), std::abs(b)) / hi;
    };
    if (ratio(xmin, xmax) >= 0.5 && ratio(ymin, ymax) >= 0.5) return U2::pass;
    return U2::inconclusive;
}

struct SchemeOptions {
    int degree = 0;
    bool wb = true;
    bool mood = true;
    double cutoff_c = std::numeric_limits<double>::infinity();
    wb::DetectorParams detector;
};

/// One application of the single-step operator H used inside each SSPRK
/// stage: ghost fill, blend weights, a priori reconstruction checks,
/// candidate computation and the detector loop.
class StageOperator {
public:
    StageOperator(const Grid2D& grid, const BoundarySpec& bc, const PhysParams& p, const SchemeOptions& opt)
        : grid_(grid), bc_(bc), p_(p), opt_(opt), ctx_(grid, opt.degree), blender_(grid, bc, p, opt.cutoff_c),
          plan2_(recon::build_plan(2, grid.dx, grid.dy)), tol_(Tolerances::from_grid(grid)) {
        validate(bc);
        ctx_.set_walls(bc);
        const std::size_t n = static_cast<std::size_t>(grid.nx) * grid.ny;
        cpd_.assign(n, 0);
        theta_.fill(n, 0.0);
        for (int a = 0; a < plan2_.n_coef(); ++a) {
            if (plan2_.alphas[a].a1 == 2) row_xx_ = a;
            if (plan2_.alphas[a].a2 == 2) row_yy_ = a;
        }
        const std::size_t ring = static_cast<std::size_t>(grid.nx + 2) * (grid.ny + 2);
        curv_.resize(ring);
        curv_stamp_.assign(ring, -1);
        check_mark_.assign(n, 0);
    }

    const Grid2D& grid() const { return grid_; }
    const std::vector<int>& cpd() const { return cpd_; }
    const wb::ThetaField& theta() const { return theta_; }
    int last_passes() const { return passes_; }
    long rejected_total() const { return rejected_total_; }
    long passes_total() const { return passes_total_; }

    FieldSet apply(const FieldSet& in, double dt) {
        FieldSet f = in;
        fill_ghosts(f, grid_, bc_, false);
        const std::size_t n = cpd_.size();
        if (opt_.degree == 0) {
            cpd_.assign(n, 0);
            theta_.fill(n, 0.0);
            passes_ = 1;
            ++passes_total_;
            return fo::step(f, grid_, bc_, p_, dt, opt_.cutoff_c);
        }
        cpd_.assign(n, opt_.degree);
        if (opt_.wb)
            wb::compute_theta(f, grid_, p_, opt_.detector, theta_);
        else
            theta_.fill(n, 1.0);
        for (std::size_t c = 0; c < n; ++c)
            if (theta_.x[c] == 0.0 && theta_.y[c] == 0.0) cpd_[c] = 0;
        ctx_.reconstruct(f, cpd_);
        for (int j = 0; j < grid_.ny; ++j)
            for (int i = 0; i < grid_.nx; ++i) {
                const std::size_t c = cell(i, j);
                if (cpd_[c] > 0 && ctx_.min_height(i, j) < 0.0) {
                    cpd_[c] = 0;
                    ctx_.demote(f, i, j);
                }
            }
        blender_.prepare(f);
        FieldSet cand;
        blender_.full(f, dt, cpd_, theta_, ctx_, cand);
        passes_ = 1;
        ++passes_total_;
        if (!opt_.mood) return cand;
        fill_ghosts(cand, grid_, bc_, false);
        ++epoch_;
        rejected_.clear();
        for (int j = 0; j < grid_.ny; ++j)
            for (int i = 0; i < grid_.nx; ++i)
                if (cpd_[cell(i, j)] > 0 && !accept(f, cand, i, j)) rejected_.push_back({i, j});
        while (!rejected_.empty()) {
            rejected_total_ += static_cast<long>(rejected_.size());
            for (const auto& [i, j] : rejected_) {
                cpd_[cell(i, j)] = 0;
                ctx_.demote(f, i, j);
            }
            blender_.update(f, dt, cpd_, theta_, ctx_, rejected_, cand, changed_);
            ++passes_;
            ++passes_total_;
            fill_ghosts(cand, grid_, bc_, false);
            recheck(f, cand);
        }
        return cand;
    }

    /// Detector chain for one cell of the candidate against the stage input.
    bool accept(const FieldSet& prev, const FieldSet& cand, int i, int j) {
        const std::size_t k = grid_.index(i, j);
        if (!pad_check(cand.w[k])) return false;
        for (int v = 0; v < 3; ++v) {
            double lo = INFINITY, hi = -INFINITY;
            for (int sy = -1; sy <= 1; ++sy)
                for (int sx = -1; sx <= 1; ++sx) {
                    const double val = phi(prev, grid_.index(i + sx, j + sy), v);
                    lo = std::min(lo, val);
                    hi = std::max(hi, val);
                }
            const double eps = v == 0 ? tol_.eps_h : tol_.eps_q;
            if (dmp_check(phi(cand, k, v), lo, hi, eps)) continue;
            double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
            for (int sy = -1; sy <= 1; ++sy)
                for (int sx = -1; sx <= 1; ++sx) {
                    const auto& cv = curvature(cand, i + sx, j + sy)[v];
                    xmin = std::min(xmin, cv[0]);
                    xmax = std::max(xmax, cv[0]);
                    ymin = std::min(ymin, cv[1]);
                    ymax = std::max(ymax, cv[1]);
                }
            if (u2_check(xmin, xmax, ymin, ymax, tol_.delta) == U2::fail) return false;
        }
        return true;
    }

private:
    std::size_t cell(int i, int j) const { return static_cast<std::size_t>(i) + static_cast<std::size_t>(j) * grid_.nx; }
    std::size_t ring(int i, int j) const {
        return static_cast<std::size_t>(i + 1) + static_cast<std::size_t>(j + 1) * (grid_.nx + 2);
    }

    static double phi(const FieldSet& f, std::size_t k, int v) {
        switch (v) {
        case 0: return f.w[k].h + f.z[k];
        case 1: return f.w[k].qx;
        default: return f.w[k].qy;
        }
    }

    /// Second derivatives of degree-2 reconstructions of (h+z, qx, qy) of
    /// ring cell (i, j), cached until the candidate around it changes.
    const std::array<std::array<double, 2>, 3>& curvature(const FieldSet& f, int i, int j) {
        const std::size_t r = ring(i, j);
        auto& out = curv_[r];
        if (curv_stamp_[r] == epoch_) return out;
        curv_stamp_[r] = epoch_;
        const int ns = plan2_.n_stencil();
        const double sxx = 2.0 * 4.0 / (grid_.dx * grid_.dx), syy = 2.0 * 4.0 / (grid_.dy * grid_.dy);
        const std::size_t k0 = grid_.index(i, j);
        for (int v = 0; v < 3; ++v) {
            const double c0 = phi(f, k0, v);
            double cxx = 0.0, cyy = 0.0;
            for (int l = 0; l < ns; ++l) {
                const double d = phi(f, grid_.index(i + plan2_.stencil[l].first, j + plan2_.stencil[l].second), v) - c0;
                cxx += plan2_.solve[row_xx_ * ns + l] * d;
                cyy += plan2_.solve[row_yy_ * ns + l] * d;
            }
            out[v] = {cxx * sxx, cyy * syy};
        }
        return out;
    }

    /// Invalidates curvatures around the recomputed cells and reruns the
    /// detectors wherever their inputs may have changed.
    void recheck(const FieldSet& prev, const FieldSet& cand) {
        const int nx = grid_.nx, ny = grid_.ny;
        bool frame = false;
        for (const auto& [i, j] : changed_) {
            frame = frame || blender_.on_frame(i, j);
            for (int b = j - 1; b <= j + 1; ++b)
                for (int a = i - 1; a <= i + 1; ++a) curv_stamp_[ring(a, b)] = -1;
        }
        // Ghost values follow the boundary cells, possibly from the far side.
        if (frame) {
            for (int a = -1; a <= nx; ++a)
                for (int b : {-1, 0, ny - 1, ny}) curv_stamp_[ring(a, b)] = -1;
            for (int b = -1; b <= ny; ++b)
                for (int a : {-1, 0, nx - 1, nx}) curv_stamp_[ring(a, b)] = -1;
        }
        ++check_stamp_;
        rejected_.clear();
        auto visit = [&](int a, int b) {
            if (a < 0 || b < 0 || a >= nx || b >= ny) return;
            const std::size_t c = cell(a, b);
            if (check_mark_[c] == check_stamp_) return;
            check_mark_[c] = check_stamp_;
            if (cpd_[c] > 0 && !accept(prev, cand, a, b)) rejected_.push_back({a, b});
        };
        for (const auto& [i, j] : changed_)
            for (int b = j - 2; b <= j + 2; ++b)
                for (int a = i - 2; a <= i + 2; ++a) visit(a, b);
        if (frame)
            for (int b = 0; b < ny; ++b)
                for (int a = 0; a < nx; ++a)
                    if (a < 2 || b < 2 || a >= nx - 2 || b >= ny - 2) visit(a, b);
    }

    const Grid2D& grid_;
    const BoundarySpec& bc_;
    PhysParams p_;
    SchemeOptions opt_;
    ho::HoContext ctx_;
    wb::Blender blender_;
    recon::ReconstructionPlan plan2_;
    Tolerances tol_;
    int row_xx_ = 0, row_yy_ = 0;
    std::vector<int> cpd_;
    wb::ThetaField theta_;
    std::vector<std::pair<int, int>> rejected_, changed_;
    std::vector<std::array<std::array<double, 2>, 3>> curv_;
    std::vector<int> curv_stamp_, check_mark_;
    int epoch_ = 0, check_stamp_ = 0;
    int passes_ = 0;
    long rejected_total_ = 0;
    long passes_total_ = 0;
};

}  // namespace swell::mood
