#pragma once

// Time integration: SSPRK stages over the MOOD-wrapped single-step operator.

#include <cmath>
#include <memory>
#include <utility>
#include <vector>

#include "swell/core.hpp"
#include "swell/mood.hpp"
#include "swell/scheme_fo.hpp"
#include "swell/ssprk.hpp"

namespace swell {

/// Linear combination of field sets; topography is taken from the first.
inline FieldSet combine_fields(const std::vector<std::pair<double, const FieldSet*>>& terms) {
    FieldSet out = *terms.front().second;
    const std::size_t n = out.w.size();
    const double a0 = terms.front().first;
    out.time = a0 * out.time;
    for (std::size_t k = 0; k < n; ++k) out.w[k] = a0 * out.w[k];
    for (std::size_t t = 1; t < terms.size(); ++t) {
        const double a = terms[t].first;
        const FieldSet& f = *terms[t].second;
        out.time += a * f.time;
        for (std::size_t k = 0; k < n; ++k) out.w[k] += a * f.w[k];
    }
    return out;
}

class Solver {
public:
    Solver(Grid2D grid, BoundarySpec bc, PhysParams p, mood::SchemeOptions opt, double cfl)
        : grid_(std::move(grid)), bc_(std::move(bc)), p_(p), opt_(opt), cfl_(cfl),
          method_(ssprk_select(opt.degree)),
          op_(std::make_unique<mood::StageOperator>(grid_, bc_, p_, opt_)) {}

    Solver(const Solver&) = delete;
    Solver& operator=(const Solver&) = delete;

    const Grid2D& grid() const { return grid_; }
    const BoundarySpec& boundary() const { return bc_; }
    const PhysParams& params() const { return p_; }
    const mood::StageOperator& stage_operator() const { return *op_; }
    const SsprkMethod& method() const { return method_; }

    double stable_dt(FieldSet& f) const {
        fill_ghosts(f, grid_, bc_, false);
        return fo::cfl_dt(f, grid_, p_.g, opt_.degree, cfl_);
    }

    /// Advances one step of size min(stable dt, t_stop - t). Returns dt.
    double step(FieldSet& f, double t_stop) {
        double dt = stable_dt(f);
        if (!(dt > 0.0) || !std::isfinite(dt)) throw NumericalFault("non-positive time step");
        const double t0 = f.time;
        bool last = false;
        if (t0 + dt >= t_stop) {
            dt = t_stop - t0;
            last = true;
        }
        FieldSet next = ssprk_step(
            method_, dt, f, [this](const FieldSet& u, double tau) { return op_->apply(u, tau); },
            [](const std::vector<std::pair<double, const FieldSet*>>& t) { return combine_fields(t); });
        for (int j = 0; j < grid_.ny; ++j)
            for (int i = 0; i < grid_.nx; ++i) {
                State& w = next.w[grid_.index(i, j)];
                if (!is_finite(w)) throw NumericalFault("non-finite state");
                fo::sanitize(w);
            }
        next.time = last ? t_stop : t0 + dt;
        f = std::move(next);
        fill_ghosts(f, grid_, bc_, false);
        return dt;
    }

private:
    Grid2D grid_;
    BoundarySpec bc_;
    PhysParams p_;
    mood::SchemeOptions opt_;
    double cfl_;
    SsprkMethod method_;
    std::unique_ptr<mood::StageOperator> op_;
};

}  // namespace swell
