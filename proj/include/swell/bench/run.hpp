#pragma once

// Time loop driver, JSON report and multi-mesh convergence study.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "swell/bench/cases.hpp"
#include "swell/bench/config.hpp"
#include "swell/bench/features.hpp"
#include "swell/bench/snapshot.hpp"
#include "swell/core.hpp"
#include "swell/reconstruction.hpp"
#include "swell/solver.hpp"

namespace swell::bench {

inline PhysParams phys_params(const RunConfig& c) {
    PhysParams p;
    p.g = c.g;
    p.manning_k = c.manning_k;
    return p;
}

inline Grid2D make_grid(const CaseSpec& cs, const RunConfig& c) {
    const int ghost = std::max(2, recon::stencil_radius(c.degree) + 1);
    return Grid2D(c.nx, c.ny, cs.x0, cs.x1, cs.y0, cs.y1, ghost);
}

inline mood::SchemeOptions scheme_options(const Grid2D& grid, const RunConfig& c) {
    mood::SchemeOptions o;
    o.degree = c.degree;
    o.wb = c.wb;
    o.mood = c.mood;
    o.cutoff_c = c.cutoff_c;
    o.detector.length_x = c.char_len_x > 0.0 ? c.char_len_x : grid.length_x();
    o.detector.length_y = c.char_len_y > 0.0 ? c.char_len_y : grid.length_y();
    o.detector.kexp = c.theta_exp > 0.0 ? c.theta_exp : c.degree + 1.0;
    return o;
}

/// Initial cell averages over the interior and ghost frame.
inline FieldSet init_case(const CaseSpec& cs, const CaseEnv& env, const BoundarySpec& bc) {
    FieldSet f(env.grid);
    const Grid2D& g = env.grid;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const GhostValue v = cs.initial(env, i, j);
            f.w[g.index(i, j)] = v.w;
            f.z[g.index(i, j)] = v.z;
        }
    fill_ghosts(f, g, bc, true);
    return f;
}

inline ErrorReport error_report(const CaseSpec& cs, const CaseEnv& env, const FieldSet& f) {
    ErrorReport r;
    if (!cs.errors) return r;
    for (const auto& s : cs.errors(env, f, cs.exact)) r.vars.push_back({s.name, norms(s.values)});
    return r;
}

/// Called after every accepted step with the solver, the new fields and the
/// step count.
using StepObserver = std::function<void(const Solver&, const FieldSet&, long)>;

struct RunResult {
    RunConfig config;
    Grid2D grid;
    FieldSet fields;
    ErrorReport errors;
    long steps = 0;
    double wall_seconds = 0.0;
    double min_height = 0.0;
    long mood_rejections = 0;
    long mood_passes = 0;
    std::vector<int> cpd;
    wb::ThetaField theta;
    std::vector<std::string> snapshots;
    bool has_features = false;
    DamBreakFeatures features;
};

inline nlohmann::json to_json(const ErrorReport& r) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& v : r.vars) j[v.name] = {{"L1", v.norm.l1}, {"L2", v.norm.l2}, {"Linf", v.norm.linf}};
    return j;
}

inline nlohmann::json to_json(const RunResult& r) {
    nlohmann::json j;
    const RunConfig& c = r.config;
    j["case"] = c.case_name;
    j["config"] = {{"nx", c.nx},           {"ny", c.ny},
                   {"degree", c.degree},   {"wb", c.wb},
                   {"mood", c.mood},       {"cfl", c.cfl},
                   {"t_end", c.t_end},     {"g", c.g},
                   {"manning_k", c.manning_k}, {"cutoff_c", format_double(c.cutoff_c)},
                   {"char_len_x", c.char_len_x}, {"char_len_y", c.char_len_y},
                   {"theta_exp", c.theta_exp}, {"snap_every", c.snap_every}};
    j["final_time"] = r.fields.time;
    j["steps"] = r.steps;
    j["wall_seconds"] = r.wall_seconds;
    j["min_height"] = r.min_height;
    j["mood_rejections"] = r.mood_rejections;
    j["mood_passes"] = r.mood_passes;
    j["errors"] = to_json(r.errors);
    j["snapshots"] = r.snapshots;
    if (r.has_features) {
        auto num = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); };
        const auto& f = r.features;
        j["features"] = {{"shock_position", num(f.shock_position)},
                         {"shock_amplitude", num(f.shock_amplitude)},
                         {"rarefaction_head", num(f.rarefaction_head)},
                         {"rarefaction_tail", num(f.rarefaction_tail)},
                         {"rarefaction_size", num(f.rarefaction_size)},
                         {"rarefaction_amplitude", num(f.rarefaction_amplitude)},
                         {"vortex_depth", num(f.vortex_depth)},
                         {"vortex_size", num(f.vortex_size)}};
    }
    return j;
}

inline double interior_min_height(const Grid2D& g, const FieldSet& f) {
    double m = std::numeric_limits<double>::infinity();
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) m = std::min(m, f.w[g.index(i, j)].h);
    return m;
}

/// Runs one configuration to t_end. Snapshots and summary.json are written
/// when out_dir is set.
inline RunResult run(const RunConfig& cfg, const StepObserver& observer = {}) {
    check(cfg);
    const CaseSpec& cs = find_case(cfg.case_name);
    RunResult res;
    res.config = cfg;
    res.grid = make_grid(cs, cfg);
    const Grid2D& grid = res.grid;
    const CaseEnv env{grid, phys_params(cfg), cfg.degree};
    BoundarySpec bc = cs.boundary(env, cs.exact);
    res.fields = init_case(cs, env, bc);
    FieldSet& f = res.fields;
    Solver solver(grid, bc, env.phys, scheme_options(grid, cfg), cfg.cfl);

    const bool write = !cfg.out_dir.empty();
    if (write) std::filesystem::create_directories(cfg.out_dir);
    int snap_index = 0;
    auto snapshot = [&](const std::vector<int>& cpd, const wb::ThetaField& theta) {
        std::ostringstream name;
        name << "snapshot_" << std::setw(4) << std::setfill('0') << snap_index++ << ".csv";
        const std::string path = (std::filesystem::path(cfg.out_dir) / name.str()).string();
        write_snapshot(path, grid, f, theta, cpd);
        res.snapshots.push_back(name.str());
    };
    if (write) snapshot({}, {});

    const auto t0 = std::chrono::steady_clock::now();
    double next_snap = cfg.snap_every > 0.0 ? cfg.snap_every : cfg.t_end;
    while (f.time < cfg.t_end) {
        const double target = std::min(next_snap, cfg.t_end);
        try {
            solver.step(f, target);
        } catch (const NumericalFault& e) {
            std::ostringstream os;
            os << e.what() << " at step " << res.steps + 1 << " (t = " << f.time << ")";
            throw NumericalFault(os.str());
        }
        ++res.steps;
        if (observer) observer(solver, f, res.steps);
        if (f.time >= target && target < cfg.t_end) {
            if (write) snapshot(solver.stage_operator().cpd(), solver.stage_operator().theta());
            next_snap += cfg.snap_every;
        }
    }
    res.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    res.cpd = solver.stage_operator().cpd();
    res.theta = solver.stage_operator().theta();
    res.mood_rejections = solver.stage_operator().rejected_total();
    res.mood_passes = solver.stage_operator().passes_total();
    res.min_height = interior_min_height(grid, f);
    res.errors = error_report(cs, env, f);
    if (cs.name == "partial_dam_break") {
        res.has_features = true;
        res.features = extract_dam_break_features(grid, f);
    }
    if (write) {
        snapshot(res.cpd, res.theta);
        std::ofstream js(std::filesystem::path(cfg.out_dir) / "summary.json");
        js << std::setw(2) << to_json(res) << "\n";
    }
    return res;
}

struct ConvergenceRow {
    int nx = 0, ny = 0;
    ErrorReport errors;
    long steps = 0;
    double wall_seconds = 0.0;
};

/// Observed order between consecutive meshes: log(e_coarse/e_fine) / log(n_fine/n_coarse).
inline double observed_order(double e_coarse, double e_fine, int n_coarse, int n_fine) {
    return std::log(e_coarse / e_fine) / std::log(static_cast<double>(n_fine) / n_coarse);
}

struct ConvergenceTable {
    std::vector<ConvergenceRow> rows;

    /// Orders of one variable and norm ("L1", "L2", "Linf") between
    /// consecutive meshes.
    std::vector<double> orders(const std::string& var, const std::string& norm) const {
        std::vector<double> out;
        auto pick = [&](const ErrorReport& r) {
            const VariableError* v = r.find(var);
            if (!v) return std::numeric_limits<double>::quiet_NaN();
            if (norm == "L1") return v->norm.l1;
            if (norm == "L2") return v->norm.l2;
            return v->norm.linf;
        };
        for (std::size_t k = 1; k < rows.size(); ++k)
            out.push_back(observed_order(pick(rows[k - 1].errors), pick(rows[k].errors), rows[k - 1].nx, rows[k].nx));
        return out;
    }
};

/// Runs `base` on each mesh size n. Square-cell cases use n x n; cases whose
/// default has a single row keep ny fixed.
inline ConvergenceTable convergence(const RunConfig& base, const std::vector<int>& meshes) {
    const CaseSpec& cs = find_case(base.case_name);
    if (!cs.exact || !cs.errors) throw ConfigError("case '" + base.case_name + "' has no analytic solution");
    if (meshes.size() < 3) throw ConfigError("convergence needs at least three meshes");
    ConvergenceTable t;
    for (int n : meshes) {
        RunConfig c = base;
        c.out_dir.clear();
        c.nx = n;
        c.ny = cs.defaults.ny == 1 ? 1 : n;
        const RunResult r = run(c);
        t.rows.push_back({c.nx, c.ny, r.errors, r.steps, r.wall_seconds});
    }
    return t;
}

}  // namespace swell::bench
