// Benchmark command-line driver.

#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "swell/swell.hpp"

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitFault = 2;

using namespace swell;
using namespace swell::bench;

void print_errors(const ErrorReport& r) {
    for (const auto& v : r.vars)
        std::printf("  %-6s L1 %.6e  L2 %.6e  Linf %.6e\n", v.name.c_str(), v.norm.l1, v.norm.l2, v.norm.linf);
}

int cmd_run(const std::string& path) {
    const RunConfig cfg = load_config(read_file(path));
    const RunResult r = run(cfg);
    std::printf("%s  %dx%d  d=%d  wb=%d  mood=%d  steps=%ld  t=%.9g  wall=%.2fs  min_h=%.3e  rejections=%ld  passes=%ld\n",
                cfg.case_name.c_str(), cfg.nx, cfg.ny, cfg.degree, cfg.wb, cfg.mood, r.steps, r.fields.time,
                r.wall_seconds, r.min_height, r.mood_rejections, r.mood_passes);
    print_errors(r.errors);
    if (r.has_features) {
        const auto& f = r.features;
        std::printf("  shock position %.3f m, amplitude %.3f m\n", f.shock_position, f.shock_amplitude);
        std::printf("  rarefaction head %.3f m, size %.3f m, amplitude %.3f m\n", f.rarefaction_head,
                    f.rarefaction_size, f.rarefaction_amplitude);
        std::printf("  vortex depth %.3f m, size %.1f m^2\n", f.vortex_depth, f.vortex_size);
    }
    if (!cfg.out_dir.empty()) std::printf("  output written to %s\n", cfg.out_dir.c_str());
    return 0;
}

std::vector<int> parse_meshes(const std::string& s) {
    std::vector<int> out;
    std::stringstream in(s);
    std::string tok;
    while (std::getline(in, tok, ',')) {
        try {
            std::size_t pos = 0;
            const int n = std::stoi(tok, &pos);
            if (pos != tok.size() || n < 1) throw std::invalid_argument(tok);
            out.push_back(n);
        } catch (const std::exception&) {
            throw ConfigError("invalid mesh size '" + tok + "'");
        }
    }
    return out;
}

int cmd_converge(const std::string& path, const std::string& meshes) {
    const RunConfig cfg = load_config(read_file(path));
    const ConvergenceTable t = convergence(cfg, parse_meshes(meshes));
    std::printf("%s  d=%d  wb=%d  mood=%d  t_end=%.6g\n", cfg.case_name.c_str(), cfg.degree, cfg.wb, cfg.mood,
                cfg.t_end);
    for (std::size_t k = 0; k < t.rows.size(); ++k) {
        const auto& row = t.rows[k];
        std::printf("mesh %dx%d  steps=%ld  wall=%.2fs\n", row.nx, row.ny, row.steps, row.wall_seconds);
        print_errors(row.errors);
    }
    if (t.rows.empty()) return 0;
    std::printf("observed orders (consecutive meshes)\n");
    for (const auto& v : t.rows.front().errors.vars)
        for (const char* norm : {"L1", "L2", "Linf"}) {
            std::printf("  %-6s %-4s", v.name.c_str(), norm);
            for (double o : t.orders(v.name, norm)) std::printf("  %6.3f", o);
            std::printf("\n");
        }
    return 0;
}

int cmd_list() {
    for (const auto& c : case_library())
        std::printf("%-26s [%g, %g] x [%g, %g]  %s\n", c.name.c_str(), c.x0, c.x1, c.y0, c.y1, c.summary.c_str());
    return 0;
}

int cmd_print_config(const std::string& name) {
    std::cout << to_text(find_case(name).defaults);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Well-balanced high-order shallow-water benchmark driver"};
    app.require_subcommand(1);

    std::string config_path, meshes = "20,40,80", case_name;
    auto* run_cmd = app.add_subcommand("run", "run one configuration to t_end");
    run_cmd->add_option("config", config_path, "key = value configuration file")->required();
    auto* conv_cmd = app.add_subcommand("converge", "run a configuration on several meshes and report orders");
    conv_cmd->add_option("config", config_path, "key = value configuration file")->required();
    conv_cmd->add_option("--meshes", meshes, "comma-separated cell counts per direction");
    auto* list_cmd = app.add_subcommand("list-cases", "list the benchmark cases");
    auto* print_cmd = app.add_subcommand("print-config", "print the default configuration of a case");
    print_cmd->add_option("case", case_name, "case name")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfig;
    }

    try {
        if (*run_cmd) return cmd_run(config_path);
        if (*conv_cmd) return cmd_converge(config_path, meshes);
        if (*list_cmd) return cmd_list();
        if (*print_cmd) return cmd_print_config(case_name);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const NumericalFault& e) {
        std::fprintf(stderr, "numerical fault: %s\n", e.what());
        return kExitFault;
    }
    return 0;
}
