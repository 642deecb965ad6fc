#pragma once

// Run configuration: a flat key = value text format with '#' comments.

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>

namespace swell::bench {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::string case_name;
    int nx = 0;
    int ny = 0;
    int degree = 0;
    bool wb = true;
    bool mood = true;
    double cfl = 1.0;
    double t_end = 0.0;
    double g = 9.81;
    double manning_k = 0.0;
    double cutoff_c = std::numeric_limits<double>::infinity();
    double char_len_x = 0.0;   // 0 selects the domain length
    double char_len_y = 0.0;
    double theta_exp = 0.0;    // 0 selects degree + 1
    std::string out_dir;
    double snap_every = 0.0;   // 0 writes only the final state
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

inline double parse_double(const std::string& key, const std::string& v) {
    if (v == "inf" || v == "+inf" || v == "infinity") return std::numeric_limits<double>::infinity();
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size() || std::isnan(d)) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': expected a number, got '" + v + "'");
    }
}

inline int parse_int(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const long n = std::stol(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return static_cast<int>(n);
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': expected an integer, got '" + v + "'");
    }
}

inline bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "on" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "off" || v == "no") return false;
    throw ConfigError("key '" + key + "': expected a boolean, got '" + v + "'");
}

}  // namespace detail

/// Parses key = value pairs. Keys absent from the text are left out of the
/// returned map so that case defaults can fill them.
inline std::map<std::string, std::string> parse_pairs(const std::string& text) {
    std::map<std::string, std::string> out;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string val = detail::trim(line.substr(eq + 1));
        if (key.empty() || val.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key or value");
        if (out.count(key)) throw ConfigError("duplicate key '" + key + "'");
        out[key] = val;
    }
    return out;
}

/// Applies parsed pairs on top of `base`.
inline RunConfig apply_pairs(RunConfig base, const std::map<std::string, std::string>& kv) {
    using namespace detail;
    for (const auto& [k, v] : kv) {
        if (k == "case") base.case_name = v;
        else if (k == "nx") base.nx = parse_int(k, v);
        else if (k == "ny") base.ny = parse_int(k, v);
        else if (k == "degree") base.degree = parse_int(k, v);
        else if (k == "wb") base.wb = parse_bool(k, v);
        else if (k == "mood") base.mood = parse_bool(k, v);
        else if (k == "cfl") base.cfl = parse_double(k, v);
        else if (k == "t_end") base.t_end = parse_double(k, v);
        else if (k == "g") base.g = parse_double(k, v);
        else if (k == "manning_k") base.manning_k = parse_double(k, v);
        else if (k == "cutoff_c") base.cutoff_c = parse_double(k, v);
        else if (k == "char_len_x") base.char_len_x = parse_double(k, v);
        else if (k == "char_len_y") base.char_len_y = parse_double(k, v);
        else if (k == "theta_exp") base.theta_exp = parse_double(k, v);
        else if (k == "out_dir") base.out_dir = v;
        else if (k == "snap_every") base.snap_every = parse_double(k, v);
        else throw ConfigError("unknown key '" + k + "'");
    }
    return base;
}

inline void check(const RunConfig& c) {
    if (c.nx < 1 || c.ny < 1) throw ConfigError("nx and ny must be positive");
    if (c.degree < 0 || c.degree > 5) throw ConfigError("degree must lie in [0, 5]");
    if (!(c.cfl > 0.0) || c.cfl > 1.0) throw ConfigError("cfl must lie in (0, 1]");
    if (!(c.t_end >= 0.0) || !std::isfinite(c.t_end)) throw ConfigError("t_end must be finite and non-negative");
    if (!(c.g > 0.0)) throw ConfigError("g must be positive");
    if (!(c.manning_k >= 0.0)) throw ConfigError("manning_k must be non-negative");
    if (!(c.cutoff_c > 0.0)) throw ConfigError("cutoff_c must be positive");
    if (c.char_len_x < 0.0 || c.char_len_y < 0.0) throw ConfigError("characteristic lengths must be non-negative");
    if (c.theta_exp != 0.0 && c.theta_exp < c.degree + 1)
        throw ConfigError("theta_exp must be at least degree + 1");
    if (c.snap_every < 0.0) throw ConfigError("snap_every must be non-negative");
}

/// Shortest text that reads back to the same double.
inline std::string format_double(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

inline std::string to_text(const RunConfig& c) {
    std::ostringstream os;
    os << "case = " << c.case_name << "\n"
       << "nx = " << c.nx << "\n"
       << "ny = " << c.ny << "\n"
       << "degree = " << c.degree << "\n"
       << "wb = " << (c.wb ? "true" : "false") << "\n"
       << "mood = " << (c.mood ? "true" : "false") << "\n"
       << "cfl = " << format_double(c.cfl) << "\n"
       << "t_end = " << format_double(c.t_end) << "\n"
       << "g = " << format_double(c.g) << "\n"
       << "manning_k = " << format_double(c.manning_k) << "\n"
       << "cutoff_c = " << format_double(c.cutoff_c) << "\n"
       << "char_len_x = " << format_double(c.char_len_x) << "  # 0: domain length\n"
       << "char_len_y = " << format_double(c.char_len_y) << "  # 0: domain length\n"
       << "theta_exp = " << format_double(c.theta_exp) << "  # 0: degree + 1\n";
    if (!c.out_dir.empty()) os << "out_dir = " << c.out_dir << "\n";
    os << "snap_every = " << format_double(c.snap_every) << "\n";
    return os.str();
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

}  // namespace swell::bench
