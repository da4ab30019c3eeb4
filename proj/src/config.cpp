#include "oscfrac/config.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace oscfrac::config {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string unquote(const std::string& s) {
    if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') ||
                          (s.front() == '\'' && s.back() == '\'')))
        return s.substr(1, s.size() - 2);
    return s;
}

double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const double d = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument("trailing");
        return d;
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': expected a number, got '" + v + "'");
    }
}

int to_int(const std::string& key, const std::string& v) {
    const double d = to_double(key, v);
    if (d != std::rint(d)) throw ConfigError("key '" + key + "': expected an integer");
    return static_cast<int>(d);
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(to_double(key, item));
    }
    if (out.empty()) throw ConfigError("key '" + key + "': empty list");
    return out;
}

expr::Expr parse_expr_value(const std::string& key, const std::string& text,
                            std::vector<std::string> vars) {
    try {
        return expr::Expr::parse(text, std::move(vars));
    } catch (const expr::ParseError& e) {
        throw ConfigError("key '" + key + "': " + e.what());
    }
}

}  // namespace

std::vector<double> RunConfig::criteria_grid() const {
    std::vector<double> grid;
    const double lo = grid_lo > 0 ? grid_lo : spec.t0 * 2;
    const double hi = grid_hi > lo ? grid_hi : lo * 100;
    const double la = std::log(lo), lb = std::log(hi);
    for (int i = 0; i < grid_points; ++i)
        grid.push_back(std::exp(la + (lb - la) * i / (grid_points - 1)));
    return grid;
}

RunConfig parse_config(const std::string& text) {
    // section -> key -> value
    std::map<std::string, std::map<std::string, std::string>> kv;
    std::string section;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find_first_of("#;");
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("line " + std::to_string(lineno) + ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        if (section.empty())
            throw ConfigError("line " + std::to_string(lineno) + ": key outside any section");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = unquote(trim(line.substr(eq + 1)));
        if (!kv[section].emplace(key, val).second)
            throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    }

    RunConfig cfg;
    const std::vector<std::string> t = {"t"}, s = {"s"}, u = {"u"}, v = {"v"}, w = {"w"},
                                   ts = {"t", "s"};

    auto take = [&](const std::string& sec, const std::string& key) -> std::optional<std::string> {
        auto si = kv.find(sec);
        if (si == kv.end()) return std::nullopt;
        auto ki = si->second.find(key);
        if (ki == si->second.end()) return std::nullopt;
        std::string out = ki->second;
        si->second.erase(ki);
        return out;
    };
    auto require = [&](const std::string& sec, const std::string& key) {
        auto o = take(sec, key);
        if (!o) throw ConfigError("missing required key '" + key + "' in section [" + sec + "]");
        return *o;
    };

    // [system]
    cfg.spec.alpha = fraccalc::Alpha(to_double("alpha", require("system", "alpha")));
    cfg.spec.p = parse_expr_value("p", require("system", "p"), t);
    cfg.spec.q = parse_expr_value("q", require("system", "q"), t);
    cfg.spec.r = parse_expr_value("r", require("system", "r"), t);
    cfg.spec.f = parse_expr_value("f", require("system", "f"), u);
    cfg.spec.g = parse_expr_value("g", require("system", "g"), v);
    cfg.spec.h = parse_expr_value("h", require("system", "h"), w);
    cfg.spec.sigma = parse_expr_value("sigma", require("system", "sigma"), t);
    cfg.spec.tau = parse_expr_value("tau", require("system", "tau"), t);
    cfg.spec.k = to_double("k", require("system", "k"));
    cfg.spec.l = to_double("l", require("system", "l"));
    cfg.spec.l_prime = to_double("l_prime", require("system", "l_prime"));
    cfg.spec.m_prime = to_double("m_prime", require("system", "m_prime"));
    cfg.spec.t0 = to_double("t0", require("system", "t0"));
    cfg.spec.T = cfg.spec.t0;
    if (auto o = take("system", "T")) cfg.spec.T = to_double("T", *o);
    {
        auto lo = take("system", "clamp_lo");
        auto hi = take("system", "clamp_hi");
        if (lo.has_value() != hi.has_value())
            throw ConfigError("clamp_lo and clamp_hi must be given together");
        if (lo) cfg.spec.f_arg_clamp = {{to_double("clamp_lo", *lo), to_double("clamp_hi", *hi)}};
    }

    // [history]
    if (kv.count("history") && !kv["history"].empty()) {
        cfg.has_history = true;
        cfg.history.u0 = parse_expr_value("u0", require("history", "u0"), t);
        cfg.history.v0 = parse_expr_value("v0", require("history", "v0"), t);
        cfg.history.w0 = parse_expr_value("w0", require("history", "w0"), t);
        cfg.history.T1 = to_double("T1", require("history", "T1"));
    }

    // [simulate]
    if (auto o = take("simulate", "t_end")) cfg.t_end = to_double("t_end", *o);
    if (auto o = take("simulate", "dt")) cfg.dt = to_double("dt", *o);
    if (auto o = take("simulate", "scale")) {
        if (*o == "linear")
            cfg.scale = dde::TimeScale::Linear;
        else if (*o == "log")
            cfg.scale = dde::TimeScale::Log;
        else
            throw ConfigError("key 'scale': expected linear or log, got '" + *o + "'");
    }
    if (auto o = take("simulate", "window_lo")) cfg.window_lo = to_double("window_lo", *o);
    if (auto o = take("simulate", "window_hi")) cfg.window_hi = to_double("window_hi", *o);
    if (auto o = take("simulate", "min_crossings"))
        cfg.min_crossings = to_int("min_crossings", *o);

    // [criteria]
    cfg.rho = expr::Expr::parse("1", s);
    if (auto o = take("criteria", "rho")) cfg.rho = parse_expr_value("rho", *o, s);
    if (auto o = take("criteria", "kernel")) cfg.kernel = *o;
    if (auto o = take("criteria", "H")) cfg.kernel_H = parse_expr_value("H", *o, ts);
    if (auto o = take("criteria", "horizons")) cfg.horizons = to_list("horizons", *o);
    if (auto o = take("criteria", "beta_min")) cfg.beta_min = to_double("beta_min", *o);
    if (auto o = take("criteria", "grid_lo")) cfg.grid_lo = to_double("grid_lo", *o);
    if (auto o = take("criteria", "grid_hi")) cfg.grid_hi = to_double("grid_hi", *o);
    if (auto o = take("criteria", "grid_points")) cfg.grid_points = to_int("grid_points", *o);

    // [output]
    if (auto o = take("output", "trajectory_csv")) cfg.trajectory_csv = *o;
    if (auto o = take("output", "report_json")) cfg.report_json = *o;

    static const char* known_sections[] = {"system", "history", "simulate", "criteria", "output"};
    for (const auto& [sec, keys] : kv) {
        bool known = false;
        for (const char* ks : known_sections) known = known || sec == ks;
        if (!known) throw ConfigError("unknown section [" + sec + "]");
        if (!keys.empty())
            throw ConfigError("unknown key '" + keys.begin()->first + "' in section [" + sec +
                              "]");
    }

    // re-validate the standing assumptions over the configured range
    const double t_hi = std::max({cfg.t_end, cfg.window_hi, cfg.spec.t0 + 10.0});
    try {
        cfg.spec.validate(t_hi);
    } catch (const dde::SpecError& e) {
        throw ConfigError(e.what());
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

}  // namespace oscfrac::config
