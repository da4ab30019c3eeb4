#include <cstdio>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "oscfrac/config.hpp"
#include "oscfrac/criteria.hpp"
#include "oscfrac/dde.hpp"
#include "oscfrac/fraccalc.hpp"
#include "oscfrac/scenarios.hpp"

using json = nlohmann::ordered_json;

namespace {

// exit codes: 0 success, 1 verification mismatch, 2 config error,
// 3 solver error, 4 inconclusive verdict under --strict
constexpr int kExitOk = 0;
constexpr int kExitMismatch = 1;
constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;
constexpr int kExitInconclusive = 4;

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

const char* verdict_name(oscfrac::dde::ComponentVerdict v) {
    using oscfrac::dde::ComponentVerdict;
    switch (v) {
        case ComponentVerdict::Oscillatory: return "oscillatory";
        case ComponentVerdict::NonOscPositive: return "nonoscillatory-positive";
        case ComponentVerdict::NonOscNegative: return "nonoscillatory-negative";
        default: return "undetermined";
    }
}

json divergence_json(const oscfrac::quad::DivergenceVerdict& v) {
    json evidence = json::array();
    for (const auto& [h, val] : v.partials)
        evidence.push_back({{"horizon", h}, {"partial_value", val}});
    json out;
    out["classification"] = oscfrac::criteria::to_string(v.cls);
    out["evidence"] = evidence;
    out["beta"] = v.beta;
    out["log_growth"] = v.log_growth;
    if (v.cls == oscfrac::quad::Growth::Converges) out["limit"] = v.limit;
    if (!v.note.empty()) out["note"] = v.note;
    return out;
}

json tail_json(const oscfrac::quad::TailConstant& t) {
    json out;
    out["kind"] = t.kind == oscfrac::quad::TailKind::LimInf ? "liminf" : "limsup";
    out["value"] = t.value;
    out["low_confidence"] = t.low_confidence;
    out["diverging"] = t.diverging;
    json est = json::array();
    for (const auto& [tt, vv] : t.window_estimates)
        est.push_back({{"t", tt}, {"extremum", vv}});
    out["window_estimates"] = est;
    return out;
}

json criterion_json(const oscfrac::criteria::CriterionReport& rep) {
    json out;
    out["id"] = rep.id;
    out["verdict"] = oscfrac::criteria::to_string(rep.verdict);
    out["conclusion"] = rep.conclusion;
    json probes = json::array();
    for (const auto& [name, v] : rep.probes) {
        json p = divergence_json(v);
        p["name"] = name;
        probes.push_back(p);
    }
    out["probes"] = probes;
    json tails = json::array();
    for (const auto& [name, t] : rep.tails) {
        json tj = tail_json(t);
        tj["name"] = name;
        tails.push_back(tj);
    }
    out["tails"] = tails;
    out["notes"] = rep.notes;
    return out;
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << text;
}

int cmd_simulate(const std::string& config_path) {
    oscfrac::config::RunConfig cfg;
    try {
        cfg = oscfrac::config::load_config(config_path);
        if (!cfg.has_history) throw oscfrac::config::ConfigError("simulate requires [history]");
        if (!(cfg.t_end >= cfg.spec.t0))
            throw oscfrac::config::ConfigError("simulate requires t_end >= t0");
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    }
    try {
        auto traj = oscfrac::dde::solve(cfg.spec, cfg.history, cfg.t_end, cfg.dt, cfg.scale);

        std::string csv = "t,u,v,w\n";
        const double x0 = cfg.scale == oscfrac::dde::TimeScale::Log ? std::log(cfg.spec.t0)
                                                                    : cfg.spec.t0;
        const double x1 = cfg.scale == oscfrac::dde::TimeScale::Log ? std::log(traj.t_end())
                                                                    : traj.t_end();
        const int rows = cfg.t_end == cfg.spec.t0
                             ? 0
                             : static_cast<int>(std::ceil((x1 - x0) / cfg.dt));
        for (int i = 0; i <= rows; ++i) {
            const double x = rows == 0 ? x0 : x0 + (x1 - x0) * i / rows;
            const double t = cfg.scale == oscfrac::dde::TimeScale::Log ? std::exp(x) : x;
            const auto y = traj.eval(t);
            csv += fmt17(t) + "," + fmt17(y[0]) + "," + fmt17(y[1]) + "," + fmt17(y[2]) + "\n";
        }
        write_text(cfg.trajectory_csv, csv);

        const double wlo = cfg.window_lo > 0 ? cfg.window_lo : cfg.spec.t0;
        const double whi =
            std::min(cfg.window_hi > wlo ? cfg.window_hi : traj.t_end(), traj.t_end());
        json out;
        if (whi > wlo) {
            auto cls = oscfrac::dde::classify(traj, wlo, whi, cfg.min_crossings);
            out["system"] = verdict_name(cls.system);
            json comps = json::array();
            for (int c = 0; c < 3; ++c) {
                comps.push_back(
                    {{"verdict", verdict_name(cls.component[static_cast<std::size_t>(c)])},
                     {"crossings", cls.crossings[static_cast<std::size_t>(c)].size()}});
            }
            out["components"] = comps;
            out["low_density"] = cls.low_density;
        }
        out["truncated"] = traj.truncated();
        out["clamp_activations"] = traj.clamp_activations();
        write_text(cfg.report_json, out.dump(2) + "\n");
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return kExitSolver;
    }
}

int cmd_criteria(const std::string& config_path, std::vector<std::string> select,
                 bool select_given, bool strict) {
    oscfrac::config::RunConfig cfg;
    try {
        cfg = oscfrac::config::load_config(config_path);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    }
    namespace cr = oscfrac::criteria;
    std::erase(select, std::string());
    // no --select at all runs the default pair; an explicitly empty
    // selection produces an empty report
    if (select.empty() && !select_given) select = {"coefficient", "weighted"};

    std::vector<cr::CriterionReport> reports;
    try {
        for (const auto& name : select) {
            if (name == "coefficient") {
                reports.push_back(cr::check_coefficient_integrals(cfg.spec, cfg.horizons));
            } else if (name == "weighted") {
                reports.push_back(
                    cr::check_weighted_divergence(cfg.spec, cfg.rho, cfg.spec.T, cfg.horizons));
            } else if (name == "kernel" || name == "kernel-singular") {
                auto kernel = cfg.kernel_H
                                  ? cr::KernelSpec::make(*cfg.kernel_H, cfg.rho)
                                  : cr::KernelSpec::preset(cfg.kernel, cfg.rho);
                auto grid = cfg.criteria_grid();
                reports.push_back(name == "kernel"
                                      ? cr::check_kernel_averaging(cfg.spec, kernel, cfg.spec.T,
                                                                  grid)
                                      : cr::check_kernel_averaging_singular(cfg.spec, kernel,
                                                                           cfg.spec.T, grid));
            } else if (name == "nested-decay") {
                reports.push_back(cr::check_nested_decay(cfg.spec, cfg.horizons));
            } else if (name == "averaged-delay") {
                reports.push_back(cr::check_averaged_liminf(cfg.spec, nullptr, cfg.spec.T,
                                                            cfg.criteria_grid(),
                                                            cr::AverageVariant::Delay));
            } else if (name == "averaged-state") {
                if (!cfg.has_history || !(cfg.t_end >= cfg.spec.t0)) {
                    std::cerr << "config error: averaged-state needs [history] and t_end\n";
                    return kExitConfig;
                }
                auto traj =
                    oscfrac::dde::solve(cfg.spec, cfg.history, cfg.t_end, cfg.dt, cfg.scale);
                std::vector<double> grid;
                // grid restricted to where the trajectory covers the
                // composed delay
                for (double t : cfg.criteria_grid())
                    if (t <= traj.t_end()) grid.push_back(t);
                reports.push_back(cr::check_averaged_liminf(cfg.spec, &traj, cfg.spec.T, grid,
                                                            cr::AverageVariant::State));
            } else {
                std::cerr << "config error: unknown criterion '" << name << "'\n";
                return kExitConfig;
            }
        }
    } catch (const cr::KernelError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return kExitSolver;
    }

    json arr = json::array();
    bool any_inconclusive = false;
    for (const auto& rep : reports) {
        arr.push_back(criterion_json(rep));
        any_inconclusive = any_inconclusive || rep.verdict == cr::Verdict::Inconclusive;
    }
    write_text(cfg.report_json, arr.dump(2) + "\n");
    if (strict && any_inconclusive) return kExitInconclusive;
    return kExitOk;
}

int cmd_verify(const std::string& id) {
    oscfrac::scenarios::VerifyReport rep;
    try {
        rep = oscfrac::scenarios::verify(id);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return kExitSolver;
    }
    std::printf("scenario %s\n", rep.id.c_str());
    for (const auto& c : rep.checks)
        std::printf("  [%s] %-32s %s\n", c.pass ? "pass" : "FAIL", c.name.c_str(),
                    c.detail.c_str());
    return rep.all_pass() ? kExitOk : kExitMismatch;
}

int cmd_properties(double alpha) {
    std::vector<double> samples;
    for (int i = 0; i <= 40; ++i) samples.push_back(0.5 + (50.0 - 0.5) * i / 40.0);
    auto report = oscfrac::fraccalc::check_properties(oscfrac::fraccalc::Alpha(alpha), samples);
    for (const auto& e : report.entries)
        std::printf("%-18s max rel err %.3e  (worst: %s)\n", e.property.c_str(),
                    e.max_rel_error, e.worst_case.c_str());
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fractional delay system simulator and oscillation criteria evaluator"};
    app.require_subcommand(1);

    std::string config_path;
    auto* sim = app.add_subcommand("simulate", "integrate the system and classify oscillation");
    sim->add_option("--config", config_path, "config file")->required();

    std::string crit_config;
    std::vector<std::string> select;
    bool strict = false;
    auto* crit = app.add_subcommand("criteria", "evaluate oscillation criteria");
    crit->add_option("--config", crit_config, "config file")->required();
    crit->add_option("--select", select,
                     "criteria to run: coefficient weighted kernel kernel-singular "
                     "nested-decay averaged-delay averaged-state")
        ->delimiter(',');
    crit->add_flag("--strict", strict, "exit 4 when any verdict is Inconclusive");

    std::string scenario_id;
    auto* ver = app.add_subcommand("verify", "check a built-in scenario against expectations");
    ver->add_option("id", scenario_id, "scenario id")->required();

    double alpha = 0.5;
    auto* props = app.add_subcommand("properties", "randomized derivative property checks");
    props->add_option("--alpha", alpha, "derivative order in (0, 1]");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    if (sim->parsed()) return cmd_simulate(config_path);
    if (crit->parsed())
        return cmd_criteria(crit_config, select, crit->count("--select") > 0, strict);
    if (ver->parsed()) return cmd_verify(scenario_id);
    if (props->parsed()) return cmd_properties(alpha);
    return kExitConfig;
}
