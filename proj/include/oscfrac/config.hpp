#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "oscfrac/dde.hpp"
#include "oscfrac/expr.hpp"

namespace oscfrac::config {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Parsed run configuration. Sections: [system], [history], [simulate],
// [criteria], [output]. Unknown sections or keys are rejected.
struct RunConfig {
    dde::SystemSpec spec;

    bool has_history = false;
    dde::History history;

    double t_end = 0;
    double dt = 1e-2;
    dde::TimeScale scale = dde::TimeScale::Linear;
    double window_lo = 0, window_hi = 0;
    int min_crossings = 10;

    expr::Expr rho;               // defaults to 1
    std::string kernel = "quadratic";
    std::optional<expr::Expr> kernel_H;  // custom H(t,s) overriding the preset
    std::vector<double> horizons;        // defaults to t0*{10,1e2,1e3,1e4}
    double beta_min = 0.05;
    double grid_lo = 0, grid_hi = 0;  // t grid for averaged criteria (log-spaced)
    int grid_points = 24;

    std::string trajectory_csv;
    std::string report_json;

    std::vector<double> criteria_grid() const;  // log-spaced [grid_lo, grid_hi]
};

RunConfig parse_config(const std::string& text);  // throws ConfigError
RunConfig load_config(const std::string& path);

}  // namespace oscfrac::config
