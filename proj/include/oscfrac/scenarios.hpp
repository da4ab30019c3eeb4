#pragma once

#include <functional>
#include <string>
#include <vector>

#include "oscfrac/criteria.hpp"
#include "oscfrac/dde.hpp"
#include "oscfrac/expr.hpp"

namespace oscfrac::scenarios {

// Built-in system with a closed-form reference solution and pinned
// expected outcomes. Ids: log-periodic, trig-periodic, exponential,
// exponential-corrected.
struct Scenario {
    std::string id;
    dde::SystemSpec spec;
    std::array<expr::Expr, 3> reference;  // closed-form (u, v, w), variable t
    dde::History history;
    expr::Expr rho;  // weight for the divergence criterion, variable s

    // residual grid: [grid_lo, grid_hi], points passing `restriction`
    double grid_lo = 0, grid_hi = 0;
    std::function<bool(double)> restriction;  // may be empty

    dde::TimeScale sim_scale = dde::TimeScale::Linear;
    double sim_t_end = 0;
    double sim_dt = 1e-2;
    double window_lo = 0, window_hi = 0;
    int min_crossings = 10;

    dde::ComponentVerdict expected_system = dde::ComponentVerdict::Undetermined;
    criteria::Verdict expected_weighted = criteria::Verdict::Inconclusive;
    criteria::Verdict expected_coefficient = criteria::Verdict::Inconclusive;

    std::vector<double> residual_grid(int points = 500) const;
};

std::vector<std::string> known_ids();

Scenario load(const std::string& id);  // throws std::invalid_argument on unknown id

struct VerifyCheck {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct VerifyReport {
    std::string id;
    std::vector<VerifyCheck> checks;
    bool all_pass() const;
};

// Residuals on the restricted grid, simulation + oscillation
// classification, and the divergence criteria, each compared against the
// scenario's expected outcomes.
VerifyReport verify(const std::string& id);

}  // namespace oscfrac::scenarios
