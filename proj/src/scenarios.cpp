#include "oscfrac/scenarios.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace oscfrac::scenarios {

namespace {

const std::vector<std::string> kT = {"t"};
const std::vector<std::string> kS = {"s"};
const std::vector<std::string> kU = {"u"};
const std::vector<std::string> kV = {"v"};
const std::vector<std::string> kW = {"w"};

expr::Expr et(const std::string& text) { return expr::Expr::parse(text, kT); }

Scenario log_periodic() {
    Scenario sc;
    sc.id = "log-periodic";
    sc.spec.alpha = fraccalc::Alpha(0.5);
    sc.spec.p = et("1/sqrt(t)");
    sc.spec.q = et("1/sqrt(t)");
    sc.spec.r = et("1/sqrt(t)");
    sc.spec.g = expr::Expr::parse("v", kV);
    sc.spec.h = expr::Expr::parse("w", kW);
    // A1 sqrt(1-u^2) - A2 u with A1 = cos(ln 4), A2 = sin(ln 4)
    sc.spec.f = expr::Expr::parse("cos(ln(4))*sqrt(1-u^2)-sin(ln(4))*u", kU);
    sc.spec.sigma = et("t/2");
    sc.spec.tau = et("t/2");
    sc.spec.k = 0.2579;
    sc.spec.l = 0.5;
    const double C1 = std::cos(std::numbers::ln2), C2 = std::sin(std::numbers::ln2);
    sc.spec.l_prime = C1 + C2;
    sc.spec.m_prime = C1 - C2;
    sc.spec.t0 = 10.0;
    sc.spec.T = 10.0;
    sc.spec.f_arg_clamp = {{-(1.0 - 1e-12), 1.0 - 1e-12}};

    sc.reference = {et("sin(ln(t))"),
                    et("cos(ln(2))*cos(ln(t))-sin(ln(2))*sin(ln(t))"),
                    et("cos(ln(2))*sin(ln(t))+sin(ln(2))*cos(ln(t))")};
    sc.history = dde::History{sc.reference[0], sc.reference[1], sc.reference[2], 5.0};
    sc.rho = expr::Expr::parse("16/0.2579", kS);

    // cos(ln(t/2)) is negative on all of [10, 200]; the first window with
    // margin 0.1 is roughly [246, 4666], so the grid reaches past it
    sc.grid_lo = 10.0;
    sc.grid_hi = 5000.0;
    sc.restriction = [](double t) { return std::cos(std::log(t / 2.0)) >= 0.1; };

    // the solution is periodic in ln t; a 40 pi phase window needs
    // t up to t0 * exp(40 pi)
    sc.sim_scale = dde::TimeScale::Log;
    sc.sim_t_end = 10.0 * std::exp(40.0 * std::numbers::pi);
    sc.sim_dt = 1e-2;
    sc.window_lo = 10.0;
    sc.window_hi = sc.sim_t_end;
    sc.min_crossings = 10;

    sc.expected_system = dde::ComponentVerdict::Oscillatory;
    sc.expected_weighted = criteria::Verdict::Satisfied;
    // side condition b(t) t^(1-a) = t fails
    sc.expected_coefficient = criteria::Verdict::NotSatisfied;
    return sc;
}

Scenario trig_periodic() {
    Scenario sc;
    sc.id = "trig-periodic";
    sc.spec.alpha = fraccalc::Alpha(1.0 / 3.0);
    sc.spec.p = et("t^(2/3)/(1+(3/4)*cbrt(cos(t))^5)");
    sc.spec.q = et("t^(2/3)");
    sc.spec.r = et("t^(2/3)/(1+cos(t)^2)");
    sc.spec.g = expr::Expr::parse("v*(1+(3/4)*cbrt(v)^5)", kV);
    sc.spec.h = expr::Expr::parse("w", kW);
    sc.spec.f = expr::Expr::parse("u*(1+u^2)", kU);
    sc.spec.sigma = et("t-2*pi");
    sc.spec.tau = et("t-3*pi/2");
    sc.spec.k = 1.0;
    sc.spec.l = 1.0;
    sc.spec.l_prime = 1.0;
    sc.spec.m_prime = 1.0;
    sc.spec.t0 = 10.0;
    sc.spec.T = 10.0;

    sc.reference = {et("sin(t)"), et("cos(t)"), et("sin(t)")};
    sc.history =
        dde::History{sc.reference[0], sc.reference[1], sc.reference[2],
                     10.0 - 2.0 * std::numbers::pi};
    sc.rho = expr::Expr::parse("1", kS);

    sc.grid_lo = 10.0;
    sc.grid_hi = 150.0;

    sc.sim_scale = dde::TimeScale::Linear;
    sc.sim_t_end = 10.0 + 40.0 * std::numbers::pi;
    sc.sim_dt = 1e-2;
    sc.window_lo = 10.0;
    sc.window_hi = sc.sim_t_end;
    sc.min_crossings = 10;

    sc.expected_system = dde::ComponentVerdict::Oscillatory;
    sc.expected_weighted = criteria::Verdict::Satisfied;
    // side condition b(t) t^(1-a) = 1 is not strictly below 1
    sc.expected_coefficient = criteria::Verdict::NotSatisfied;
    return sc;
}

Scenario exponential(bool corrected) {
    Scenario sc;
    sc.id = corrected ? "exponential-corrected" : "exponential";
    sc.spec.alpha = fraccalc::Alpha(0.5);
    // the stated coefficient exp(2t) sqrt(t) leaves a residual of
    // (e-1) sqrt(t) e^t in the first equation; the corrected variant
    // divides it by e
    sc.spec.p = corrected ? et("exp(2*t-1)*sqrt(t)") : et("exp(2*t)*sqrt(t)");
    sc.spec.q = et("exp(-2*t)*sqrt(t)");
    sc.spec.r = et("sqrt(e*t)");
    sc.spec.g = expr::Expr::parse("v", kV);
    sc.spec.h = expr::Expr::parse("w", kW);
    sc.spec.f = expr::Expr::parse("u", kU);
    sc.spec.sigma = et("t-1");
    sc.spec.tau = et("t-1/2");
    sc.spec.k = 1.0;
    sc.spec.l = 1.0;
    sc.spec.l_prime = 1.0;
    sc.spec.m_prime = 1.0;
    sc.spec.t0 = 10.0;
    sc.spec.T = 10.0;

    sc.reference = {et("exp(t)"), et("exp(-t)"), et("exp(t)")};
    sc.history = dde::History{sc.reference[0], sc.reference[1], sc.reference[2], 9.0};
    sc.rho = expr::Expr::parse("1/(s^(7/2)*exp(2*s))", kS);

    sc.grid_lo = 10.0;
    sc.grid_hi = 15.0;

    // the closed form e^t is dynamically unstable here: homogeneous
    // modes grow faster than the solution, so rounding noise overtakes
    // it near t = 37. The window stops while the trajectory is faithful.
    sc.sim_scale = dde::TimeScale::Linear;
    sc.sim_t_end = 35.0;
    sc.sim_dt = 1e-2;
    sc.window_lo = 10.0;
    sc.window_hi = sc.sim_t_end;
    sc.min_crossings = 10;

    sc.expected_system = dde::ComponentVerdict::NonOscPositive;
    if (!corrected) {
        // with the stated coefficient the solution from the e^t history
        // turns negative once near t = 14 and then grows negative; skip
        // the transient and expect the eventual sign
        sc.window_lo = 16.0;
        sc.expected_system = dde::ComponentVerdict::NonOscNegative;
    }
    sc.expected_weighted = criteria::Verdict::NotSatisfied;
    sc.expected_coefficient = criteria::Verdict::NotSatisfied;
    return sc;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

}  // namespace

std::vector<double> Scenario::residual_grid(int points) const {
    std::vector<double> grid;
    for (int i = 0; i < points; ++i) {
        const double t = grid_lo + (grid_hi - grid_lo) * i / (points - 1);
        if (!restriction || restriction(t)) grid.push_back(t);
    }
    return grid;
}

std::vector<std::string> known_ids() {
    return {"log-periodic", "trig-periodic", "exponential", "exponential-corrected"};
}

Scenario load(const std::string& id) {
    if (id == "log-periodic") return log_periodic();
    if (id == "trig-periodic") return trig_periodic();
    if (id == "exponential") return exponential(false);
    if (id == "exponential-corrected") return exponential(true);
    std::string known;
    for (const auto& k : known_ids()) known += k + " ";
    throw std::invalid_argument("unknown scenario id '" + id + "'; known: " + known);
}

bool VerifyReport::all_pass() const {
    for (const auto& c : checks)
        if (!c.pass) return false;
    return true;
}

VerifyReport verify(const std::string& id) {
    Scenario sc = load(id);
    VerifyReport rep;
    rep.id = id;
    auto add = [&](const std::string& name, bool pass, const std::string& detail) {
        rep.checks.push_back({name, pass, detail});
    };

    // closed-form residuals
    {
        auto grid = sc.residual_grid();
        auto res = dde::residual(sc.spec, sc.reference, grid);
        if (sc.id == "exponential") {
            // first equation: known mismatch of (e-1) sqrt(t) e^t; the
            // other two are exact
            const double t_max = grid.back();
            const double expect =
                (std::numbers::e - 1.0) * std::sqrt(t_max) * std::exp(t_max);
            const bool ok1 = std::fabs(res[0] - expect) <= 1e-6 * expect;
            add("residual eq1 mismatch magnitude", ok1,
                "max=" + fmt(res[0]) + " expected=" + fmt(expect));
            add("residuals eq2/eq3", res[1] <= 1e-8 && res[2] <= 1e-8,
                "eq2=" + fmt(res[1]) + " eq3=" + fmt(res[2]));
        } else {
            const double tol = sc.id == "log-periodic" ? 1e-6 : 1e-8;
            add("residuals", res[0] <= tol && res[1] <= tol && res[2] <= tol,
                "eq1=" + fmt(res[0]) + " eq2=" + fmt(res[1]) + " eq3=" + fmt(res[2]));
        }
    }

    // simulation + classification
    {
        auto traj = dde::solve(sc.spec, sc.history, sc.sim_t_end, sc.sim_dt, sc.sim_scale);
        // the comparison is only meaningful where the closed form solves
        // the system globally: not for the stated exponential coefficient
        // and not for the sign-restricted solution
        if (sc.id == "trig-periodic" || sc.id == "exponential-corrected") {
            // trajectory against the closed form at a mid-window point
            const double t_probe =
                sc.sim_scale == dde::TimeScale::Log
                    ? std::sqrt(sc.window_lo * sc.window_hi)
                    : 0.5 * (sc.window_lo + sc.window_hi);
            double worst = 0;
            for (int c = 0; c < 3; ++c) {
                const double refv = sc.reference[static_cast<std::size_t>(c)].eval1(t_probe);
                const double simv = traj.eval_comp(c, t_probe);
                worst = std::max(worst,
                                 std::fabs(simv - refv) / std::max(1.0, std::fabs(refv)));
            }
            add("trajectory matches closed form", worst <= 1e-3,
                "max rel deviation " + fmt(worst) + " at t=" + fmt(t_probe));
        }
        auto cls = dde::classify(traj, sc.window_lo, sc.window_hi, sc.min_crossings);
        add("oscillation class", cls.system == sc.expected_system,
            "components " + std::to_string(cls.crossings[0].size()) + "/" +
                std::to_string(cls.crossings[1].size()) + "/" +
                std::to_string(cls.crossings[2].size()) + " crossings");
    }

    // divergence criteria
    {
        const std::vector<double> horizons = {1e2, 1e3, 1e4, 1e5};
        auto wrep = criteria::check_weighted_divergence(sc.spec, sc.rho, sc.spec.T, horizons);
        add("weighted divergence criterion", wrep.verdict == sc.expected_weighted,
            criteria::to_string(wrep.verdict) + " (expected " +
                criteria::to_string(sc.expected_weighted) + ")");
        auto arep = criteria::check_coefficient_integrals(sc.spec, horizons);
        add("coefficient integrals", arep.verdict == sc.expected_coefficient,
            criteria::to_string(arep.verdict) + " (expected " +
                criteria::to_string(sc.expected_coefficient) + ")");
    }
    return rep;
}

}  // namespace oscfrac::scenarios
