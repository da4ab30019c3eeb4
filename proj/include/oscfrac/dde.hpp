#pragma once

#include <array>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "oscfrac/expr.hpp"
#include "oscfrac/fraccalc.hpp"

namespace oscfrac::dde {

struct SpecError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct SolveError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Full description of the delay system
//   D^a u = p(t) g(v(sigma(t)))
//   D^a v = -q(t) h(w(t))
//   D^a w = r(t) f(u(tau(t)))
struct SystemSpec {
    fraccalc::Alpha alpha{0.5};
    expr::Expr p, q, r;       // coefficients, variable t
    expr::Expr g, h, f;       // nonlinearities, single variable each
    expr::Expr sigma, tau;    // delays, variable t
    double k = 1, l = 1, l_prime = 1, m_prime = 1;
    double t0 = 1;
    double T = 1;             // eventual-positivity anchor used in A_alpha
    // Optional clamp applied to the argument of f during simulation
    // (square-root nonlinearities with a bounded domain).
    std::optional<std::pair<double, double>> f_arg_clamp;

    // Sampled validation of the standing assumptions: positivity of
    // p, q, r; sigma, tau <= t, nondecreasing and unbounded; f(u)/u >= k
    // on a u-grid. Throws SpecError on violation.
    void validate(double t_hi, std::span<const double> u_grid = {}) const;
};

// a = 1/p, b = 1/q, c = l^2 l' m' r, and the oscillation weight A_alpha.
struct DerivedCoeffs {
    const SystemSpec* spec;
    explicit DerivedCoeffs(const SystemSpec& s) : spec(&s) {}
    double a(double t) const;
    double b(double t) const;
    double c(double t) const;
    double tau_sigma(double t) const;   // tau(sigma(t))
    double A_alpha(double t) const;
};

// Prescribed values of (u, v, w) on [T1, t0].
struct History {
    expr::Expr u0, v0, w0;  // variable t
    double T1 = 0;

    std::array<double, 3> eval(double t) const;
};

enum class TimeScale { Linear, Log };

// Dense piecewise-cubic solution of the system. Nodes are stored in the
// integration coordinate x (x = t for Linear, x = ln t for Log); cubic
// Hermite segments give C^1 dense output. Below t0 evaluation falls back
// to the History.
class Trajectory {
public:
    std::array<double, 3> eval(double t) const;
    double eval_comp(int comp, double t) const;
    // d/dt of a component from the dense output (History expressions
    // below t0).
    double deriv_comp(int comp, double t) const;

    double t_begin() const { return hist_.T1; }
    double t_start() const { return t0_; }
    double t_end() const;
    bool truncated() const { return truncated_; }
    long clamp_activations() const { return clamp_hits_; }
    TimeScale scale() const { return scale_; }
    const History& history() const { return hist_; }

private:
    friend Trajectory solve(const SystemSpec&, const History&, double, double, TimeScale);
    TimeScale scale_ = TimeScale::Linear;
    double t0_ = 0;
    std::vector<double> x_;                         // integration coordinate, ascending
    std::vector<std::array<double, 3>> y_;          // states at nodes
    std::vector<std::array<double, 3>> dydx_;       // derivatives (in x) at nodes
    History hist_;
    bool truncated_ = false;
    long clamp_hits_ = 0;

    double to_x(double t) const;
    std::array<double, 3> hermite(std::size_t seg, double x, bool deriv) const;
    std::size_t segment(double x) const;
};

// Method of steps: classical RK4 with fixed step dt in the integration
// coordinate, cubic Hermite dense output, delayed values read from the
// trajectory so far. A delayed argument inside the current step is
// resolved by fixed-point sweeps over the provisional segment.
Trajectory solve(const SystemSpec& spec, const History& hist, double t_end, double dt,
                 TimeScale scale = TimeScale::Linear);

// Max |D^alpha(component) - RHS| per equation for a closed-form candidate.
std::array<double, 3> residual(const SystemSpec& spec, const std::array<expr::Expr, 3>& candidate,
                               std::span<const double> grid);

enum class ComponentVerdict { Oscillatory, NonOscPositive, NonOscNegative, Undetermined };

struct OscillationClass {
    std::array<std::vector<double>, 3> crossings;  // refined sign-change times
    std::array<ComponentVerdict, 3> component;
    ComponentVerdict system;  // Oscillatory iff every component is
    bool low_density = false;
};

// Sign-change detection by dense sampling plus bisection refinement.
// Sampling is uniform in the trajectory's integration coordinate.
OscillationClass classify(const Trajectory& traj, double t_lo, double t_hi, int min_crossings,
                          int samples = 2000);

enum class CaseClass { CaseI, CaseII, Mixed };

struct CaseReport {
    CaseClass cls;
    double first_violation = 0;  // for Mixed
};

// Sign-pattern trichotomy of (u, D^a u, D^a(a D^a u)) for a window where
// u > 0.
CaseReport classify_case(const Trajectory& traj, const SystemSpec& spec, double t_lo, double t_hi,
                         int samples = 400);

// LHS of the reduced third-order inequality
//   D^a(b D^a(a D^a u)) + c f(u(tau(sigma(t))))
// evaluated along a trajectory.
std::vector<double> third_order_form(const Trajectory& traj, const SystemSpec& spec,
                                     std::span<const double> grid);

}  // namespace oscfrac::dde
