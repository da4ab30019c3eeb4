#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "oscfrac/dde.hpp"
#include "oscfrac/expr.hpp"
#include "oscfrac/quad.hpp"

namespace oscfrac::criteria {

struct KernelError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Averaging kernel H(t,s) with weight rho(s) for the integral-averaging
// criteria. Requirements: H(t,t) = 0, H(t,s) > 0 for t > s >= t0,
// dH/ds <= 0, rho > 0.
struct KernelSpec {
    expr::Expr H;         // variables (t, s)
    expr::Expr rho;       // variable s
    expr::Expr dHds;      // symbolic dH/ds
    expr::Expr rho_prime; // symbolic rho'

    static KernelSpec make(const expr::Expr& H, const expr::Expr& rho);
    // Presets: "quadratic" -> (t-s)^2, "linear" -> t-s,
    // "logratio2" -> ln(t/s)^2.
    static KernelSpec preset(const std::string& name, const expr::Expr& rho);

    // Sampled validation of the kernel requirements over t0 < s < t <= t_hi.
    // Throws KernelError on violation.
    void validate(double t0, double t_hi) const;

    double h(double t, double s) const;  // dH/ds + H * rho'/rho
};

enum class Verdict { Satisfied, NotSatisfied, Inconclusive };

std::string to_string(Verdict v);
std::string to_string(quad::Growth g);

// Verdict on one oscillation criterion together with the numeric
// evidence behind it.
struct CriterionReport {
    std::string id;
    Verdict verdict = Verdict::Inconclusive;
    std::string conclusion;
    std::vector<std::pair<std::string, quad::DivergenceVerdict>> probes;
    std::vector<std::pair<std::string, quad::TailConstant>> tails;
    std::vector<std::string> notes;
};

// Divergence of int s^(alpha-1)/b and int s^(alpha-1)/a plus the sampled
// side condition b(t) t^(1-alpha) < 1.
CriterionReport check_coefficient_integrals(const dde::SystemSpec& spec,
                                            std::vector<double> horizons = {},
                                            const quad::ProbeOptions& opts = {});

// Weighted-integral divergence criterion: both
//   int c(s)(s-T) tau(sigma(s)) ds  and
//   int (s^(a-1) rho A_alpha - (1/4)(rho'^2/rho) s^(1-a) b) ds
// must diverge; then every solution oscillates.
CriterionReport check_weighted_divergence(const dde::SystemSpec& spec, const expr::Expr& rho,
                                          double T, std::vector<double> horizons = {},
                                          const quad::ProbeOptions& opts = {});

// Kernel-averaged criterion with the singular 1/H(t,s) term. The
// integral is cut off at s = t - delta and refined over shrinking delta;
// non-Cauchy refinement yields Inconclusive.
CriterionReport check_kernel_averaging_singular(const dde::SystemSpec& spec,
                                                const KernelSpec& kernel, double T,
                                                const std::vector<double>& t_grid);

// Kernel-averaged criterion without the singular term (kernel multiplies
// both pieces of the integrand).
CriterionReport check_kernel_averaging(const dde::SystemSpec& spec, const KernelSpec& kernel,
                                       double T, const std::vector<double>& t_grid);

// Riccati-quotient diagnostics along a trajectory:
//   W = b D^a(a D^a u) / (a D^a u),
// d = liminf tW, D = limsup tW, tail constants A*, B* built from the
// weight A_alpha, and the induced inequalities.
struct RiccatiSeries {
    std::vector<double> t;
    std::vector<double> W;
    std::vector<double> tW;
    long masked = 0;  // grid points dropped for |denominator| < 1e-12
    quad::TailConstant d, D;
    double A_star = 0.0;
    double B_star = 0.0;
    bool A_star_divergent = false;
    bool B_star_divergent = false;
    bool ineq_first = false;       // A* <= d - t^(a-1) d^2 / b(t), largest window t
    bool ineq_second = false;      // B* <= D - D^2
    bool d_in_unit = false;        // 0 < d < 1
    bool D_in_unit = false;        // 0 < D < 1
    bool D_bound = false;          // D <= 1 - B*
    std::vector<std::string> notes;
};

// Shared analysis path over precomputed W samples (also used to inject
// synthetic series in tests).
RiccatiSeries analyze_riccati(const dde::SystemSpec& spec, const std::vector<double>& t_grid,
                              const std::vector<double>& W_values, double tol = 1e-3);

RiccatiSeries riccati_diagnostics(const dde::Trajectory& traj, const dde::SystemSpec& spec,
                                  double t_lo, double t_hi, int samples = 400);

// Triple-nested decay condition
//   int eta^(a-1)/a(eta) ( int_eta int_mu s^(a-1) c(s) ds dmu ) deta = inf;
// when satisfied, bounded-decreasing positive solutions decay to zero.
CriterionReport check_nested_decay(const dde::SystemSpec& spec, std::vector<double> horizons = {},
                                   const quad::ProbeOptions& opts = {});

enum class AverageVariant { Delay, State };

// Time-averaged liminf criterion: the running average of
//   k s^(a+1) (c/a) (X(s)-T)/s * X(s)^a
// must exceed 1/2, where X = tau(sigma(s)) (Delay) or u(tau(sigma(s)))
// along a trajectory (State).
CriterionReport check_averaged_liminf(const dde::SystemSpec& spec, const dde::Trajectory* traj,
                                      double T, const std::vector<double>& t_grid,
                                      AverageVariant variant);

}  // namespace oscfrac::criteria
