#pragma once

#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "oscfrac/expr.hpp"

namespace oscfrac::fraccalc {

// Order of differentiation, restricted to (0, 1].
struct Alpha {
    explicit Alpha(double v) : value(v) {
        if (!(v > 0.0 && v <= 1.0)) throw std::invalid_argument("alpha must lie in (0, 1]");
    }
    double value;
};

// Evaluable real function of one real variable. When a symbolic
// derivative is available (Expr-backed functions) it is carried along;
// otherwise derivatives fall back to a t-scaled central difference.
struct ScalarFunction {
    std::function<double(double)> f;
    std::function<double(double)> df;  // may be empty

    static ScalarFunction from_expr(const expr::Expr& e);

    double operator()(double t) const { return f(t); }
    double deriv(double t) const;
};

struct NonConvergent : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// D^alpha f(t) = t^(1-alpha) f'(t)  (rescaling identity; exact for
// differentiable f). The production derivative path.
double frac_deriv(const ScalarFunction& f, double t, Alpha alpha);

// Independent cross-check through the limit definition: Richardson
// extrapolation of (f(t e^(eps t^-alpha)) - f(t)) / eps over eps_sequence.
// Throws NonConvergent when successive estimates are not Cauchy within 1e-3.
double frac_deriv_limit(const ScalarFunction& f, double t, Alpha alpha,
                        std::span<const double> eps_sequence);

std::vector<double> default_eps_sequence();

// I^alpha_a f(t) = integral_a^t f(x) x^(alpha-1) dx.
double frac_integral(const ScalarFunction& f, double a, double t, Alpha alpha);

// Numeric verification of the algebraic properties of the derivative
// on randomized expression pairs: power rule, constants, product,
// quotient, chain, rescaling.
struct PropertyReport {
    struct Entry {
        std::string property;
        double max_rel_error = 0.0;
        std::string worst_case;
    };
    std::vector<Entry> entries;
    double max_rel_error() const;
};

PropertyReport check_properties(Alpha alpha, std::span<const double> t_samples,
                                int cases = 200, unsigned seed = 20240817);

}  // namespace oscfrac::fraccalc
