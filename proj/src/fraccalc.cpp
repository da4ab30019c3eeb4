#include "oscfrac/fraccalc.hpp"

#include <cmath>
#include <random>

#include "oscfrac/quad.hpp"

namespace oscfrac::fraccalc {

ScalarFunction ScalarFunction::from_expr(const expr::Expr& e) {
    ScalarFunction s;
    s.f = [e](double t) { return e.eval1(t); };
    if (!e.variables().empty()) {
        expr::Expr de = e.diff(e.variables()[0]);
        s.df = [de](double t) { return de.eval1(t); };
    } else {
        s.df = [](double) { return 0.0; };
    }
    return s;
}

double ScalarFunction::deriv(double t) const {
    if (df) return df(t);
    const double h = std::max(1e-6, 1e-8 * std::fabs(t));
    return (f(t + h) - f(t - h)) / (2.0 * h);
}

double frac_deriv(const ScalarFunction& f, double t, Alpha alpha) {
    if (!(t > 0.0)) throw std::domain_error("frac_deriv requires t > 0");
    return std::pow(t, 1.0 - alpha.value) * f.deriv(t);
}

std::vector<double> default_eps_sequence() {
    std::vector<double> eps;
    double e = 1e-2;
    for (int i = 0; i < 8; ++i, e *= 0.5) eps.push_back(e);
    return eps;
}

double frac_deriv_limit(const ScalarFunction& f, double t, Alpha alpha,
                        std::span<const double> eps_sequence) {
    if (!(t > 0.0)) throw std::domain_error("frac_deriv_limit requires t > 0");
    if (eps_sequence.size() < 3)
        throw std::invalid_argument("eps_sequence needs at least 3 entries");
    const double ta = std::pow(t, -alpha.value);
    const double ft = f(t);

    // Neville extrapolation of the difference quotient to eps = 0.
    const std::size_t n = eps_sequence.size();
    std::vector<double> x(n), tab(n);
    double prev = 0.0, est = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double eps = eps_sequence[i];
        if (i > 0 && !(eps < eps_sequence[i - 1]))
            throw std::invalid_argument("eps_sequence must be strictly decreasing");
        x[i] = eps;
        tab[i] = (f(t * std::exp(eps * ta)) - ft) / eps;
        for (std::size_t j = i; j-- > 0;)
            tab[j] = (x[i] * tab[j] - x[j] * tab[j + 1]) / (x[i] - x[j]);
        prev = est;
        est = tab[0];
        if (i >= 2 && std::fabs(est - prev) > 1e-3 * (1.0 + std::fabs(est)) && i + 1 == n)
            throw NonConvergent("difference quotient extrapolation not Cauchy within 1e-3");
    }
    return est;
}

double frac_integral(const ScalarFunction& f, double a, double t, Alpha alpha) {
    if (!(a >= 0.0 && t >= a)) throw std::domain_error("frac_integral requires 0 <= a <= t");
    const double am1 = alpha.value - 1.0;
    return quad::integrate([&](double x) { return f(x) * std::pow(x, am1); }, a, t,
                           quad::QuadOptions{1e-10, 1e-8, 1u << 20});
}

namespace {

// Relative error with a unit floor so near-zero true values are judged
// on an absolute scale.
double rel_err(double a, double b) {
    const double scale = std::max({std::fabs(a), std::fabs(b), 1.0});
    return std::fabs(a - b) / scale;
}

struct Rng {
    std::mt19937 gen;
    double uniform(double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(gen);
    }
    int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(gen); }
};

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

// Random smooth function of t, safe on t in [0.5, 50].
std::string random_fn(Rng& rng) {
    const double c1 = rng.uniform(0.3, 2.0);
    const double c2 = rng.uniform(0.2, 1.5);
    switch (rng.pick(6)) {
        case 0: return fmt(c1) + "*t^" + fmt(1 + rng.pick(3)) + "+" + fmt(c2);
        case 1: return fmt(c1) + "*sin(" + fmt(c2) + "*t)+2.5";
        case 2: return "exp(" + fmt(c2 / 2.0) + "*t/25)*" + fmt(c1);
        case 3: return "sqrt(t+" + fmt(c1) + ")";
        case 4: return "ln(t+" + fmt(1.0 + c1) + ")";
        default: return fmt(c1) + "*cos(" + fmt(c2) + "*t)+3";
    }
}

// Random function bounded away from zero (quotient denominators).
std::string random_nonzero_fn(Rng& rng) {
    const double c = rng.uniform(0.3, 1.2);
    switch (rng.pick(3)) {
        case 0: return "(2.5+sin(" + fmt(c) + "*t))";
        case 1: return "(1.5+exp(-t/" + fmt(5.0 + 10.0 * c) + "))";
        default: return "(2+cos(" + fmt(c) + "*t))";
    }
}

// Inner function for the chain rule, with a bounded positive range so any
// outer template stays in-domain.
std::string random_inner_fn(Rng& rng) {
    const double c = rng.uniform(0.3, 1.0);
    switch (rng.pick(3)) {
        case 0: return "(2+sin(" + fmt(c) + "*t))";
        case 1: return "sqrt(t+" + fmt(c) + ")";
        default: return "ln(t+" + fmt(2.0 + c) + ")";
    }
}

struct OuterTemplate {
    const char* head;  // rendered as head(inner)
};

}  // namespace

double PropertyReport::max_rel_error() const {
    double m = 0.0;
    for (const auto& e : entries) m = std::max(m, e.max_rel_error);
    return m;
}

PropertyReport check_properties(Alpha alpha, std::span<const double> t_samples, int cases,
                                unsigned seed) {
    Rng rng{std::mt19937(seed)};
    PropertyReport report;
    report.entries = {{"p1 power rule", 0, ""},    {"p2 constants", 0, ""},
                      {"p3 product rule", 0, ""},  {"p4 quotient rule", 0, ""},
                      {"p5 chain rule", 0, ""},    {"p6 rescaling", 0, ""}};
    auto track = [&](int idx, double err, const std::string& what) {
        if (err > report.entries[idx].max_rel_error) {
            report.entries[idx].max_rel_error = err;
            report.entries[idx].worst_case = what;
        }
    };
    const std::vector<std::string> tvar = {"t"};
    const double a = alpha.value;

    for (int c = 0; c < cases; ++c) {
        const double t = t_samples[static_cast<std::size_t>(rng.pick(
            static_cast<int>(t_samples.size())))];

        // p1: D^alpha(t^n) = n t^(n-alpha), n real.
        {
            const double n = rng.uniform(-3.0, 3.0);
            auto f = ScalarFunction::from_expr(
                expr::Expr::parse("t^(" + fmt(n) + ")", tvar));
            track(0, rel_err(frac_deriv(f, t, alpha), n * std::pow(t, n - a)),
                  "t^" + fmt(n) + " at t=" + fmt(t));
        }
        // p2: D^alpha(C) = 0, exactly.
        {
            auto f = ScalarFunction::from_expr(expr::Expr::constant(rng.uniform(-9, 9)));
            const double v = frac_deriv(f, t, alpha);
            track(1, std::fabs(v), "constant at t=" + fmt(t));
        }
        const std::string fs = random_fn(rng);
        const std::string gs = random_fn(rng);
        auto fe = expr::Expr::parse(fs, tvar);
        auto ge = expr::Expr::parse(gs, tvar);
        auto F = ScalarFunction::from_expr(fe);
        auto G = ScalarFunction::from_expr(ge);
        // p3: D^alpha(fg) = f D^alpha(g) + g D^alpha(f).
        {
            auto prod = ScalarFunction::from_expr(
                expr::Expr::parse("(" + fs + ")*(" + gs + ")", tvar));
            const double lhs = frac_deriv(prod, t, alpha);
            const double rhs = F(t) * frac_deriv(G, t, alpha) + G(t) * frac_deriv(F, t, alpha);
            track(2, rel_err(lhs, rhs), fs + " * " + gs + " at t=" + fmt(t));
        }
        // p4: quotient rule against a denominator bounded away from zero.
        {
            const std::string ds = random_nonzero_fn(rng);
            auto de = expr::Expr::parse(ds, tvar);
            auto D = ScalarFunction::from_expr(de);
            auto quot = ScalarFunction::from_expr(
                expr::Expr::parse("(" + fs + ")/" + ds, tvar));
            const double lhs = frac_deriv(quot, t, alpha);
            const double dv = D(t);
            const double rhs =
                (dv * frac_deriv(F, t, alpha) - F(t) * frac_deriv(D, t, alpha)) / (dv * dv);
            track(3, rel_err(lhs, rhs), fs + " / " + ds + " at t=" + fmt(t));
        }
        // p5: D^alpha(f o g)(t) = f'(g(t)) D^alpha(g)(t).
        {
            static const OuterTemplate outers[] = {{"sin"}, {"cos"}, {"sqrt"}, {"ln"}, {"exp"}};
            const auto& outer = outers[rng.pick(5)];
            const std::string inner = random_inner_fn(rng);
            auto inner_e = expr::Expr::parse(inner, tvar);
            auto composed = ScalarFunction::from_expr(
                expr::Expr::parse(std::string(outer.head) + "(" + inner + ")", tvar));
            auto outer_e = expr::Expr::parse(std::string(outer.head) + "(x)",
                                             std::vector<std::string>{"x"});
            auto outer_d = outer_e.diff("x");
            const double gv = inner_e.eval1(t);
            const double lhs = frac_deriv(composed, t, alpha);
            const double rhs =
                outer_d.eval1(gv) * frac_deriv(ScalarFunction::from_expr(inner_e), t, alpha);
            track(4, rel_err(lhs, rhs),
                  std::string(outer.head) + "(" + inner + ") at t=" + fmt(t));
        }
        // p6: symbolic rescaling identity against a finite difference.
        {
            const double h = 1e-3 * std::max(1.0, t);
            const double d1 = (F(t + h) - F(t - h)) / (2.0 * h);
            const double d2 = (F(t + h / 2) - F(t - h / 2)) / h;
            const double fd = (4.0 * d2 - d1) / 3.0;
            const double lhs = frac_deriv(F, t, alpha);
            const double rhs = std::pow(t, 1.0 - a) * fd;
            track(5, rel_err(lhs, rhs), fs + " at t=" + fmt(t));
        }
    }
    return report;
}

}  // namespace oscfrac::fraccalc
