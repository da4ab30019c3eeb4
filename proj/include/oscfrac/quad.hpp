#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace oscfrac::quad {

using Fn1 = std::function<double(double)>;

struct QuadError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct QuadOptions {
    double abs_tol = 1e-10;
    double rel_tol = 1e-8;
    std::size_t max_panels = 1u << 20;
};

// Globally adaptive Gauss-Kronrod (G7,K15) quadrature. Splits the panel
// with the largest error estimate until the total estimate meets
// max(abs_tol, rel_tol*|result|). Throws QuadError on non-convergence.
double integrate(const Fn1& f, double a, double b, const QuadOptions& opts = {});

enum class Growth { Diverges, Converges, Inconclusive };

// Verdict on an improper integral over [a, inf), decided from partial
// integrals at geometric horizons plus growth fitting.
struct DivergenceVerdict {
    Growth cls = Growth::Inconclusive;
    std::vector<std::pair<double, double>> partials;  // (horizon, partial value)
    double beta = 0.0;          // fitted exponent of partial ~ c * T^beta
    bool log_growth = false;    // divergence detected via log-type growth
    double limit = 0.0;         // extrapolated limit when Converges
    std::string note;
};

struct ProbeOptions {
    double beta_min = 0.05;
    double cauchy_rel = 1e-4;
    int max_extensions = 6;     // extend horizons x10 while inconclusive
    QuadOptions quad{1e-9, 1e-6, 1u << 20};
};

DivergenceVerdict probe_improper(const Fn1& f, double a, std::vector<double> horizons,
                                 const ProbeOptions& opts = {});

enum class TailKind { LimInf, LimSup };

// liminf/limsup estimate of F(t) as t -> inf from samples on a grid
// spanning several decades: running tail extremum plus extrapolation
// in 1/t.
struct TailConstant {
    TailKind kind = TailKind::LimInf;
    std::vector<std::pair<double, double>> window_estimates;  // (t, running extremum over [t, t_max])
    double value = 0.0;
    bool low_confidence = false;  // target oscillates or extrapolation unstable
    bool diverging = false;       // running extremum grows without settling
};

TailConstant tail_constant(const Fn1& F, TailKind kind, const std::vector<double>& t_grid);
TailConstant tail_constant_from_samples(TailKind kind, const std::vector<double>& t_grid,
                                        const std::vector<double>& values);

}  // namespace oscfrac::quad
