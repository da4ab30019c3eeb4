#include "oscfrac/dde.hpp"

#include <algorithm>
#include <cmath>

#include "oscfrac/parallel.hpp"

namespace oscfrac::dde {

namespace {
constexpr double kOverflowGuard = 1e300;

double checked_pow_pos(double base, double e, const char* what) {
    if (!(base > 0.0)) throw SolveError(std::string(what) + ": non-positive base for real power");
    return std::pow(base, e);
}
}  // namespace

void SystemSpec::validate(double t_hi, std::span<const double> u_grid) const {
    if (!(t0 > 0.0)) throw SpecError("t0 must be positive");
    if (!(t_hi >= t0)) throw SpecError("validation horizon below t0");
    if (!(k > 0 && l > 0 && l_prime > 0 && m_prime > 0))
        throw SpecError("constants k, l, l', m' must be positive");
    const int n = 200;
    double prev_sigma = -1e308, prev_tau = -1e308;
    for (int i = 0; i <= n; ++i) {
        const double t = t0 + (t_hi - t0) * i / n;
        if (!(p.eval1(t) > 0) || !(q.eval1(t) > 0) || !(r.eval1(t) > 0))
            throw SpecError("coefficients p, q, r must be positive (sampled at t=" +
                            std::to_string(t) + ")");
        const double s = sigma.eval1(t), tv = tau.eval1(t);
        const double slack = 1e-9 * std::max(1.0, std::fabs(t));
        if (s > t + slack || tv > t + slack)
            throw SpecError("delays must satisfy sigma(t) <= t and tau(t) <= t (violated at t=" +
                            std::to_string(t) + ")");
        if (s < prev_sigma - slack || tv < prev_tau - slack)
            throw SpecError("delays must be nondecreasing");
        prev_sigma = s;
        prev_tau = tv;
    }
    for (double u : u_grid) {
        if (u == 0.0) continue;
        if (f.eval1(u) / u < k * (1.0 - 1e-9))
            throw SpecError("f(u)/u >= k violated at u=" + std::to_string(u));
    }
}

double DerivedCoeffs::a(double t) const { return 1.0 / spec->p.eval1(t); }
double DerivedCoeffs::b(double t) const { return 1.0 / spec->q.eval1(t); }
double DerivedCoeffs::c(double t) const {
    return spec->l * spec->l * spec->l_prime * spec->m_prime * spec->r.eval1(t);
}
double DerivedCoeffs::tau_sigma(double t) const {
    return spec->tau.eval1(spec->sigma.eval1(t));
}
double DerivedCoeffs::A_alpha(double t) const {
    const double ts = tau_sigma(t);
    return 0.5 * spec->k * (c(t) / a(t)) * ((ts - spec->T) / t) *
           checked_pow_pos(ts, spec->alpha.value, "A_alpha");
}

std::array<double, 3> History::eval(double t) const {
    return {u0.eval1(t), v0.eval1(t), w0.eval1(t)};
}

double Trajectory::to_x(double t) const { return scale_ == TimeScale::Log ? std::log(t) : t; }

double Trajectory::t_end() const {
    return scale_ == TimeScale::Log ? std::exp(x_.back()) : x_.back();
}

std::size_t Trajectory::segment(double x) const {
    auto it = std::upper_bound(x_.begin(), x_.end(), x);
    std::size_t i = static_cast<std::size_t>(it - x_.begin());
    if (i == 0) return 0;
    if (i >= x_.size()) return x_.size() - 2;
    return i - 1;
}

std::array<double, 3> Trajectory::hermite(std::size_t seg, double x, bool deriv) const {
    const double x0 = x_[seg], x1 = x_[seg + 1];
    const double hseg = x1 - x0;
    const double s = (x - x0) / hseg;
    std::array<double, 3> out{};
    for (int c = 0; c < 3; ++c) {
        const double y0 = y_[seg][c], y1 = y_[seg + 1][c];
        const double m0 = dydx_[seg][c] * hseg, m1 = dydx_[seg + 1][c] * hseg;
        if (!deriv) {
            const double s2 = s * s, s3 = s2 * s;
            out[c] = (2 * s3 - 3 * s2 + 1) * y0 + (s3 - 2 * s2 + s) * m0 +
                     (-2 * s3 + 3 * s2) * y1 + (s3 - s2) * m1;
        } else {
            const double s2 = s * s;
            out[c] = ((6 * s2 - 6 * s) * y0 + (3 * s2 - 4 * s + 1) * m0 +
                      (-6 * s2 + 6 * s) * y1 + (3 * s2 - 2 * s) * m1) /
                     hseg;
        }
    }
    return out;
}

std::array<double, 3> Trajectory::eval(double t) const {
    if (t <= t0_) {
        if (t < hist_.T1 - 1e-9 * std::max(1.0, std::fabs(hist_.T1)))
            throw SolveError("evaluation below history start T1");
        return hist_.eval(t);
    }
    const double x = to_x(t);
    if (x > x_.back() + 1e-9 * std::max(1.0, std::fabs(x_.back())))
        throw SolveError("evaluation beyond trajectory end");
    return hermite(segment(x), std::min(x, x_.back()), false);
}

double Trajectory::eval_comp(int comp, double t) const { return eval(t)[static_cast<std::size_t>(comp)]; }

double Trajectory::deriv_comp(int comp, double t) const {
    if (t <= t0_) {
        const History& h = hist_;
        const expr::Expr& e = comp == 0 ? h.u0 : comp == 1 ? h.v0 : h.w0;
        return e.diff(e.variables().empty() ? "t" : e.variables()[0]).eval1(t);
    }
    const double x = to_x(t);
    const double dydx = hermite(segment(x), std::min(x, x_.back()), true)[static_cast<std::size_t>(comp)];
    return scale_ == TimeScale::Log ? dydx / t : dydx;
}

namespace {

// Builder state for the method of steps: the completed mesh plus one
// provisional segment being iterated on.
struct Builder {
    const SystemSpec* spec;
    const History* hist;
    TimeScale scale;
    double t0;
    std::vector<double> x;
    std::vector<std::array<double, 3>> y, dydx;
    // provisional segment [x.back(), px]
    bool has_prov = false;
    double px = 0;
    std::array<double, 3> py{}, pdy{};
    mutable bool used_prov = false;
    long clamp_hits = 0;

    double t_of(double x_) const { return scale == TimeScale::Log ? std::exp(x_) : x_; }

    std::array<double, 3> interp(std::size_t i0, double x0, const std::array<double, 3>& y0,
                                 const std::array<double, 3>& d0, double x1,
                                 const std::array<double, 3>& y1, const std::array<double, 3>& d1,
                                 double xq) const {
        const double h = x1 - x0;
        const double s = (xq - x0) / h;
        const double s2 = s * s, s3 = s2 * s;
        std::array<double, 3> out{};
        for (int c = 0; c < 3; ++c) {
            out[c] = (2 * s3 - 3 * s2 + 1) * y0[c] + (s3 - 2 * s2 + s) * d0[c] * h +
                     (-2 * s3 + 3 * s2) * y1[c] + (s3 - s2) * d1[c] * h;
        }
        (void)i0;
        return out;
    }

    // State lookup at (possibly delayed) time t during construction.
    std::array<double, 3> lookup(double t) const {
        if (t <= t0) {
            if (t < hist->T1 - 1e-9 * std::max(1.0, std::fabs(hist->T1)))
                throw SolveError("delayed argument " + std::to_string(t) +
                                 " below history start T1=" + std::to_string(hist->T1));
            return hist->eval(t);
        }
        const double xq = scale == TimeScale::Log ? std::log(t) : t;
        if (xq <= x.back()) {
            auto it = std::upper_bound(x.begin(), x.end(), xq);
            std::size_t i = static_cast<std::size_t>(it - x.begin());
            if (i == 0) i = 1;
            if (i >= x.size()) i = x.size() - 1;
            return interp(i - 1, x[i - 1], y[i - 1], dydx[i - 1], x[i], y[i], dydx[i], xq);
        }
        if (!has_prov) throw SolveError("delayed argument ahead of trajectory");
        used_prov = true;
        // inside (or extrapolated just past) the provisional segment
        return interp(0, x.back(), y.back(), dydx.back(), px, py, pdy, xq);
    }

    // dy/dx at coordinate x_ with current-state stage vector ys.
    std::array<double, 3> rhs(double x_, const std::array<double, 3>& ys) {
        const double t = t_of(x_);
        const double am1 = spec->alpha.value - 1.0;
        const double ta = std::pow(t, am1);
        const double st = spec->sigma.eval1(t);
        const double tt = spec->tau.eval1(t);
        const double v_del = lookup(st)[1];
        double u_del = lookup(tt)[0];
        if (spec->f_arg_clamp) {
            const auto [lo, hi] = *spec->f_arg_clamp;
            if (u_del < lo || u_del > hi) {
                u_del = std::clamp(u_del, lo, hi);
                ++clamp_hits;
            }
        }
        std::array<double, 3> d{};
        d[0] = ta * spec->p.eval1(t) * spec->g.eval1(v_del);
        d[1] = -ta * spec->q.eval1(t) * spec->h.eval1(ys[2]);
        d[2] = ta * spec->r.eval1(t) * spec->f.eval1(u_del);
        if (scale == TimeScale::Log)
            for (auto& v : d) v *= t;
        return d;
    }
};

}  // namespace

Trajectory solve(const SystemSpec& spec, const History& hist, double t_end, double dt,
                 TimeScale scale) {
    if (!(spec.t0 > 0)) throw SolveError("t0 must be positive");
    if (!(t_end >= spec.t0)) throw SolveError("t_end must be >= t0");
    if (!(dt > 0)) throw SolveError("dt must be positive");

    Builder b;
    b.spec = &spec;
    b.hist = &hist;
    b.scale = scale;
    b.t0 = spec.t0;

    const double x0 = scale == TimeScale::Log ? std::log(spec.t0) : spec.t0;
    const double x_end = scale == TimeScale::Log ? std::log(t_end) : t_end;
    b.x.push_back(x0);
    b.y.push_back(hist.eval(spec.t0));
    b.dydx.push_back(b.rhs(x0, b.y[0]));

    bool truncated = false;
    double xc = x0;
    while (xc < x_end - 1e-12 * std::max(1.0, std::fabs(x_end)) && !truncated) {
        const double h = std::min(dt, x_end - xc);
        const std::array<double, 3>& yn = b.y.back();
        const std::array<double, 3> k1 = b.dydx.back();

        // provisional Euler endpoint for delayed lookups inside this step
        b.px = xc + h;
        for (int c = 0; c < 3; ++c) b.py[c] = yn[c] + h * k1[c];
        b.pdy = k1;
        b.has_prov = true;

        std::array<double, 3> ynew{}, fnew{};
        for (int sweep = 0; sweep < 5; ++sweep) {
            b.used_prov = false;
            std::array<double, 3> ys{};
            for (int c = 0; c < 3; ++c) ys[c] = yn[c] + 0.5 * h * k1[c];
            const auto k2 = b.rhs(xc + 0.5 * h, ys);
            for (int c = 0; c < 3; ++c) ys[c] = yn[c] + 0.5 * h * k2[c];
            const auto k3 = b.rhs(xc + 0.5 * h, ys);
            for (int c = 0; c < 3; ++c) ys[c] = yn[c] + h * k3[c];
            const auto k4 = b.rhs(xc + h, ys);
            double delta = 0;
            for (int c = 0; c < 3; ++c) {
                ynew[c] = yn[c] + h / 6.0 * (k1[c] + 2 * k2[c] + 2 * k3[c] + k4[c]);
                delta = std::max(delta, std::fabs(ynew[c] - b.py[c]) / (1.0 + std::fabs(ynew[c])));
            }
            const bool hit_prov = b.used_prov;
            fnew = b.rhs(xc + h, ynew);
            b.py = ynew;
            b.pdy = fnew;
            if (!hit_prov || delta <= 1e-12) break;
        }
        b.has_prov = false;
        for (int c = 0; c < 3; ++c) {
            if (!std::isfinite(ynew[c])) throw SolveError("non-finite state during integration");
            if (std::fabs(ynew[c]) > kOverflowGuard) truncated = true;
        }
        xc += h;
        b.x.push_back(xc);
        b.y.push_back(ynew);
        b.dydx.push_back(fnew);
    }

    Trajectory traj;
    traj.scale_ = scale;
    traj.t0_ = spec.t0;
    traj.x_ = std::move(b.x);
    traj.y_ = std::move(b.y);
    traj.dydx_ = std::move(b.dydx);
    traj.hist_ = hist;
    traj.truncated_ = truncated;
    traj.clamp_hits_ = b.clamp_hits;
    if (traj.x_.size() == 1) {
        // t_end == t0: single-node trajectory; duplicate the node so
        // segment interpolation stays well-defined.
        traj.x_.push_back(traj.x_[0] + 1e-300);
        traj.y_.push_back(traj.y_[0]);
        traj.dydx_.push_back(traj.dydx_[0]);
    }
    return traj;
}

std::array<double, 3> residual(const SystemSpec& spec, const std::array<expr::Expr, 3>& candidate,
                               std::span<const double> grid) {
    const double am1 = spec.alpha.value - 1.0;
    std::array<expr::Expr, 3> dcand;
    for (int i = 0; i < 3; ++i) {
        const auto& vars = candidate[static_cast<std::size_t>(i)].variables();
        dcand[static_cast<std::size_t>(i)] =
            candidate[static_cast<std::size_t>(i)].diff(vars.empty() ? "t" : vars[0]);
    }
    std::vector<double> ts(grid.begin(), grid.end());
    std::array<double, 3> out{0, 0, 0};
    if (ts.empty()) return out;
    for (int eq = 0; eq < 3; ++eq) {
        auto res = par::map(ts, [&, eq](double t) {
            const double frac = std::pow(t, -am1) * dcand[static_cast<std::size_t>(eq)].eval1(t);
            double rhs = 0;
            switch (eq) {
                case 0: rhs = spec.p.eval1(t) * spec.g.eval1(candidate[1].eval1(spec.sigma.eval1(t))); break;
                case 1: rhs = -spec.q.eval1(t) * spec.h.eval1(candidate[2].eval1(t)); break;
                case 2: rhs = spec.r.eval1(t) * spec.f.eval1(candidate[0].eval1(spec.tau.eval1(t))); break;
            }
            return std::fabs(frac - rhs);
        });
        out[static_cast<std::size_t>(eq)] = *std::max_element(res.begin(), res.end());
    }
    return out;
}

OscillationClass classify(const Trajectory& traj, double t_lo, double t_hi, int min_crossings,
                          int samples) {
    if (!(t_lo < t_hi)) throw SolveError("classification window is empty");
    OscillationClass out;
    out.low_density = samples < 1000;
    const bool logscale = traj.scale() == TimeScale::Log;
    auto coord = [&](double t) { return logscale ? std::log(t) : t; };
    auto tcoord = [&](double x) { return logscale ? std::exp(x) : x; };
    const double x_lo = coord(t_lo), x_hi = coord(t_hi);

    std::vector<double> xs(static_cast<std::size_t>(samples) + 1);
    for (std::size_t i = 0; i < xs.size(); ++i)
        xs[i] = x_lo + (x_hi - x_lo) * static_cast<double>(i) / samples;

    for (int c = 0; c < 3; ++c) {
        auto vals = par::map(xs, [&](double x) { return traj.eval_comp(c, tcoord(x)); });
        auto& crossings = out.crossings[static_cast<std::size_t>(c)];
        for (std::size_t i = 0; i + 1 < vals.size(); ++i) {
            if (vals[i] == 0.0 || vals[i] * vals[i + 1] >= 0.0) continue;
            // bisection refinement on the dense output
            double a = xs[i], bx = xs[i + 1];
            double fa = vals[i];
            while (bx - a > 1e-10 * std::max(1.0, std::fabs(tcoord(bx)))) {
                const double m = 0.5 * (a + bx);
                const double fm = traj.eval_comp(c, tcoord(m));
                if (fm == 0.0) {
                    a = bx = m;
                    break;
                }
                if (fa * fm < 0)
                    bx = m;
                else {
                    a = m;
                    fa = fm;
                }
            }
            crossings.push_back(tcoord(0.5 * (a + bx)));
        }
        ComponentVerdict v;
        const int n_cross = static_cast<int>(crossings.size());
        if (n_cross == 0) {
            v = vals.back() >= 0 ? ComponentVerdict::NonOscPositive : ComponentVerdict::NonOscNegative;
        } else if (n_cross >= min_crossings &&
                   x_hi - coord(crossings.back()) <= 0.5 * (x_hi - x_lo)) {
            v = ComponentVerdict::Oscillatory;
        } else {
            v = ComponentVerdict::Undetermined;
        }
        out.component[static_cast<std::size_t>(c)] = v;
    }
    const auto& comp = out.component;
    if (comp[0] == ComponentVerdict::Oscillatory && comp[1] == ComponentVerdict::Oscillatory &&
        comp[2] == ComponentVerdict::Oscillatory)
        out.system = ComponentVerdict::Oscillatory;
    else if (std::any_of(comp.begin(), comp.end(), [](ComponentVerdict v) {
                 return v == ComponentVerdict::NonOscPositive || v == ComponentVerdict::NonOscNegative;
             }))
        out.system = comp[0] == ComponentVerdict::NonOscNegative ? ComponentVerdict::NonOscNegative
                                                                 : ComponentVerdict::NonOscPositive;
    else
        out.system = ComponentVerdict::Undetermined;
    return out;
}

CaseReport classify_case(const Trajectory& traj, const SystemSpec& spec, double t_lo, double t_hi,
                         int samples) {
    DerivedCoeffs coeff(spec);
    const double oma = 1.0 - spec.alpha.value;
    const bool logscale = traj.scale() == TimeScale::Log;
    auto coord = [&](double t) { return logscale ? std::log(t) : t; };
    auto tcoord = [&](double x) { return logscale ? std::exp(x) : x; };
    const double x_lo = coord(t_lo), x_hi = coord(t_hi);

    auto Dau = [&](double t) { return std::pow(t, oma) * traj.deriv_comp(0, t); };
    auto phi = [&](double t) { return coeff.a(t) * Dau(t); };

    // scale estimate for the sign dead-band
    double max_d = 0, max_p = 0;
    std::vector<double> signs_d(static_cast<std::size_t>(samples) + 1),
        signs_p(static_cast<std::size_t>(samples) + 1);
    std::vector<double> ts(static_cast<std::size_t>(samples) + 1);
    for (std::size_t i = 0; i < ts.size(); ++i)
        ts[i] = tcoord(x_lo + (x_hi - x_lo) * static_cast<double>(i) / samples);

    for (std::size_t i = 0; i < ts.size(); ++i) {
        const double t = ts[i];
        if (!(traj.eval_comp(0, t) > 0))
            throw SolveError("classify_case requires u > 0 on the window (violated at t=" +
                             std::to_string(t) + ")");
        const double d = Dau(t);
        const double ht = 1e-3 * t;
        const double dphi = (phi(t + ht) - phi(t - ht)) / (2 * ht);
        const double Dphi = std::pow(t, oma) * dphi;
        signs_d[i] = d;
        signs_p[i] = Dphi;
        max_d = std::max(max_d, std::fabs(d));
        max_p = std::max(max_p, std::fabs(Dphi));
    }
    const double band_d = 1e-8 * std::max(1e-300, max_d);
    const double band_p = 1e-8 * std::max(1e-300, max_p);

    bool case1 = true, case2 = true;
    double first_violation = 0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const bool d_pos = signs_d[i] > -band_d;
        const bool d_neg = signs_d[i] < band_d;
        const bool p_pos = signs_p[i] > -band_p;
        const bool ok1 = d_pos && p_pos;
        const bool ok2 = d_neg && p_pos;
        if ((case1 && !ok1) || (case2 && !ok2)) {
            if ((case1 && !ok1 && case2 && !ok2) || (case1 != case2)) {
                if (!((case1 && ok1) || (case2 && ok2)) && first_violation == 0)
                    first_violation = ts[i];
            }
        }
        case1 = case1 && ok1;
        case2 = case2 && ok2;
        if (!case1 && !case2 && first_violation == 0) first_violation = ts[i];
    }
    if (case1) return {CaseClass::CaseI, 0};
    if (case2) return {CaseClass::CaseII, 0};
    return {CaseClass::Mixed, first_violation};
}

std::vector<double> third_order_form(const Trajectory& traj, const SystemSpec& spec,
                                     std::span<const double> grid) {
    DerivedCoeffs coeff(spec);
    const double a = spec.alpha.value;
    const auto& gvars = spec.g.variables();
    expr::Expr gprime = spec.g.diff(gvars.empty() ? "v" : gvars[0]);
    const auto& svars = spec.sigma.variables();
    expr::Expr sigprime = spec.sigma.diff(svars.empty() ? "t" : svars[0]);
    const auto& hvvars = traj.history().v0.variables();
    expr::Expr v0prime = traj.history().v0.diff(hvvars.empty() ? "t" : hvvars[0]);

    // v'(s): from the v-equation above t0, from the history below.
    auto vprime = [&](double s) {
        if (s >= traj.t_start())
            return -std::pow(s, a - 1.0) * spec.q.eval1(s) * spec.h.eval1(traj.eval_comp(2, s));
        return v0prime.eval1(s);
    };
    // Q(t) = b(t) D^a(a D^a u)(t), using a D^a u = g(v(sigma(t))) along
    // the trajectory.
    auto Q = [&](double t) {
        const double st = spec.sigma.eval1(t);
        return coeff.b(t) * std::pow(t, 1.0 - a) * gprime.eval1(traj.eval_comp(1, st)) *
               vprime(st) * sigprime.eval1(t);
    };

    std::vector<double> ts(grid.begin(), grid.end());
    return par::map(ts, [&](double t) {
        const double ht = 1e-4 * t;
        const double dQ = (Q(t + ht) - Q(t - ht)) / (2 * ht);
        const double DalphaQ = std::pow(t, 1.0 - a) * dQ;
        double u_del = traj.eval_comp(0, coeff.tau_sigma(t));
        if (spec.f_arg_clamp)
            u_del = std::clamp(u_del, spec.f_arg_clamp->first, spec.f_arg_clamp->second);
        return DalphaQ + coeff.c(t) * spec.f.eval1(u_del);
    });
}

}  // namespace oscfrac::dde
