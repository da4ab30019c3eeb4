#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "oscfrac/quad.hpp"

using namespace oscfrac::quad;

TEST_CASE("definite integrals against closed forms") {
    CHECK(integrate([](double s) { return std::sin(s); }, 0, std::numbers::pi) ==
          doctest::Approx(2.0).epsilon(1e-12));
    CHECK(integrate([](double s) { return 1.0 / s; }, 1, 2) ==
          doctest::Approx(std::numbers::ln2).epsilon(1e-12));
    CHECK(integrate([](double s) { return std::exp(-s); }, 0, 40) ==
          doctest::Approx(1.0).epsilon(1e-10));
    // oscillatory integrand needing subdivision
    CHECK(integrate([](double s) { return std::sin(50 * s); }, 0, std::numbers::pi) ==
          doctest::Approx((1.0 - std::cos(50 * std::numbers::pi)) / 50).epsilon(1e-9));
}

TEST_CASE("integrable endpoint singularity") {
    CHECK(integrate([](double s) { return 1.0 / std::sqrt(s); }, 1e-12, 1.0) ==
          doctest::Approx(2.0).epsilon(1e-5));
}

TEST_CASE("panel budget exhaustion throws") {
    QuadOptions opts;
    opts.abs_tol = 1e-300;
    opts.rel_tol = 1e-300;
    opts.max_panels = 4;
    CHECK_THROWS_AS(integrate([](double s) { return std::sin(50 * s); }, 0, 10, opts),
                    QuadError);
}

TEST_CASE("divergence probe calibration catalog") {
    const std::vector<double> horizons = {1e2, 1e3, 1e4, 1e5};
    struct Case {
        const char* name;
        Fn1 f;
        Growth expect;
    };
    const Case catalog[] = {
        {"s^-0.5", [](double s) { return std::pow(s, -0.5); }, Growth::Diverges},
        {"s^-1", [](double s) { return 1.0 / s; }, Growth::Diverges},
        {"s^-1.5", [](double s) { return std::pow(s, -1.5); }, Growth::Converges},
        {"s^-2", [](double s) { return std::pow(s, -2.0); }, Growth::Converges},
        {"1/(s ln s)", [](double s) { return 1.0 / (s * std::log(s)); }, Growth::Diverges},
        {"exp(-s)", [](double s) { return std::exp(-s); }, Growth::Converges},
        {"ln(s)/s", [](double s) { return std::log(s) / s; }, Growth::Diverges},
        {"s^-1 again", [](double s) { return 1.0 / s; }, Growth::Diverges},
    };
    for (const auto& c : catalog) {
        CAPTURE(c.name);
        auto v = probe_improper(c.f, 2.0, horizons);
        CHECK(v.cls == c.expect);
    }
}

TEST_CASE("converging probe extrapolates the limit") {
    auto v = probe_improper([](double s) { return std::pow(s, -2.0); }, 2.0,
                            {1e2, 1e3, 1e4, 1e5});
    REQUIRE(v.cls == Growth::Converges);
    CHECK(v.limit == doctest::Approx(0.5).epsilon(1e-4));
    CHECK(v.partials.size() >= 4);
    for (std::size_t i = 1; i < v.partials.size(); ++i)
        CHECK(v.partials[i].first > v.partials[i - 1].first);
}

TEST_CASE("power-law divergence reports the fitted exponent") {
    auto v = probe_improper([](double s) { return std::pow(s, -0.5); }, 2.0,
                            {1e2, 1e3, 1e4, 1e5});
    REQUIRE(v.cls == Growth::Diverges);
    CHECK(v.beta == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("log divergence flagged as log growth") {
    auto v = probe_improper([](double s) { return 1.0 / (s * std::log(s)); }, 2.0,
                            {1e2, 1e3, 1e4, 1e5});
    REQUIRE(v.cls == Growth::Diverges);
    CHECK(v.log_growth);
}

TEST_CASE("tail constant from a 1/t approach") {
    std::vector<double> grid;
    for (int i = 0; i <= 60; ++i) grid.push_back(10.0 * std::pow(10.0, i / 20.0));
    // targets approach the limit from the side their extremum tracks
    auto tc = tail_constant([](double t) { return 3.0 - 5.0 / t; }, TailKind::LimInf, grid);
    CHECK(tc.value == doctest::Approx(3.0).epsilon(1e-6));
    CHECK_FALSE(tc.diverging);

    auto ts = tail_constant([](double t) { return 3.0 + 5.0 / t; }, TailKind::LimSup, grid);
    CHECK(ts.value == doctest::Approx(3.0).epsilon(1e-6));
}

TEST_CASE("tail constant flags unbounded growth") {
    std::vector<double> grid;
    for (int i = 0; i <= 60; ++i) grid.push_back(10.0 * std::pow(10.0, i / 20.0));
    auto tc = tail_constant([](double t) { return std::log(t); }, TailKind::LimSup, grid);
    CHECK(tc.diverging);
    auto ti = tail_constant([](double t) { return std::log(t); }, TailKind::LimInf, grid);
    CHECK(ti.diverging);
    // decay toward -infinity is not "diverging" in the sense callers use
    auto td = tail_constant([](double t) { return -std::log(t); }, TailKind::LimInf, grid);
    CHECK_FALSE(td.diverging);
}

TEST_CASE("tail constant of a slowly oscillating target is low confidence") {
    std::vector<double> grid;
    for (int i = 0; i <= 60; ++i) grid.push_back(10.0 * std::pow(10.0, i / 20.0));
    auto tc =
        tail_constant([](double t) { return std::sin(std::log(t)); }, TailKind::LimInf, grid);
    CHECK(tc.low_confidence);
}

TEST_CASE("tail constant from precomputed samples matches the callable path") {
    std::vector<double> grid, vals;
    for (int i = 0; i <= 60; ++i) {
        grid.push_back(10.0 * std::pow(10.0, i / 20.0));
        vals.push_back(3.0 + 5.0 / grid.back());
    }
    auto a = tail_constant([](double t) { return 3.0 + 5.0 / t; }, TailKind::LimInf, grid);
    auto b = tail_constant_from_samples(TailKind::LimInf, grid, vals);
    CHECK(a.value == doctest::Approx(b.value));
}
