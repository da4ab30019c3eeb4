#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "oscfrac/expr.hpp"

using oscfrac::expr::EvalError;
using oscfrac::expr::Expr;
using oscfrac::expr::ParseError;
using oscfrac::expr::SigLog;

namespace {
Expr et(const std::string& text) { return Expr::parse(text, {"t"}); }
}  // namespace

TEST_CASE("arithmetic and precedence") {
    CHECK(et("1+2*3").eval1(0) == doctest::Approx(7.0));
    CHECK(et("(1+2)*3").eval1(0) == doctest::Approx(9.0));
    CHECK(et("2^3^2").eval1(0) == doctest::Approx(512.0));  // right associative
    CHECK(et("-t^2").eval1(3) == doctest::Approx(-9.0));
    CHECK(et("2*-3").eval1(0) == doctest::Approx(-6.0));
    CHECK(et("7/2/2").eval1(0) == doctest::Approx(1.75));
    CHECK(et("t-1-2").eval1(10) == doctest::Approx(7.0));
}

TEST_CASE("functions and constants") {
    CHECK(et("sin(pi/2)").eval1(0) == doctest::Approx(1.0));
    CHECK(et("cos(0)").eval1(0) == doctest::Approx(1.0));
    CHECK(et("exp(1)").eval1(0) == doctest::Approx(std::numbers::e));
    CHECK(et("ln(e)").eval1(0) == doctest::Approx(1.0));
    CHECK(et("sqrt(t)").eval1(16) == doctest::Approx(4.0));
    CHECK(et("cbrt(t)").eval1(-8) == doctest::Approx(-2.0));
    CHECK(et("abs(-3)").eval1(0) == doctest::Approx(3.0));
    CHECK(et("t^(2/3)").eval1(8) == doctest::Approx(4.0));
}

TEST_CASE("multiple variables by position") {
    auto e = Expr::parse("t*s+s", {"t", "s"});
    const double vals[] = {3.0, 4.0};
    CHECK(e.eval(vals) == doctest::Approx(16.0));
}

TEST_CASE("parse errors carry an offset and list allowed names") {
    CHECK_THROWS_AS(et("1+"), ParseError);
    CHECK_THROWS_AS(et("(1"), ParseError);
    try {
        et("bogus + 1");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("t") != std::string::npos);
    }
}

TEST_CASE("evaluation domain errors") {
    CHECK_THROWS_AS(et("ln(t)").eval1(-1.0), EvalError);
    CHECK_THROWS_AS(et("sqrt(t)").eval1(-1.0), EvalError);
    CHECK_THROWS_AS(et("1/t").eval1(0.0), EvalError);
    CHECK_THROWS_AS(et("t^0.5").eval1(-2.0), EvalError);
    CHECK(et("t^2").eval1(-2.0) == doctest::Approx(4.0));  // integral powers fine
}

TEST_CASE("symbolic derivative matches finite differences") {
    const char* cases[] = {"t^3+2*t",        "sin(t)*exp(t/4)", "ln(t)/t",
                           "sqrt(1+t^2)",    "cos(ln(t))",      "t^(2/3)*sin(t)",
                           "exp(-t)*cbrt(t)"};
    for (const char* text : cases) {
        CAPTURE(text);
        auto f = et(text);
        auto df = f.diff("t");
        for (double t : {0.7, 1.3, 2.9, 7.7}) {
            const double h = 1e-6 * t;
            const double fd = (f.eval1(t + h) - f.eval1(t - h)) / (2 * h);
            CHECK(df.eval1(t) == doctest::Approx(fd).epsilon(1e-6));
        }
    }
}

TEST_CASE("render output re-parses to the same values") {
    const char* cases[] = {"t^3+2*t", "sin(t)*exp(t/4)", "1/(1+t^2)", "-t/2"};
    for (const char* text : cases) {
        auto f = et(text);
        auto g = et(f.render());
        for (double t : {0.5, 1.0, 4.2}) CHECK(f.eval1(t) == doctest::Approx(g.eval1(t)));
    }
}

TEST_CASE("SigLog arithmetic") {
    auto a = SigLog::from(-6.0), b = SigLog::from(0.5);
    CHECK((a * b).to_double() == doctest::Approx(-3.0));
    CHECK((a / b).to_double() == doctest::Approx(-12.0));
    CHECK(SigLog::from(9.0).pow(0.5).to_double() == doctest::Approx(3.0));
    CHECK(SigLog::from(0.0).sign == 0.0);
    // a product of factors that individually overflow stays representable
    auto big = SigLog{1.0, 800.0} * SigLog{1.0, -799.0};
    CHECK(big.to_double() == doctest::Approx(std::exp(1.0)));
}

TEST_CASE("siglog evaluation survives overflowing factors") {
    auto e = et("exp(2*t)*exp(-2*t)*t");
    const double t = 500.0;  // exp(1000) overflows a double
    CHECK(e.eval1_siglog(t).to_double() == doctest::Approx(t));

    auto decay = et("1/(t^(7/2)*exp(2*t))");
    auto sl = decay.eval1_siglog(400.0);
    CHECK(sl.sign == 1.0);
    CHECK(sl.logmag == doctest::Approx(-3.5 * std::log(400.0) - 800.0));
}

TEST_CASE("siglog addition and subtraction") {
    auto e = et("exp(t) - exp(t)");
    CHECK(e.eval1_siglog(600.0).sign == 0.0);
    auto f = et("exp(t) + exp(t-1)");
    CHECK(f.eval1_siglog(600.0).logmag ==
          doctest::Approx(600.0 + std::log1p(std::exp(-1.0))));
    // siglog path agrees with plain eval in the normal range
    for (const char* text : {"sin(t)+t^2", "ln(t)/sqrt(t)", "cos(t)*exp(-t)+1"})
        CHECK(et(text).eval1_siglog(2.7).to_double() ==
              doctest::Approx(et(text).eval1(2.7)).epsilon(1e-12));
}
