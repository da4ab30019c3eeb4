#pragma once

#include <limits>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace oscfrac::expr {

// Syntax error carrying the byte offset into the source text.
struct ParseError : std::runtime_error {
    ParseError(const std::string& msg, std::size_t offset)
        : std::runtime_error(msg + " (at byte " + std::to_string(offset) + ")"), offset(offset) {}
    std::size_t offset;
};

// Evaluation-time domain error (ln of non-positive, sqrt of negative,
// division by zero, fractional power of a negative base).
struct EvalError : std::runtime_error {
    EvalError(const std::string& msg, std::string subexpr)
        : std::runtime_error(msg + " in subexpression: " + subexpr), subexpr(std::move(subexpr)) {}
    std::string subexpr;
};

namespace detail {
struct Node;
}

// Value in sign/log-magnitude form: sign * exp(logmag), sign in
// {-1, 0, +1}. Keeps products representable when individual factors
// overflow or underflow a double (e.g. exp(2t) * exp(-2t) weights).
struct SigLog {
    double sign = 0.0;
    double logmag = -std::numeric_limits<double>::infinity();

    static SigLog from(double v);
    double to_double() const;  // may overflow to inf / underflow to 0

    friend SigLog operator*(SigLog a, SigLog b);
    friend SigLog operator/(SigLog a, SigLog b);
    SigLog pow(double e) const;  // requires nonnegative value for fractional e
};

// Immutable parsed scalar expression over a declared variable set.
// Safe for concurrent evaluation once constructed.
class Expr {
public:
    Expr() = default;

    // Parses `text` against the declared variable names. Any identifier
    // that is neither a declared variable, a function name, nor one of
    // the constants pi/e is rejected with the allowed names listed.
    static Expr parse(std::string_view text, std::vector<std::string> variables);

    static Expr constant(double value);

    // Variable values by position in the declared variable list.
    double eval(std::span<const double> values) const;
    // Single-variable convenience.
    double eval1(double x) const;

    // Evaluation carried out in sign/log-magnitude arithmetic throughout
    // the tree; same domain errors as eval.
    SigLog eval_siglog(std::span<const double> values) const;
    SigLog eval1_siglog(double x) const;

    // Exact symbolic derivative with respect to the named variable.
    // No simplification beyond constant folding of trivial zeros/ones.
    Expr diff(const std::string& var) const;

    std::string render() const;

    const std::vector<std::string>& variables() const { return *vars_; }
    bool empty() const { return !root_; }

private:
    std::shared_ptr<const detail::Node> root_;
    std::shared_ptr<const std::vector<std::string>> vars_;
};

}  // namespace oscfrac::expr
