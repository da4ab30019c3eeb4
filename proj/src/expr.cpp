#include "oscfrac/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>
#include <sstream>

namespace oscfrac::expr {

namespace detail {

enum class Kind { Num, Var, Add, Sub, Mul, Div, Pow, Neg, Fun };
enum class Fn { Sin, Cos, Exp, Ln, Sqrt, Abs, Cbrt };

struct Node {
    Kind kind;
    double value = 0.0;  // Num
    int slot = -1;       // Var
    std::string name;    // Var (for rendering)
    Fn fn = Fn::Sin;
    std::shared_ptr<const Node> a, b;
};

using P = std::shared_ptr<const Node>;

static P num(double v) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Num;
    n->value = v;
    return n;
}

static P var(int slot, std::string name) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Var;
    n->slot = slot;
    n->name = std::move(name);
    return n;
}

static P binary(Kind k, P a, P b) {
    auto n = std::make_shared<Node>();
    n->kind = k;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

static P neg(P a) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Neg;
    n->a = std::move(a);
    return n;
}

static P fun(Fn f, P a) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Fun;
    n->fn = f;
    n->a = std::move(a);
    return n;
}

static bool is_num(const P& n, double v) { return n->kind == Kind::Num && n->value == v; }

static std::string render_node(const Node* n);

static std::string fn_name(Fn f) {
    switch (f) {
        case Fn::Sin: return "sin";
        case Fn::Cos: return "cos";
        case Fn::Exp: return "exp";
        case Fn::Ln: return "ln";
        case Fn::Sqrt: return "sqrt";
        case Fn::Abs: return "abs";
        case Fn::Cbrt: return "cbrt";
    }
    return "?";
}

static std::string render_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

static std::string render_node(const Node* n) {
    switch (n->kind) {
        case Kind::Num: {
            std::string s = render_num(n->value);
            if (n->value < 0) return "(" + s + ")";
            return s;
        }
        case Kind::Var: return n->name;
        case Kind::Add: return "(" + render_node(n->a.get()) + "+" + render_node(n->b.get()) + ")";
        case Kind::Sub: return "(" + render_node(n->a.get()) + "-" + render_node(n->b.get()) + ")";
        case Kind::Mul: return "(" + render_node(n->a.get()) + "*" + render_node(n->b.get()) + ")";
        case Kind::Div: return "(" + render_node(n->a.get()) + "/" + render_node(n->b.get()) + ")";
        case Kind::Pow: return "(" + render_node(n->a.get()) + "^" + render_node(n->b.get()) + ")";
        case Kind::Neg: return "(-" + render_node(n->a.get()) + ")";
        case Kind::Fun: return fn_name(n->fn) + "(" + render_node(n->a.get()) + ")";
    }
    return "?";
}

[[noreturn]] static void domain_error(const char* msg, const Node* n) {
    throw EvalError(msg, render_node(n));
}

static bool integral_exponent(double e) { return std::isfinite(e) && e == std::rint(e); }

static double eval_node(const Node* n, std::span<const double> v) {
    switch (n->kind) {
        case Kind::Num: return n->value;
        case Kind::Var:
            if (n->slot < 0 || static_cast<std::size_t>(n->slot) >= v.size())
                domain_error("unbound variable", n);
            return v[static_cast<std::size_t>(n->slot)];
        case Kind::Add: return eval_node(n->a.get(), v) + eval_node(n->b.get(), v);
        case Kind::Sub: return eval_node(n->a.get(), v) - eval_node(n->b.get(), v);
        case Kind::Mul: return eval_node(n->a.get(), v) * eval_node(n->b.get(), v);
        case Kind::Div: {
            double den = eval_node(n->b.get(), v);
            if (den == 0.0) domain_error("division by zero", n);
            return eval_node(n->a.get(), v) / den;
        }
        case Kind::Pow: {
            double base = eval_node(n->a.get(), v);
            double e = eval_node(n->b.get(), v);
            if (base < 0.0 && !integral_exponent(e))
                domain_error("fractional power of negative base", n);
            if (base == 0.0 && e < 0.0) domain_error("division by zero", n);
            return std::pow(base, e);
        }
        case Kind::Neg: return -eval_node(n->a.get(), v);
        case Kind::Fun: {
            double x = eval_node(n->a.get(), v);
            switch (n->fn) {
                case Fn::Sin: return std::sin(x);
                case Fn::Cos: return std::cos(x);
                case Fn::Exp: return std::exp(x);
                case Fn::Ln:
                    if (x <= 0.0) domain_error("ln of non-positive value", n);
                    return std::log(x);
                case Fn::Sqrt:
                    if (x < 0.0) domain_error("sqrt of negative value", n);
                    return std::sqrt(x);
                case Fn::Abs: return std::fabs(x);
                case Fn::Cbrt: return std::cbrt(x);
            }
        }
    }
    return 0.0;
}

static SigLog sl_add(SigLog a, SigLog b, const Node* ctx) {
    (void)ctx;
    if (a.sign == 0.0) return b;
    if (b.sign == 0.0) return a;
    const SigLog& hi = a.logmag >= b.logmag ? a : b;
    const SigLog& lo = a.logmag >= b.logmag ? b : a;
    if (a.sign == b.sign)
        return {a.sign, hi.logmag + std::log1p(std::exp(lo.logmag - hi.logmag))};
    if (a.logmag == b.logmag) return {};
    const double r = std::exp(lo.logmag - hi.logmag);  // < 1
    return {hi.sign, hi.logmag + std::log1p(-r)};
}

static SigLog eval_sl(const Node* n, std::span<const double> v) {
    switch (n->kind) {
        case Kind::Num: return SigLog::from(n->value);
        case Kind::Var:
            if (n->slot < 0 || static_cast<std::size_t>(n->slot) >= v.size())
                domain_error("unbound variable", n);
            return SigLog::from(v[static_cast<std::size_t>(n->slot)]);
        case Kind::Add: return sl_add(eval_sl(n->a.get(), v), eval_sl(n->b.get(), v), n);
        case Kind::Sub: {
            SigLog b = eval_sl(n->b.get(), v);
            b.sign = -b.sign;
            return sl_add(eval_sl(n->a.get(), v), b, n);
        }
        case Kind::Mul: return eval_sl(n->a.get(), v) * eval_sl(n->b.get(), v);
        case Kind::Div: {
            SigLog den = eval_sl(n->b.get(), v);
            if (den.sign == 0.0) domain_error("division by zero", n);
            return eval_sl(n->a.get(), v) / den;
        }
        case Kind::Pow: {
            SigLog base = eval_sl(n->a.get(), v);
            double e = eval_sl(n->b.get(), v).to_double();
            if (!std::isfinite(e)) domain_error("exponent out of double range", n);
            // integer exponents come back off by an ulp from the log
            // round trip; snap them so the parity rules below apply
            const double er = std::rint(e);
            if (er != e && std::fabs(e - er) <= 1e-12 * std::max(1.0, std::fabs(e))) e = er;
            if (base.sign < 0.0 && !integral_exponent(e))
                domain_error("fractional power of negative base", n);
            if (base.sign == 0.0) {
                if (e < 0.0) domain_error("division by zero", n);
                return e == 0.0 ? SigLog::from(1.0) : SigLog{};
            }
            double sign = 1.0;
            if (base.sign < 0.0 && std::fmod(e, 2.0) != 0.0) sign = -1.0;
            return {sign, e * base.logmag};
        }
        case Kind::Neg: {
            SigLog a = eval_sl(n->a.get(), v);
            a.sign = -a.sign;
            return a;
        }
        case Kind::Fun: {
            SigLog a = eval_sl(n->a.get(), v);
            switch (n->fn) {
                case Fn::Sin:
                case Fn::Cos: {
                    const double x = a.to_double();
                    if (!std::isfinite(x))
                        domain_error("trigonometric argument out of double range", n);
                    return SigLog::from(n->fn == Fn::Sin ? std::sin(x) : std::cos(x));
                }
                case Fn::Exp: {
                    const double x = a.to_double();
                    if (std::isnan(x) || x == std::numeric_limits<double>::infinity())
                        domain_error("exp argument out of double range", n);
                    return {1.0, x};
                }
                case Fn::Ln:
                    if (a.sign <= 0.0) domain_error("ln of non-positive value", n);
                    return SigLog::from(a.logmag);
                case Fn::Sqrt:
                    if (a.sign < 0.0) domain_error("sqrt of negative value", n);
                    return {a.sign, a.logmag / 2.0};
                case Fn::Abs: return {std::fabs(a.sign), a.logmag};
                case Fn::Cbrt: return {a.sign, a.logmag / 3.0};
            }
        }
    }
    return {};
}

// Derivative with trivial constant folding so diff(constant) renders as 0.
static P d(const P& n, int slot);

static P mul(P a, P b) {
    if (is_num(a, 0.0) || is_num(b, 0.0)) return num(0.0);
    if (is_num(a, 1.0)) return b;
    if (is_num(b, 1.0)) return a;
    return binary(Kind::Mul, std::move(a), std::move(b));
}

static P add(P a, P b) {
    if (is_num(a, 0.0)) return b;
    if (is_num(b, 0.0)) return a;
    return binary(Kind::Add, std::move(a), std::move(b));
}

static P sub(P a, P b) {
    if (is_num(b, 0.0)) return a;
    if (is_num(a, 0.0)) return neg(std::move(b));
    return binary(Kind::Sub, std::move(a), std::move(b));
}

static P divide(P a, P b) {
    if (is_num(a, 0.0)) return num(0.0);
    if (is_num(b, 1.0)) return a;
    return binary(Kind::Div, std::move(a), std::move(b));
}

static P d(const P& n, int slot) {
    switch (n->kind) {
        case Kind::Num: return num(0.0);
        case Kind::Var: return num(n->slot == slot ? 1.0 : 0.0);
        case Kind::Add: return add(d(n->a, slot), d(n->b, slot));
        case Kind::Sub: return sub(d(n->a, slot), d(n->b, slot));
        case Kind::Mul: return add(mul(d(n->a, slot), n->b), mul(n->a, d(n->b, slot)));
        case Kind::Div:
            // (a'b - ab') / b^2
            return divide(sub(mul(d(n->a, slot), n->b), mul(n->a, d(n->b, slot))),
                          binary(Kind::Pow, n->b, num(2.0)));
        case Kind::Pow: {
            if (n->b->kind == Kind::Num) {
                double e = n->b->value;
                if (e == 0.0) return num(0.0);
                // e * a^(e-1) * a'
                return mul(mul(num(e), binary(Kind::Pow, n->a, num(e - 1.0))), d(n->a, slot));
            }
            // a^b * (b' ln a + b a'/a)
            return mul(binary(Kind::Pow, n->a, n->b),
                       add(mul(d(n->b, slot), fun(Fn::Ln, n->a)),
                           mul(n->b, divide(d(n->a, slot), n->a))));
        }
        case Kind::Neg: return neg(d(n->a, slot));
        case Kind::Fun: {
            P inner = d(n->a, slot);
            switch (n->fn) {
                case Fn::Sin: return mul(fun(Fn::Cos, n->a), inner);
                case Fn::Cos: return neg(mul(fun(Fn::Sin, n->a), inner));
                case Fn::Exp: return mul(fun(Fn::Exp, n->a), inner);
                case Fn::Ln: return divide(inner, n->a);
                case Fn::Sqrt: return divide(inner, mul(num(2.0), fun(Fn::Sqrt, n->a)));
                case Fn::Abs:
                    // sign(a) * a'; evaluation fails at a = 0 via division by zero
                    return mul(divide(n->a, fun(Fn::Abs, n->a)), inner);
                case Fn::Cbrt:
                    return divide(inner,
                                  mul(num(3.0), binary(Kind::Pow, fun(Fn::Cbrt, n->a), num(2.0))));
            }
        }
    }
    return num(0.0);
}

// ---------------------------------------------------------------------------
// Recursive-descent parser. Grammar (conventional precedence):
//   expr    := term (('+'|'-') term)*
//   term    := unary (('*'|'/') unary)*
//   unary   := '-' unary | power
//   power   := atom ('^' unary)?            (right-associative)
//   atom    := number | ident | ident '(' expr ')' | '(' expr ')'

class Parser {
public:
    Parser(std::string_view text, const std::vector<std::string>& vars)
        : text_(text), vars_(vars) {}

    P parse() {
        skip_ws();
        if (pos_ >= text_.size()) throw ParseError("empty expression", 0);
        P e = parse_expr();
        skip_ws();
        if (pos_ < text_.size()) throw ParseError("unexpected trailing input", pos_);
        return e;
    }

private:
    std::string_view text_;
    const std::vector<std::string>& vars_;
    std::size_t pos_ = 0;

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    char peek() {
        skip_ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    P parse_expr() {
        P e = parse_term();
        for (;;) {
            if (accept('+'))
                e = binary(Kind::Add, e, parse_term());
            else if (accept('-'))
                e = binary(Kind::Sub, e, parse_term());
            else
                return e;
        }
    }

    P parse_term() {
        P e = parse_unary();
        for (;;) {
            if (accept('*'))
                e = binary(Kind::Mul, e, parse_unary());
            else if (accept('/'))
                e = binary(Kind::Div, e, parse_unary());
            else
                return e;
        }
    }

    P parse_unary() {
        if (accept('-')) return neg(parse_unary());
        return parse_power();
    }

    P parse_power() {
        P base = parse_atom();
        if (accept('^')) return binary(Kind::Pow, base, parse_unary());
        return base;
    }

    P parse_atom() {
        skip_ws();
        if (pos_ >= text_.size()) throw ParseError("unexpected end of expression", pos_);
        char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            P e = parse_expr();
            if (!accept(')')) throw ParseError("missing ')'", pos_);
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_ident();
        throw ParseError(std::string("unexpected character '") + c + "'", pos_);
    }

    P parse_number() {
        const char* begin = text_.data() + pos_;
        char* end = nullptr;
        double v = std::strtod(begin, &end);
        if (end == begin) throw ParseError("malformed number", pos_);
        pos_ += static_cast<std::size_t>(end - begin);
        return num(v);
    }

    P parse_ident() {
        std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            ++pos_;
        std::string name(text_.substr(start, pos_ - start));

        static const struct { const char* name; Fn fn; } fns[] = {
            {"sin", Fn::Sin}, {"cos", Fn::Cos}, {"exp", Fn::Exp},   {"ln", Fn::Ln},
            {"sqrt", Fn::Sqrt}, {"abs", Fn::Abs}, {"cbrt", Fn::Cbrt},
        };
        for (const auto& f : fns) {
            if (name == f.name) {
                if (!accept('(')) throw ParseError("expected '(' after function " + name, pos_);
                P arg = parse_expr();
                if (!accept(')')) throw ParseError("missing ')'", pos_);
                return fun(f.fn, arg);
            }
        }
        if (name == "pi") return num(std::numbers::pi);
        if (name == "e") return num(std::numbers::e);
        for (std::size_t i = 0; i < vars_.size(); ++i)
            if (vars_[i] == name) return var(static_cast<int>(i), name);

        std::string allowed;
        for (const auto& v : vars_) allowed += v + " ";
        allowed += "pi e sin cos exp ln sqrt abs cbrt";
        throw ParseError("unknown identifier '" + name + "'; allowed: " + allowed, start);
    }
};

}  // namespace detail

Expr Expr::parse(std::string_view text, std::vector<std::string> variables) {
    detail::Parser p(text, variables);
    Expr e;
    e.root_ = p.parse();
    e.vars_ = std::make_shared<std::vector<std::string>>(std::move(variables));
    return e;
}

Expr Expr::constant(double value) {
    Expr e;
    e.root_ = detail::num(value);
    e.vars_ = std::make_shared<std::vector<std::string>>();
    return e;
}

double Expr::eval(std::span<const double> values) const {
    if (!root_) throw EvalError("evaluating empty expression", "");
    return detail::eval_node(root_.get(), values);
}

double Expr::eval1(double x) const { return eval(std::span<const double>(&x, 1)); }

SigLog SigLog::from(double v) {
    if (v == 0.0) return {};
    return {v > 0.0 ? 1.0 : -1.0, std::log(std::fabs(v))};
}

double SigLog::to_double() const { return sign * std::exp(logmag); }

SigLog operator*(SigLog a, SigLog b) {
    if (a.sign == 0.0 || b.sign == 0.0) return {};
    return {a.sign * b.sign, a.logmag + b.logmag};
}

SigLog operator/(SigLog a, SigLog b) {
    if (a.sign == 0.0) return {};
    return {a.sign * b.sign, a.logmag - b.logmag};
}

SigLog SigLog::pow(double e) const {
    if (sign == 0.0) return e == 0.0 ? SigLog::from(1.0) : SigLog{};
    double s = 1.0;
    if (sign < 0.0 && std::fmod(e, 2.0) != 0.0) s = -1.0;
    return {s, e * logmag};
}

SigLog Expr::eval_siglog(std::span<const double> values) const {
    if (!root_) throw EvalError("evaluating empty expression", "");
    return detail::eval_sl(root_.get(), values);
}

SigLog Expr::eval1_siglog(double x) const {
    return eval_siglog(std::span<const double>(&x, 1));
}

Expr Expr::diff(const std::string& var) const {
    if (!root_) throw EvalError("differentiating empty expression", "");
    int slot = -1;
    for (std::size_t i = 0; i < vars_->size(); ++i)
        if ((*vars_)[i] == var) slot = static_cast<int>(i);
    Expr out;
    out.root_ = detail::d(root_, slot);
    out.vars_ = vars_;
    return out;
}

std::string Expr::render() const {
    if (!root_) return "";
    return detail::render_node(root_.get());
}

}  // namespace oscfrac::expr
