#pragma once

// Expression language for nonlinearities g(z1..zN), initial data u0(x1..xd)
// and analytic kernels K(x1..xd).
//
// Grammar:
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := ('-')? atom ('^' integer)?
//   atom   := number | ident | ident '(' expr ')' | '(' expr ')'
//
// '^' binds tighter than unary minus, so -x1^2 is -(x1^2). Builders fold
// constants and drop additive/multiplicative identities; nothing else is
// rewritten, so the canonical printed form parses back to the same tree.

#include "qie/error.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace qie {

enum class Op { Const, Var, Neg, Add, Sub, Mul, Div, Pow, Sin, Cos, Tanh, Exp, Sqrt };

enum class VariableFamily { Z, X };

inline constexpr int max_arity = 16;

class Expr {
public:
    static Expr constant(double c) { return Expr(std::make_shared<const Node>(Node{Op::Const, c, 0, {}, {}})); }
    /// Zero-based variable index.
    static Expr variable(int index) { return Expr(std::make_shared<const Node>(Node{Op::Var, 0.0, index, {}, {}})); }

    Op op() const noexcept { return node_->op; }
    double value() const noexcept { return node_->value; }
    int var_index() const noexcept { return node_->index; }
    int exponent() const noexcept { return node_->index; }
    Expr lhs() const noexcept { return Expr(node_->a); }
    Expr rhs() const noexcept { return Expr(node_->b); }
    Expr operand() const noexcept { return Expr(node_->a); }

    bool is_const() const noexcept { return op() == Op::Const; }
    bool is_const(double c) const noexcept { return op() == Op::Const && value() == c; }

    // Raw node construction, no folding. Builders below should be preferred.
    static Expr make(Op op, Expr a, Expr b = {}, int index = 0) {
        return Expr(std::make_shared<const Node>(Node{op, 0.0, index, std::move(a.node_), std::move(b.node_)}));
    }

    Expr() = default;
    explicit operator bool() const noexcept { return static_cast<bool>(node_); }

private:
    struct Node {
        Op op;
        double value;
        int index;
        std::shared_ptr<const Node> a;
        std::shared_ptr<const Node> b;
    };

    explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

    std::shared_ptr<const Node> node_;
};

// ---------------------------------------------------------------------------
// Builders

namespace detail {
inline std::optional<Expr> folded(double v) {
    if (std::isfinite(v)) return Expr::constant(v);
    return std::nullopt;
}
} // namespace detail

inline Expr operator-(const Expr& a) {
    if (a.is_const())
        if (auto f = detail::folded(-a.value())) return *f;
    if (a.op() == Op::Neg) return a.operand();
    return Expr::make(Op::Neg, a);
}

inline Expr operator+(const Expr& a, const Expr& b) {
    if (a.is_const() && b.is_const())
        if (auto f = detail::folded(a.value() + b.value())) return *f;
    if (a.is_const(0.0)) return b;
    if (b.is_const(0.0)) return a;
    return Expr::make(Op::Add, a, b);
}

inline Expr operator-(const Expr& a, const Expr& b) {
    if (a.is_const() && b.is_const())
        if (auto f = detail::folded(a.value() - b.value())) return *f;
    if (b.is_const(0.0)) return a;
    if (a.is_const(0.0)) return -b;
    return Expr::make(Op::Sub, a, b);
}

inline Expr operator*(const Expr& a, const Expr& b) {
    if (a.is_const() && b.is_const())
        if (auto f = detail::folded(a.value() * b.value())) return *f;
    if (a.is_const(0.0) || b.is_const(0.0)) return Expr::constant(0.0);
    if (a.is_const(1.0)) return b;
    if (b.is_const(1.0)) return a;
    return Expr::make(Op::Mul, a, b);
}

inline Expr operator/(const Expr& a, const Expr& b) {
    if (a.is_const() && b.is_const() && b.value() != 0.0)
        if (auto f = detail::folded(a.value() / b.value())) return *f;
    if (b.is_const(1.0)) return a;
    return Expr::make(Op::Div, a, b);
}

inline Expr pow(const Expr& a, int k) {
    if (k == 0) return Expr::constant(1.0);
    if (k == 1) return a;
    if (a.is_const())
        if (auto f = detail::folded(std::pow(a.value(), k))) return *f;
    return Expr::make(Op::Pow, a, {}, k);
}

inline double apply_function(Op f, double x) {
    switch (f) {
    case Op::Sin: return std::sin(x);
    case Op::Cos: return std::cos(x);
    case Op::Tanh: return std::tanh(x);
    case Op::Exp: return std::exp(x);
    case Op::Sqrt: return std::sqrt(x);
    default: throw ConfigError("apply_function: not a function op");
    }
}

inline Expr call(Op f, const Expr& a) {
    if (a.is_const() && !(f == Op::Sqrt && a.value() < 0))
        if (auto c = detail::folded(apply_function(f, a.value()))) return *c;
    return Expr::make(f, a);
}

inline Expr sin(const Expr& a) { return call(Op::Sin, a); }
inline Expr cos(const Expr& a) { return call(Op::Cos, a); }
inline Expr tanh(const Expr& a) { return call(Op::Tanh, a); }
inline Expr exp(const Expr& a) { return call(Op::Exp, a); }
inline Expr sqrt(const Expr& a) { return call(Op::Sqrt, a); }

inline bool is_function(Op op) noexcept {
    return op == Op::Sin || op == Op::Cos || op == Op::Tanh || op == Op::Exp || op == Op::Sqrt;
}

inline const char* function_name(Op op) {
    switch (op) {
    case Op::Sin: return "sin";
    case Op::Cos: return "cos";
    case Op::Tanh: return "tanh";
    case Op::Exp: return "exp";
    case Op::Sqrt: return "sqrt";
    default: return "?";
    }
}

// ---------------------------------------------------------------------------
// Structure

inline bool structurally_equal(const Expr& a, const Expr& b) {
    if (a.op() != b.op()) return false;
    switch (a.op()) {
    case Op::Const: return a.value() == b.value();
    case Op::Var: return a.var_index() == b.var_index();
    case Op::Pow: return a.exponent() == b.exponent() && structurally_equal(a.lhs(), b.lhs());
    case Op::Neg:
    case Op::Sin:
    case Op::Cos:
    case Op::Tanh:
    case Op::Exp:
    case Op::Sqrt: return structurally_equal(a.operand(), b.operand());
    default: return structurally_equal(a.lhs(), b.lhs()) && structurally_equal(a.rhs(), b.rhs());
    }
}

/// Largest zero-based variable index referenced, or -1 for a constant expression.
inline int max_variable_index(const Expr& e) {
    switch (e.op()) {
    case Op::Const: return -1;
    case Op::Var: return e.var_index();
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
    case Op::Div: return std::max(max_variable_index(e.lhs()), max_variable_index(e.rhs()));
    default: return max_variable_index(e.operand());
    }
}

// ---------------------------------------------------------------------------
// Printing

namespace detail {
inline std::string format_number(double v) {
    std::array<char, 64> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), end);
}
} // namespace detail

/// Canonical, fully parenthesised form. Variables print as z<i+1> or x<i+1>.
inline std::string to_string(const Expr& e, VariableFamily family = VariableFamily::Z) {
    const char v = family == VariableFamily::Z ? 'z' : 'x';
    switch (e.op()) {
    case Op::Const:
        if (std::signbit(e.value())) return "(-" + detail::format_number(-e.value()) + ")";
        return detail::format_number(e.value());
    case Op::Var: return std::string(1, v) + std::to_string(e.var_index() + 1);
    case Op::Neg: return "(-" + to_string(e.operand(), family) + ")";
    case Op::Add: return "(" + to_string(e.lhs(), family) + "+" + to_string(e.rhs(), family) + ")";
    case Op::Sub: return "(" + to_string(e.lhs(), family) + "-" + to_string(e.rhs(), family) + ")";
    case Op::Mul: return "(" + to_string(e.lhs(), family) + "*" + to_string(e.rhs(), family) + ")";
    case Op::Div: return "(" + to_string(e.lhs(), family) + "/" + to_string(e.rhs(), family) + ")";
    case Op::Pow: return "(" + to_string(e.lhs(), family) + "^" + std::to_string(e.exponent()) + ")";
    default: return std::string(function_name(e.op())) + "(" + to_string(e.operand(), family) + ")";
    }
}

// ---------------------------------------------------------------------------
// Parsing

namespace detail {

class Parser {
public:
    Parser(std::string_view text, int arity, VariableFamily family) : s_(text), arity_(arity), family_(family) {}

    Expr parse() {
        Expr e = expr();
        skip_ws();
        if (pos_ != s_.size()) fail("unexpected trailing input");
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& msg, ParseError::Kind kind = ParseError::Kind::Syntax) const {
        throw ParseError(kind, pos_, msg);
    }

    void skip_ws() {
        while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t' || s_[pos_] == '\n' || s_[pos_] == '\r'))
            ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) fail(std::string("expected '") + c + "'");
    }

    Expr expr() {
        Expr e = term();
        for (;;) {
            if (accept('+')) e = e + term();
            else if (accept('-')) e = e - term();
            else return e;
        }
    }

    Expr term() {
        Expr e = factor();
        for (;;) {
            if (accept('*')) e = e * factor();
            else if (accept('/')) e = e / factor();
            else return e;
        }
    }

    Expr factor() {
        bool negate = accept('-');
        Expr e = atom();
        if (accept('^')) {
            skip_ws();
            std::size_t start = pos_;
            while (pos_ < s_.size() && s_[pos_] >= '0' && s_[pos_] <= '9') ++pos_;
            if (start == pos_) fail("expected integer exponent");
            int k = 0;
            auto [p, ec] = std::from_chars(s_.data() + start, s_.data() + pos_, k);
            if (ec != std::errc{}) {
                pos_ = start;
                fail("exponent out of range");
            }
            e = pow(e, k);
        }
        return negate ? -e : e;
    }

    static bool is_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }
    static bool is_digit(char c) { return c >= '0' && c <= '9'; }

    Expr atom() {
        skip_ws();
        if (pos_ >= s_.size()) fail("unexpected end of input");
        char c = s_[pos_];
        if (c == '(') {
            ++pos_;
            Expr e = expr();
            expect(')');
            return e;
        }
        if (is_digit(c) || c == '.') return number();
        if (is_alpha(c)) return identifier();
        fail(std::string("unexpected character '") + c + "'");
    }

    Expr number() {
        std::size_t start = pos_;
        while (pos_ < s_.size() && is_digit(s_[pos_])) ++pos_;
        if (pos_ < s_.size() && s_[pos_] == '.') {
            ++pos_;
            while (pos_ < s_.size() && is_digit(s_[pos_])) ++pos_;
        }
        if (pos_ - start == 1 && s_[start] == '.') {
            pos_ = start;
            fail("malformed number");
        }
        if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
            std::size_t mark = pos_++;
            if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) ++pos_;
            std::size_t digits = pos_;
            while (pos_ < s_.size() && is_digit(s_[pos_])) ++pos_;
            if (digits == pos_) {
                pos_ = mark;
                fail("malformed exponent");
            }
        }
        double v = 0;
        auto [p, ec] = std::from_chars(s_.data() + start, s_.data() + pos_, v);
        if (ec != std::errc{} || !std::isfinite(v)) {
            pos_ = start;
            fail("number out of range");
        }
        return Expr::constant(v);
    }

    Expr identifier() {
        std::size_t start = pos_;
        while (pos_ < s_.size() && (is_alpha(s_[pos_]) || is_digit(s_[pos_]))) ++pos_;
        std::string_view name = s_.substr(start, pos_ - start);

        static constexpr std::pair<std::string_view, Op> functions[] = {
            {"sin", Op::Sin}, {"cos", Op::Cos}, {"tanh", Op::Tanh}, {"exp", Op::Exp}, {"sqrt", Op::Sqrt}};
        for (auto [fname, op] : functions) {
            if (name == fname) {
                expect('(');
                Expr arg = expr();
                expect(')');
                return call(op, arg);
            }
        }

        const char want = family_ == VariableFamily::Z ? 'z' : 'x';
        const int family_max = family_ == VariableFamily::Z ? 16 : 3;
        if (name.size() >= 2 && (name[0] == 'z' || name[0] == 'x')) {
            bool digits = true;
            for (char d : name.substr(1)) digits = digits && is_digit(d);
            if (digits && name[1] != '0' && name.size() <= 3) {
                int idx = std::stoi(std::string(name.substr(1)));
                const int family_limit = name[0] == 'z' ? 16 : 3;
                if (idx <= family_limit) {
                    if (name[0] != want) {
                        pos_ = start;
                        fail("unknown identifier '" + std::string(name) + "' (wrong variable family)",
                             ParseError::Kind::UnknownIdentifier);
                    }
                    if (idx > arity_ || idx > family_max) {
                        pos_ = start;
                        fail("variable '" + std::string(name) + "' exceeds arity " + std::to_string(arity_),
                             ParseError::Kind::IndexOutOfRange);
                    }
                    return Expr::variable(idx - 1);
                }
                if (name[0] == want) {
                    pos_ = start;
                    fail("variable '" + std::string(name) + "' exceeds arity " + std::to_string(arity_),
                         ParseError::Kind::IndexOutOfRange);
                }
            }
        }
        pos_ = start;
        fail("unknown identifier '" + std::string(name) + "'", ParseError::Kind::UnknownIdentifier);
    }

    std::string_view s_;
    std::size_t pos_ = 0;
    int arity_;
    VariableFamily family_;
};

} // namespace detail

inline Expr parse(std::string_view text, int arity, VariableFamily family) {
    if (arity < 1 || arity > max_arity) throw ConfigError("parse: arity must be in [1, 16]");
    return detail::Parser(text, arity, family).parse();
}

// ---------------------------------------------------------------------------
// Evaluation

inline double evaluate(const Expr& e, std::span<const double> point) {
    auto checked = [](double v, const char* what) {
        if (!std::isfinite(v)) throw DomainError(std::string("evaluate: non-finite result in ") + what);
        return v;
    };
    switch (e.op()) {
    case Op::Const: return e.value();
    case Op::Var:
        if (static_cast<std::size_t>(e.var_index()) >= point.size())
            throw ConfigError("evaluate: point has fewer coordinates than the expression uses");
        return point[static_cast<std::size_t>(e.var_index())];
    case Op::Neg: return -evaluate(e.operand(), point);
    case Op::Add: return checked(evaluate(e.lhs(), point) + evaluate(e.rhs(), point), "+");
    case Op::Sub: return checked(evaluate(e.lhs(), point) - evaluate(e.rhs(), point), "-");
    case Op::Mul: return checked(evaluate(e.lhs(), point) * evaluate(e.rhs(), point), "*");
    case Op::Div: {
        double num = evaluate(e.lhs(), point);
        double den = evaluate(e.rhs(), point);
        if (den == 0.0) throw DomainError("evaluate: division by zero");
        return checked(num / den, "/");
    }
    case Op::Pow: return checked(std::pow(evaluate(e.lhs(), point), e.exponent()), "^");
    case Op::Sqrt: {
        double a = evaluate(e.operand(), point);
        if (a < 0) throw DomainError("evaluate: sqrt of negative value");
        return std::sqrt(a);
    }
    default: return checked(apply_function(e.op(), evaluate(e.operand(), point)), function_name(e.op()));
    }
}

inline double evaluate(const Expr& e, std::initializer_list<double> point) {
    return evaluate(e, std::span<const double>(point.begin(), point.size()));
}

// ---------------------------------------------------------------------------
// Differentiation

/// Exact derivative with respect to the zero-based variable `var`.
inline Expr differentiate(const Expr& e, int var) {
    switch (e.op()) {
    case Op::Const: return Expr::constant(0.0);
    case Op::Var: return Expr::constant(e.var_index() == var ? 1.0 : 0.0);
    case Op::Neg: return -differentiate(e.operand(), var);
    case Op::Add: return differentiate(e.lhs(), var) + differentiate(e.rhs(), var);
    case Op::Sub: return differentiate(e.lhs(), var) - differentiate(e.rhs(), var);
    case Op::Mul:
        return differentiate(e.lhs(), var) * e.rhs() + e.lhs() * differentiate(e.rhs(), var);
    case Op::Div: {
        const Expr& a = e.lhs();
        const Expr& b = e.rhs();
        return (differentiate(a, var) * b - a * differentiate(b, var)) / pow(b, 2);
    }
    case Op::Pow: {
        int k = e.exponent();
        return Expr::constant(k) * pow(e.lhs(), k - 1) * differentiate(e.lhs(), var);
    }
    case Op::Sin: return cos(e.operand()) * differentiate(e.operand(), var);
    case Op::Cos: return -sin(e.operand()) * differentiate(e.operand(), var);
    case Op::Tanh: return (Expr::constant(1.0) - pow(tanh(e.operand()), 2)) * differentiate(e.operand(), var);
    case Op::Exp: return exp(e.operand()) * differentiate(e.operand(), var);
    case Op::Sqrt: return differentiate(e.operand(), var) / (Expr::constant(2.0) * sqrt(e.operand()));
    }
    throw ConfigError("differentiate: unknown op");
}

/// Sum of pure second derivatives in x1..xd.
inline Expr laplacian_symbolic(const Expr& e, int d) {
    Expr out = Expr::constant(0.0);
    for (int i = 0; i < d; ++i) out = out + differentiate(differentiate(e, i), i);
    return out;
}

// ---------------------------------------------------------------------------
// Polynomials

/// Sparse multivariate polynomial: exponent vector -> coefficient.
class Polynomial {
public:
    using Monomial = std::vector<int>;

    explicit Polynomial(int nvars) : nvars_(nvars) {}

    static Polynomial constant(int nvars, double c) {
        Polynomial p(nvars);
        if (c != 0.0) p.terms_[Monomial(static_cast<std::size_t>(nvars), 0)] = c;
        return p;
    }
    static Polynomial variable(int nvars, int index) {
        Polynomial p(nvars);
        Monomial m(static_cast<std::size_t>(nvars), 0);
        m[static_cast<std::size_t>(index)] = 1;
        p.terms_[m] = 1.0;
        return p;
    }

    const std::map<Monomial, double>& terms() const noexcept { return terms_; }

    std::optional<double> as_constant() const {
        if (terms_.empty()) return 0.0;
        if (terms_.size() == 1 && degree() == 0) return terms_.begin()->second;
        return std::nullopt;
    }

    int degree() const {
        int deg = 0;
        for (const auto& [m, c] : terms_) {
            int s = 0;
            for (int k : m) s += k;
            deg = std::max(deg, s);
        }
        return deg;
    }

    Polynomial& operator+=(const Polynomial& o) {
        for (const auto& [m, c] : o.terms_) add_term(m, c);
        return *this;
    }
    Polynomial scaled(double a) const {
        Polynomial p(nvars_);
        for (const auto& [m, c] : terms_) p.add_term(m, a * c);
        return p;
    }
    friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
    friend Polynomial operator-(const Polynomial& a, const Polynomial& b) { return a + b.scaled(-1.0); }
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
        Polynomial p(a.nvars_);
        for (const auto& [ma, ca] : a.terms_)
            for (const auto& [mb, cb] : b.terms_) {
                Monomial m(ma);
                for (std::size_t i = 0; i < m.size(); ++i) m[i] += mb[i];
                p.add_term(m, ca * cb);
            }
        return p;
    }
    Polynomial power(int k) const {
        Polynomial p = constant(nvars_, 1.0);
        for (int i = 0; i < k; ++i) p = p * *this;
        return p;
    }

    /// Upper bound for sup |p| over the ball |z| <= r: sum |c_beta| r^|beta|.
    double sup_bound_on_ball(double r) const {
        double s = 0;
        for (const auto& [m, c] : terms_) {
            int deg = 0;
            for (int k : m) deg += k;
            s += std::abs(c) * std::pow(r, deg);
        }
        return s;
    }

private:
    void add_term(const Monomial& m, double c) {
        double& slot = terms_[m];
        slot += c;
        if (slot == 0.0) terms_.erase(m);
    }

    int nvars_;
    std::map<Monomial, double> terms_;
};

/// Expanded polynomial form, or nullopt when the tree uses a transcendental
/// function or divides by a non-constant.
inline std::optional<Polynomial> to_polynomial(const Expr& e, int nvars) {
    auto bin = [&](auto&& f) -> std::optional<Polynomial> {
        auto a = to_polynomial(e.lhs(), nvars);
        if (!a) return std::nullopt;
        auto b = to_polynomial(e.rhs(), nvars);
        if (!b) return std::nullopt;
        return f(*a, *b);
    };
    switch (e.op()) {
    case Op::Const: return Polynomial::constant(nvars, e.value());
    case Op::Var:
        if (e.var_index() >= nvars) return std::nullopt;
        return Polynomial::variable(nvars, e.var_index());
    case Op::Neg: {
        auto a = to_polynomial(e.operand(), nvars);
        if (!a) return std::nullopt;
        return a->scaled(-1.0);
    }
    case Op::Add: return bin([](const Polynomial& a, const Polynomial& b) { return a + b; });
    case Op::Sub: return bin([](const Polynomial& a, const Polynomial& b) { return a - b; });
    case Op::Mul: return bin([](const Polynomial& a, const Polynomial& b) { return a * b; });
    case Op::Div: {
        auto a = to_polynomial(e.lhs(), nvars);
        auto b = to_polynomial(e.rhs(), nvars);
        if (!a || !b) return std::nullopt;
        auto c = b->as_constant();
        if (!c || *c == 0.0) return std::nullopt;
        return a->scaled(1.0 / *c);
    }
    case Op::Pow: {
        auto a = to_polynomial(e.lhs(), nvars);
        if (!a) return std::nullopt;
        return a->power(e.exponent());
    }
    default: return std::nullopt;
    }
}

inline bool is_polynomial(const Expr& e, int nvars) { return to_polynomial(e, nvars).has_value(); }

// ---------------------------------------------------------------------------
// Nonlinearity g: R^N -> R^N

class NonlinearitySpec {
public:
    explicit NonlinearitySpec(std::vector<Expr> components) : components_(std::move(components)) {
        if (components_.empty() || components_.size() > static_cast<std::size_t>(max_arity))
            throw ConfigError("nonlinearity: component count must be in [1, 16]");
        const int n = arity();
        for (const auto& g : components_) {
            if (max_variable_index(g) >= n) throw ConfigError("nonlinearity: variable index exceeds N");
            std::vector<Expr> row;
            row.reserve(components_.size());
            for (int j = 0; j < n; ++j) row.push_back(differentiate(g, j));
            gradient_.push_back(std::move(row));
        }
    }

    static NonlinearitySpec parse(const std::vector<std::string>& texts) {
        std::vector<Expr> c;
        const int n = static_cast<int>(texts.size());
        for (const auto& t : texts) c.push_back(qie::parse(t, n, VariableFamily::Z));
        return NonlinearitySpec(std::move(c));
    }

    int arity() const noexcept { return static_cast<int>(components_.size()); }
    const std::vector<Expr>& components() const noexcept { return components_; }
    const Expr& component(int m) const { return components_.at(static_cast<std::size_t>(m)); }
    /// d g_m / d z_n.
    const Expr& gradient(int m, int n) const {
        return gradient_.at(static_cast<std::size_t>(m)).at(static_cast<std::size_t>(n));
    }

    bool all_polynomial() const {
        for (const auto& g : components_)
            if (!is_polynomial(g, arity())) return false;
        return true;
    }

    /// Componentwise g1 - g2.
    friend NonlinearitySpec operator-(const NonlinearitySpec& a, const NonlinearitySpec& b) {
        if (a.arity() != b.arity()) throw ConfigError("nonlinearity: arity mismatch");
        std::vector<Expr> c;
        for (int m = 0; m < a.arity(); ++m) c.push_back(a.component(m) - b.component(m));
        return NonlinearitySpec(std::move(c));
    }

    /// (1 + eps) * g, componentwise.
    NonlinearitySpec scaled(double factor) const {
        std::vector<Expr> c;
        for (const auto& g : components_) c.push_back(Expr::constant(factor) * g);
        return NonlinearitySpec(std::move(c));
    }

private:
    std::vector<Expr> components_;
    std::vector<std::vector<Expr>> gradient_;
};

inline constexpr double zero_at_origin_tolerance = 1e-14;

/// True iff every g_m(0) is within 1e-14 of zero.
inline bool check_zero_at_origin(const NonlinearitySpec& g) {
    std::vector<double> zero(static_cast<std::size_t>(g.arity()), 0.0);
    for (const auto& c : g.components()) {
        double v = 0;
        try {
            v = evaluate(c, zero);
        } catch (const DomainError&) {
            return false;
        }
        if (!(std::abs(v) <= zero_at_origin_tolerance)) return false;
    }
    return true;
}

} // namespace qie
