#include "msequiv/expr.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cstdint>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

namespace msequiv {

struct Expr::Node {
    ExprKind kind = ExprKind::constant;
    double value = 0.0;
    std::size_t index = 0;
    int exponent = 0;
    Expr a{nullptr};
    Expr b{nullptr};
};

Expr::Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

Expr::Expr() {
    static const auto zero = std::make_shared<const Node>();
    node_ = zero;
}

Expr Expr::constant(double value) {
    if (!std::isfinite(value)) {
        throw InputError("expression constants must be finite");
    }
    if (std::signbit(value)) {
        return negate(constant(-value));
    }
    if (value == 0.0) {
        return Expr();
    }
    Node n;
    n.kind = ExprKind::constant;
    n.value = value;
    return Expr(std::make_shared<const Node>(std::move(n)));
}

Expr Expr::variable(std::size_t index) {
    Node n;
    n.kind = ExprKind::variable;
    n.index = index;
    return Expr(std::make_shared<const Node>(std::move(n)));
}

Expr Expr::parameter(std::size_t index) {
    Node n;
    n.kind = ExprKind::parameter;
    n.index = index;
    return Expr(std::make_shared<const Node>(std::move(n)));
}

Expr Expr::negate(Expr operand) {
    Node n;
    n.kind = ExprKind::negate;
    n.a = std::move(operand);
    return Expr(std::make_shared<const Node>(std::move(n)));
}

Expr Expr::add(Expr lhs, Expr rhs) {
    Node n;
    n.kind = ExprKind::add;
    n.a = std::move(lhs);
    n.b = std::move(rhs);
    return Expr(std::make_shared<const Node>(std::move(n)));
}

Expr Expr::subtract(Expr lhs, Expr rhs) {
    Node n;
    n.kind = ExprKind::subtract;
    n.a = std::move(lhs);
    n.b = std::move(rhs);
    return Expr(std::make_shared<const Node>(std::move(n)));
}

Expr Expr::multiply(Expr lhs, Expr rhs) {
    Node n;
    n.kind = ExprKind::multiply;
    n.a = std::move(lhs);
    n.b = std::move(rhs);
    return Expr(std::make_shared<const Node>(std::move(n)));
}

Expr Expr::divide(Expr lhs, Expr rhs) {
    Node n;
    n.kind = ExprKind::divide;
    n.a = std::move(lhs);
    n.b = std::move(rhs);
    return Expr(std::make_shared<const Node>(std::move(n)));
}

Expr Expr::power(Expr base, int exponent) {
    Node n;
    n.kind = ExprKind::power;
    n.a = std::move(base);
    n.exponent = exponent;
    return Expr(std::make_shared<const Node>(std::move(n)));
}

ExprKind Expr::kind() const noexcept { return node_->kind; }
double Expr::value() const noexcept { return node_->value; }
std::size_t Expr::index() const noexcept { return node_->index; }
int Expr::exponent() const noexcept { return node_->exponent; }
const Expr& Expr::lhs() const noexcept { return node_->a; }
const Expr& Expr::rhs() const noexcept { return node_->b; }

bool Expr::is_constant(double v) const noexcept {
    return node_->kind == ExprKind::constant && node_->value == v;
}

bool operator==(const Expr& a, const Expr& b) {
    if (a.node_ == b.node_) {
        return true;
    }
    if (a.kind() != b.kind()) {
        return false;
    }
    switch (a.kind()) {
    case ExprKind::constant:
        return std::bit_cast<std::uint64_t>(a.value()) == std::bit_cast<std::uint64_t>(b.value());
    case ExprKind::variable:
    case ExprKind::parameter:
        return a.index() == b.index();
    case ExprKind::negate:
        return a.lhs() == b.lhs();
    case ExprKind::power:
        return a.exponent() == b.exponent() && a.lhs() == b.lhs();
    default:
        return a.lhs() == b.lhs() && a.rhs() == b.rhs();
    }
}

std::size_t Expr::size() const {
    switch (kind()) {
    case ExprKind::constant:
    case ExprKind::variable:
    case ExprKind::parameter:
        return 1;
    case ExprKind::negate:
    case ExprKind::power:
        return 1 + lhs().size();
    default:
        return 1 + lhs().size() + rhs().size();
    }
}

Expr operator+(Expr a, Expr b) { return Expr::add(std::move(a), std::move(b)); }
Expr operator-(Expr a, Expr b) { return Expr::subtract(std::move(a), std::move(b)); }
Expr operator*(Expr a, Expr b) { return Expr::multiply(std::move(a), std::move(b)); }
Expr operator/(Expr a, Expr b) { return Expr::divide(std::move(a), std::move(b)); }
Expr operator-(Expr a) { return Expr::negate(std::move(a)); }

ParseError::ParseError(std::string message, std::size_t position, std::string token)
    : InputError(std::move(message)), position_(position), token_(std::move(token)) {}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

namespace {

enum class Tok { number, ident, plus, minus, star, slash, caret, lparen, rparen, end };

struct Token {
    Tok kind = Tok::end;
    std::string_view text;
    std::size_t pos = 0;
    double number = 0.0;
};

class Lexer {
public:
    explicit Lexer(std::string_view text) : text_(text) {}

    Token next() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
            ++pos_;
        }
        Token t;
        t.pos = pos_;
        if (pos_ >= text_.size()) {
            t.kind = Tok::end;
            return t;
        }
        const char c = text_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            return lex_number();
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t end = pos_ + 1;
            while (end < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[end])) || text_[end] == '_')) {
                ++end;
            }
            t.kind = Tok::ident;
            t.text = text_.substr(pos_, end - pos_);
            pos_ = end;
            return t;
        }
        t.text = text_.substr(pos_, 1);
        ++pos_;
        switch (c) {
        case '+': t.kind = Tok::plus; break;
        case '-': t.kind = Tok::minus; break;
        case '*': t.kind = Tok::star; break;
        case '/': t.kind = Tok::slash; break;
        case '^': t.kind = Tok::caret; break;
        case '(': t.kind = Tok::lparen; break;
        case ')': t.kind = Tok::rparen; break;
        default:
            throw ParseError("syntax error at position " + std::to_string(t.pos) +
                                 ": unexpected character '" + std::string(t.text) + "'",
                             t.pos, std::string(t.text));
        }
        return t;
    }

private:
    Token lex_number() {
        Token t;
        t.kind = Tok::number;
        t.pos = pos_;
        std::size_t end = pos_;
        auto digits = [&] {
            while (end < text_.size() && std::isdigit(static_cast<unsigned char>(text_[end]))) {
                ++end;
            }
        };
        digits();
        if (end < text_.size() && text_[end] == '.') {
            ++end;
            digits();
        }
        if (end < text_.size() && (text_[end] == 'e' || text_[end] == 'E')) {
            std::size_t exp_end = end + 1;
            if (exp_end < text_.size() && (text_[exp_end] == '+' || text_[exp_end] == '-')) {
                ++exp_end;
            }
            if (exp_end < text_.size() && std::isdigit(static_cast<unsigned char>(text_[exp_end]))) {
                end = exp_end;
                digits();
            }
        }
        t.text = text_.substr(pos_, end - pos_);
        const auto* first = text_.data() + pos_;
        const auto* last = text_.data() + end;
        auto [ptr, ec] = std::from_chars(first, last, t.number);
        if (ec != std::errc() || ptr != last) {
            throw ParseError("syntax error at position " + std::to_string(pos_) +
                                 ": malformed number '" + std::string(t.text) + "'",
                             pos_, std::string(t.text));
        }
        pos_ = end;
        return t;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

std::string describe(const Token& t) {
    return t.kind == Tok::end ? std::string("end of input") : "'" + std::string(t.text) + "'";
}

class Parser {
public:
    Parser(std::string_view text, std::span<const std::string> vars,
           std::span<const std::string> params)
        : lexer_(text), vars_(vars), params_(params) {
        advance();
    }

    Expr parse() {
        Expr e = expr();
        if (cur_.kind != Tok::end) {
            fail("unexpected token " + describe(cur_));
        }
        return e;
    }

private:
    void advance() { cur_ = lexer_.next(); }

    [[noreturn]] void fail(const std::string& what) const {
        throw ParseError("syntax error at position " + std::to_string(cur_.pos) + ": " + what,
                         cur_.pos, std::string(cur_.text));
    }

    Expr expr() {
        Expr lhs = term();
        while (cur_.kind == Tok::plus || cur_.kind == Tok::minus) {
            const bool plus = cur_.kind == Tok::plus;
            advance();
            Expr rhs = term();
            lhs = plus ? Expr::add(std::move(lhs), std::move(rhs))
                       : Expr::subtract(std::move(lhs), std::move(rhs));
        }
        return lhs;
    }

    Expr term() {
        Expr lhs = unary();
        while (cur_.kind == Tok::star || cur_.kind == Tok::slash) {
            const bool mul = cur_.kind == Tok::star;
            advance();
            Expr rhs = unary();
            lhs = mul ? Expr::multiply(std::move(lhs), std::move(rhs))
                      : Expr::divide(std::move(lhs), std::move(rhs));
        }
        return lhs;
    }

    Expr unary() {
        if (cur_.kind == Tok::minus) {
            advance();
            return Expr::negate(unary());
        }
        return power();
    }

    Expr power() {
        Expr base = primary();
        if (cur_.kind != Tok::caret) {
            return base;
        }
        advance();
        bool negative = false;
        if (cur_.kind == Tok::minus) {
            negative = true;
            advance();
        }
        if (cur_.kind != Tok::number) {
            fail("exponent must be an integer literal, found " + describe(cur_));
        }
        const double v = cur_.number;
        if (v != std::floor(v) || v > 1e6) {
            throw ParseError("non-integer exponent '" + std::string(cur_.text) + "' at position " +
                                 std::to_string(cur_.pos),
                             cur_.pos, std::string(cur_.text));
        }
        advance();
        if (cur_.kind == Tok::caret) {
            fail("chained exponents are not supported; use parentheses");
        }
        const int n = static_cast<int>(v);
        return Expr::power(std::move(base), negative ? -n : n);
    }

    Expr primary() {
        switch (cur_.kind) {
        case Tok::number: {
            const double v = cur_.number;
            advance();
            return Expr::constant(v);
        }
        case Tok::ident: {
            const std::string name(cur_.text);
            const auto var = std::find(vars_.begin(), vars_.end(), name);
            if (var != vars_.end()) {
                advance();
                return Expr::variable(static_cast<std::size_t>(var - vars_.begin()));
            }
            const auto par = std::find(params_.begin(), params_.end(), name);
            if (par != params_.end()) {
                advance();
                return Expr::parameter(static_cast<std::size_t>(par - params_.begin()));
            }
            throw ParseError("unknown identifier '" + name + "' at position " +
                                 std::to_string(cur_.pos),
                             cur_.pos, name);
        }
        case Tok::lparen: {
            advance();
            Expr inner = expr();
            if (cur_.kind != Tok::rparen) {
                fail("expected ')', found " + describe(cur_));
            }
            advance();
            return inner;
        }
        default:
            fail("expected operand, found " + describe(cur_));
        }
    }

    Lexer lexer_;
    std::span<const std::string> vars_;
    std::span<const std::string> params_;
    Token cur_;
};

}  // namespace

Expr parse_expression(std::string_view text, std::span<const std::string> var_names,
                      std::span<const std::string> param_names) {
    return Parser(text, var_names, param_names).parse();
}

// ---------------------------------------------------------------------------
// Printing
// ---------------------------------------------------------------------------

std::string format_number(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

namespace {

int precedence(const Expr& e) {
    switch (e.kind()) {
    case ExprKind::add:
    case ExprKind::subtract:
        return 1;
    case ExprKind::multiply:
    case ExprKind::divide:
        return 2;
    case ExprKind::negate:
        return 3;
    case ExprKind::power:
        return 4;
    default:
        return 5;
    }
}

class Printer {
public:
    Printer(std::span<const std::string> vars, std::span<const std::string> params)
        : vars_(vars), params_(params) {}

    void print(const Expr& e, std::string& out) const {
        switch (e.kind()) {
        case ExprKind::constant:
            out += format_number(e.value());
            return;
        case ExprKind::variable:
            out += e.index() < vars_.size() ? vars_[e.index()] : "$" + std::to_string(e.index());
            return;
        case ExprKind::parameter:
            out += e.index() < params_.size() ? params_[e.index()]
                                              : "#" + std::to_string(e.index());
            return;
        case ExprKind::negate:
            out += '-';
            child(e.lhs(), precedence(e.lhs()) < 3, out);
            return;
        case ExprKind::power:
            child(e.lhs(), precedence(e.lhs()) < 5, out);
            out += '^';
            out += std::to_string(e.exponent());
            return;
        default:
            break;
        }
        const int p = precedence(e);
        child(e.lhs(), precedence(e.lhs()) < p, out);
        switch (e.kind()) {
        case ExprKind::add: out += " + "; break;
        case ExprKind::subtract: out += " - "; break;
        case ExprKind::multiply: out += "*"; break;
        default: out += "/"; break;
        }
        child(e.rhs(), precedence(e.rhs()) <= p, out);
    }

private:
    void child(const Expr& e, bool parens, std::string& out) const {
        if (parens) {
            out += '(';
        }
        print(e, out);
        if (parens) {
            out += ')';
        }
    }

    std::span<const std::string> vars_;
    std::span<const std::string> params_;
};

}  // namespace

std::string to_string(const Expr& e, std::span<const std::string> var_names,
                      std::span<const std::string> param_names) {
    std::string out;
    Printer(var_names, param_names).print(e, out);
    return out;
}

std::string to_string(const Expr& e) { return to_string(e, {}, {}); }

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

namespace {

double int_power(double base, int exponent) {
    unsigned n = static_cast<unsigned>(exponent < 0 ? -exponent : exponent);
    double result = 1.0;
    double b = base;
    while (n != 0) {
        if (n & 1U) {
            result *= b;
        }
        b *= b;
        n >>= 1U;
    }
    return result;
}

double eval(const Expr& e, std::span<const double> vars, std::span<const double> params) {
    switch (e.kind()) {
    case ExprKind::constant:
        return e.value();
    case ExprKind::variable:
        return vars[e.index()];
    case ExprKind::parameter:
        return params[e.index()];
    case ExprKind::negate:
        return -eval(e.lhs(), vars, params);
    case ExprKind::add:
        return eval(e.lhs(), vars, params) + eval(e.rhs(), vars, params);
    case ExprKind::subtract:
        return eval(e.lhs(), vars, params) - eval(e.rhs(), vars, params);
    case ExprKind::multiply:
        return eval(e.lhs(), vars, params) * eval(e.rhs(), vars, params);
    case ExprKind::divide: {
        const double num = eval(e.lhs(), vars, params);
        const double den = eval(e.rhs(), vars, params);
        if (den == 0.0) {
            throw EvalError("division by zero in denominator '" + to_string(e.rhs()) + "'", e.rhs());
        }
        return num / den;
    }
    case ExprKind::power: {
        const double base = eval(e.lhs(), vars, params);
        if (e.exponent() < 0) {
            if (base == 0.0) {
                throw EvalError("division by zero: negative power of '" + to_string(e.lhs()) + "'",
                                e.lhs());
            }
            return 1.0 / int_power(base, e.exponent());
        }
        return int_power(base, e.exponent());
    }
    }
    return 0.0;
}

}  // namespace

double evaluate(const Expr& e, std::span<const double> vars, std::span<const double> params) {
    return eval(e, vars, params);
}

double evaluate(const Expr& e, std::span<const double> vars, std::span<const double> params,
                std::span<const std::string> var_names, std::span<const std::string> param_names) {
    try {
        return eval(e, vars, params);
    } catch (const EvalError& err) {
        throw EvalError("division by zero in '" +
                            to_string(err.culprit(), var_names, param_names) + "'",
                        err.culprit());
    }
}

// ---------------------------------------------------------------------------
// Simplifying constructors and symbolic differentiation
// ---------------------------------------------------------------------------

namespace {

bool constant_value(const Expr& e, double& v) {
    if (e.kind() == ExprKind::constant) {
        v = e.value();
        return true;
    }
    if (e.kind() == ExprKind::negate && e.lhs().kind() == ExprKind::constant) {
        v = -e.lhs().value();
        return true;
    }
    return false;
}

bool is_value(const Expr& e, double target) {
    double v = 0.0;
    return constant_value(e, v) && v == target;
}

Expr s_neg(Expr a) {
    double v = 0.0;
    if (constant_value(a, v)) {
        return Expr::constant(-v == 0.0 ? 0.0 : -v);
    }
    if (a.kind() == ExprKind::negate) {
        return a.lhs();
    }
    return Expr::negate(std::move(a));
}

Expr s_add(Expr a, Expr b) {
    double x = 0.0;
    double y = 0.0;
    const bool ca = constant_value(a, x);
    const bool cb = constant_value(b, y);
    if (ca && cb) {
        return Expr::constant(x + y);
    }
    if (ca && x == 0.0) {
        return b;
    }
    if (cb && y == 0.0) {
        return a;
    }
    if (b.kind() == ExprKind::negate) {
        return Expr::subtract(std::move(a), b.lhs());
    }
    return Expr::add(std::move(a), std::move(b));
}

Expr s_sub(Expr a, Expr b) {
    double x = 0.0;
    double y = 0.0;
    const bool ca = constant_value(a, x);
    const bool cb = constant_value(b, y);
    if (ca && cb) {
        return Expr::constant(x - y);
    }
    if (cb && y == 0.0) {
        return a;
    }
    if (ca && x == 0.0) {
        return s_neg(std::move(b));
    }
    if (b.kind() == ExprKind::negate) {
        return Expr::add(std::move(a), b.lhs());
    }
    return Expr::subtract(std::move(a), std::move(b));
}

Expr s_mul(Expr a, Expr b) {
    double x = 0.0;
    double y = 0.0;
    const bool ca = constant_value(a, x);
    const bool cb = constant_value(b, y);
    if (ca && cb) {
        return Expr::constant(x * y);
    }
    if ((ca && x == 0.0) || (cb && y == 0.0)) {
        return Expr();
    }
    if (ca && x == 1.0) {
        return b;
    }
    if (cb && y == 1.0) {
        return a;
    }
    if (ca && x == -1.0) {
        return s_neg(std::move(b));
    }
    if (cb && y == -1.0) {
        return s_neg(std::move(a));
    }
    return Expr::multiply(std::move(a), std::move(b));
}

Expr s_div(Expr a, Expr b) {
    double x = 0.0;
    double y = 0.0;
    const bool ca = constant_value(a, x);
    const bool cb = constant_value(b, y);
    if (ca && x == 0.0) {
        return Expr();
    }
    if (cb && y == 1.0) {
        return a;
    }
    if (ca && cb && y != 0.0) {
        return Expr::constant(x / y);
    }
    return Expr::divide(std::move(a), std::move(b));
}

Expr s_pow(Expr a, int n) {
    if (n == 0) {
        return Expr::constant(1.0);
    }
    if (n == 1) {
        return a;
    }
    double x = 0.0;
    if (constant_value(a, x) && (x != 0.0 || n > 0)) {
        return Expr::constant(n > 0 ? int_power(x, n) : 1.0 / int_power(x, n));
    }
    return Expr::power(std::move(a), n);
}

template <typename LeafDerivative>
Expr derive(const Expr& e, const LeafDerivative& leaf) {
    switch (e.kind()) {
    case ExprKind::constant:
    case ExprKind::variable:
    case ExprKind::parameter:
        return leaf(e);
    case ExprKind::negate:
        return s_neg(derive(e.lhs(), leaf));
    case ExprKind::add:
        return s_add(derive(e.lhs(), leaf), derive(e.rhs(), leaf));
    case ExprKind::subtract:
        return s_sub(derive(e.lhs(), leaf), derive(e.rhs(), leaf));
    case ExprKind::multiply:
        return s_add(s_mul(derive(e.lhs(), leaf), e.rhs()), s_mul(e.lhs(), derive(e.rhs(), leaf)));
    case ExprKind::divide: {
        Expr du = derive(e.lhs(), leaf);
        Expr dv = derive(e.rhs(), leaf);
        if (is_value(dv, 0.0)) {
            return s_div(std::move(du), e.rhs());
        }
        return s_div(s_sub(s_mul(std::move(du), e.rhs()), s_mul(e.lhs(), std::move(dv))),
                     s_pow(e.rhs(), 2));
    }
    case ExprKind::power: {
        const int n = e.exponent();
        return s_mul(s_mul(Expr::constant(static_cast<double>(n)), s_pow(e.lhs(), n - 1)),
                     derive(e.lhs(), leaf));
    }
    }
    return Expr();
}

}  // namespace

Expr differentiate(const Expr& e, std::size_t var_index) {
    return derive(e, [var_index](const Expr& leaf) {
        return leaf.kind() == ExprKind::variable && leaf.index() == var_index
                   ? Expr::constant(1.0)
                   : Expr();
    });
}

Expr differentiate_parameter(const Expr& e, std::size_t param_index) {
    return derive(e, [param_index](const Expr& leaf) {
        return leaf.kind() == ExprKind::parameter && leaf.index() == param_index
                   ? Expr::constant(1.0)
                   : Expr();
    });
}

Expr substitute(const Expr& e, std::span<const Expr> replacements) {
    switch (e.kind()) {
    case ExprKind::constant:
    case ExprKind::parameter:
        return e;
    case ExprKind::variable:
        return replacements[e.index()];
    case ExprKind::negate:
        return Expr::negate(substitute(e.lhs(), replacements));
    case ExprKind::power:
        return Expr::power(substitute(e.lhs(), replacements), e.exponent());
    case ExprKind::add:
        return Expr::add(substitute(e.lhs(), replacements), substitute(e.rhs(), replacements));
    case ExprKind::subtract:
        return Expr::subtract(substitute(e.lhs(), replacements),
                              substitute(e.rhs(), replacements));
    case ExprKind::multiply:
        return Expr::multiply(substitute(e.lhs(), replacements),
                              substitute(e.rhs(), replacements));
    case ExprKind::divide:
        return Expr::divide(substitute(e.lhs(), replacements), substitute(e.rhs(), replacements));
    }
    return e;
}

Expr simplify(const Expr& e) {
    switch (e.kind()) {
    case ExprKind::constant:
    case ExprKind::variable:
    case ExprKind::parameter:
        return e;
    case ExprKind::negate:
        return s_neg(simplify(e.lhs()));
    case ExprKind::power:
        return s_pow(simplify(e.lhs()), e.exponent());
    case ExprKind::add:
        return s_add(simplify(e.lhs()), simplify(e.rhs()));
    case ExprKind::subtract:
        return s_sub(simplify(e.lhs()), simplify(e.rhs()));
    case ExprKind::multiply:
        return s_mul(simplify(e.lhs()), simplify(e.rhs()));
    case ExprKind::divide:
        return s_div(simplify(e.lhs()), simplify(e.rhs()));
    }
    return e;
}

namespace {

template <ExprKind Leaf>
std::size_t extent(const Expr& e) {
    switch (e.kind()) {
    case ExprKind::constant:
        return 0;
    case ExprKind::variable:
    case ExprKind::parameter:
        return e.kind() == Leaf ? e.index() + 1 : 0;
    case ExprKind::negate:
    case ExprKind::power:
        return extent<Leaf>(e.lhs());
    default:
        return std::max(extent<Leaf>(e.lhs()), extent<Leaf>(e.rhs()));
    }
}

}  // namespace

std::size_t variable_extent(const Expr& e) { return extent<ExprKind::variable>(e); }
std::size_t parameter_extent(const Expr& e) { return extent<ExprKind::parameter>(e); }

}  // namespace msequiv
