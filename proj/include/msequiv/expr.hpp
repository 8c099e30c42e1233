#pragma once

// Rational-function expression trees used for interaction rates.
//
// Grammar accepted by parse_expression:
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' ['-'] integer)?
//   primary := number | identifier | '(' expr ')'
//
// Numbers are decimal literals with an optional exponent (1.5, 2e-3).
// Identifiers resolve to a state variable or a named parameter. Exponents
// must be integer literals, so every expression is a rational function of
// the state and can be differentiated exactly.

#include "msequiv/error.hpp"

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace msequiv {

enum class ExprKind { constant, variable, parameter, negate, add, subtract, multiply, divide, power };

class Expr {
public:
    /// The zero constant.
    Expr();

    /// Finite constant. Negative values are stored as negate(constant(|v|))
    /// so that printing and re-parsing yields the same tree.
    static Expr constant(double value);
    static Expr variable(std::size_t index);
    static Expr parameter(std::size_t index);

    static Expr negate(Expr operand);
    static Expr add(Expr lhs, Expr rhs);
    static Expr subtract(Expr lhs, Expr rhs);
    static Expr multiply(Expr lhs, Expr rhs);
    static Expr divide(Expr lhs, Expr rhs);
    static Expr power(Expr base, int exponent);

    [[nodiscard]] ExprKind kind() const noexcept;
    /// Constant value (constant nodes only).
    [[nodiscard]] double value() const noexcept;
    /// Variable or parameter index.
    [[nodiscard]] std::size_t index() const noexcept;
    /// Power exponent (power nodes only).
    [[nodiscard]] int exponent() const noexcept;
    /// Operand of negate/power, left operand of a binary node.
    [[nodiscard]] const Expr& lhs() const noexcept;
    [[nodiscard]] const Expr& rhs() const noexcept;

    [[nodiscard]] bool is_constant(double v) const noexcept;

    /// Structural equality (same tree shape, bit-identical constants).
    friend bool operator==(const Expr& a, const Expr& b);

    /// Number of nodes.
    [[nodiscard]] std::size_t size() const;

private:
    struct Node;
    explicit Expr(std::shared_ptr<const Node> node);
    std::shared_ptr<const Node> node_;
};

Expr operator+(Expr a, Expr b);
Expr operator-(Expr a, Expr b);
Expr operator*(Expr a, Expr b);
Expr operator/(Expr a, Expr b);
Expr operator-(Expr a);

class ParseError : public InputError {
public:
    ParseError(std::string message, std::size_t position, std::string token);

    [[nodiscard]] std::size_t position() const noexcept { return position_; }
    [[nodiscard]] const std::string& token() const noexcept { return token_; }

private:
    std::size_t position_;
    std::string token_;
};

class EvalError : public NumericalError {
public:
    EvalError(const std::string& message, Expr culprit)
        : NumericalError(message), culprit_(std::move(culprit)) {}

    /// Subexpression that evaluated to zero.
    [[nodiscard]] const Expr& culprit() const noexcept { return culprit_; }

private:
    Expr culprit_;
};

Expr parse_expression(std::string_view text, std::span<const std::string> var_names,
                      std::span<const std::string> param_names);

/// Serializes with minimal parentheses; parse(to_string(e)) == e.
std::string to_string(const Expr& e, std::span<const std::string> var_names,
                      std::span<const std::string> param_names);

/// Debug form with placeholder names ($0, #0).
std::string to_string(const Expr& e);

/// IEEE double evaluation. Throws EvalError on division by zero, naming the
/// offending denominator.
double evaluate(const Expr& e, std::span<const double> vars, std::span<const double> params);

/// Same, with the denominator spelled in the given names.
double evaluate(const Expr& e, std::span<const double> vars, std::span<const double> params,
                std::span<const std::string> var_names, std::span<const std::string> param_names);

/// Exact symbolic partial derivative with respect to variable `var_index`.
/// The result is lightly simplified (constant folding, 0/1 identities).
Expr differentiate(const Expr& e, std::size_t var_index);

/// Partial derivative with respect to parameter `param_index`.
Expr differentiate_parameter(const Expr& e, std::size_t param_index);

/// Replaces every variable j with replacements[j].
Expr substitute(const Expr& e, std::span<const Expr> replacements);

/// Constant folding plus additive/multiplicative identities.
Expr simplify(const Expr& e);

/// Highest variable index referenced plus one (0 if none).
std::size_t variable_extent(const Expr& e);
std::size_t parameter_extent(const Expr& e);

/// Formats a double with the shortest representation that round-trips.
std::string format_number(double v);

}  // namespace msequiv
