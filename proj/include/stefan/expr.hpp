#pragma once

#include <cstddef>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>

namespace stefan {

/// Raised by Expr::parse. offset() is the byte position in the source text
/// where the problem was detected.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t offset)
        : std::runtime_error(what + " at offset " + std::to_string(offset)),
          offset_(offset) {}
    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

/// Raised by Expr::eval on division by zero or sqrt of a negative number.
class EvalError : public std::runtime_error {
public:
    EvalError(const std::string& what, std::string subexpr)
        : std::runtime_error(what + " in '" + subexpr + "'"), subexpr_(std::move(subexpr)) {}
    const std::string& subexpression() const noexcept { return subexpr_; }

private:
    std::string subexpr_;
};

namespace detail {
struct Node;
}

/// Scalar arithmetic expression in the variables x and t.
///
/// Grammar (lowest to highest precedence):
///   sum     := product (('+' | '-') product)*
///   product := unary (('*' | '/') unary)*
///   unary   := '-' unary | power
///   power   := primary ('^' unary)?          right associative
///   primary := number | 'x' | 't' | func '(' args ')' | '(' sum ')'
/// Functions: sin cos exp sqrt abs tanh (one argument), min max (two).
///
/// Expr is immutable and cheap to copy; evaluation from several threads
/// at once is safe.
class Expr {
public:
    Expr();  // the constant 0

    static Expr parse(std::string_view source);
    static Expr constant(double value);

    double eval(double x, double t) const;
    double operator()(double x, double t) const { return eval(x, t); }

    /// Fully parenthesised form that parses back to the same tree.
    std::string print() const;

    bool uses_x() const noexcept { return uses_x_; }
    bool uses_t() const noexcept { return uses_t_; }

private:
    explicit Expr(std::shared_ptr<const detail::Node> root);

    std::shared_ptr<const detail::Node> root_;
    bool uses_x_ = false;
    bool uses_t_ = false;
};

}  // namespace stefan
