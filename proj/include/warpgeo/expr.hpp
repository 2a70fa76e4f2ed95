#pragma once

// Warp-function expression language: parsing, printing, and second-order
// forward-mode evaluation in chart coordinates.
//
// Grammar (highest precedence first):
//   primary  := NUMBER | VAR | FUNC '(' expr ')' | 'pow' '(' expr ',' INT ')' | '(' expr ')'
//   power    := primary [ '^' ['-'] INT ]
//   unary    := '-' unary | power
//   term     := unary { ('*' | '/') unary }
//   expr     := term { ('+' | '-') term }
// Variables are x1..xn; when dim == 1, `t` aliases x1.
// FUNC is one of sin, cos, exp, log, sqrt.

#include <array>
#include <cstddef>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "warpgeo/errors.hpp"

namespace warpgeo::dsl {

inline constexpr int kMaxDim = 8;

// Value, gradient and Hessian of a scalar field at one point. Only the
// leading dim entries of grad and the leading dim x dim block of hess are
// meaningful.
struct Jet {
    int dim = 0;
    double value = 0.0;
    std::array<double, kMaxDim> grad{};
    std::array<double, kMaxDim * kMaxDim> hess{};

    double d(int i) const { return grad[static_cast<std::size_t>(i)]; }
    double dd(int i, int j) const { return hess[static_cast<std::size_t>(i * kMaxDim + j)]; }
    double& d(int i) { return grad[static_cast<std::size_t>(i)]; }
    double& dd(int i, int j) { return hess[static_cast<std::size_t>(i * kMaxDim + j)]; }

    static Jet constant(int dim, double c);
    static Jet variable(int dim, int index, double x);
};

Jet operator+(const Jet& a, const Jet& b);
Jet operator-(const Jet& a, const Jet& b);
Jet operator*(const Jet& a, const Jet& b);
Jet operator/(const Jet& a, const Jet& b);
Jet operator-(const Jet& a);
// Applies a scalar function given f(u), f'(u), f''(u) at u = a.value.
Jet chain(const Jet& a, double f, double df, double ddf);
Jet ipow(const Jet& a, int n);

enum class NodeKind { Constant, Variable, Add, Sub, Mul, Div, Neg, Pow, Sin, Cos, Exp, Log, Sqrt };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
    NodeKind kind;
    double constant = 0.0;  // Constant
    int index = 0;          // Variable (0-based), or exponent for Pow
    std::vector<NodePtr> children;
};

class ParseError : public Error {
public:
    enum class Reason { Syntax, UnknownIdentifier, Arity };

    ParseError(Reason reason, std::size_t offset, std::set<std::string> expected,
               const std::string& message)
        : Error("parse", message, {{"offset", static_cast<double>(offset)}}),
          reason_(reason),
          offset_(offset),
          expected_(std::move(expected)) {}

    bool is_validation() const noexcept override { return true; }
    Reason reason() const noexcept { return reason_; }
    std::size_t offset() const noexcept { return offset_; }
    const std::set<std::string>& expected() const noexcept { return expected_; }

private:
    Reason reason_;
    std::size_t offset_;
    std::set<std::string> expected_;
};

// Domain violation while evaluating (log of non-positive, sqrt of negative,
// division by zero). The message names the offending subexpression.
class EvaluationError : public Error {
public:
    EvaluationError(const std::string& message, std::string subexpression)
        : Error("evaluation", message), subexpression_(std::move(subexpression)) {}
    const std::string& subexpression() const noexcept { return subexpression_; }

private:
    std::string subexpression_;
};

// Immutable parsed expression over dim coordinates.
class Expr {
public:
    Expr(NodePtr root, int dim) : root_(std::move(root)), dim_(dim) {}

    int dim() const { return dim_; }
    const Node& root() const { return *root_; }
    const NodePtr& root_ptr() const { return root_; }

    double value(std::span<const double> p) const;
    Jet eval2(std::span<const double> p) const;

    // Canonical, fully parenthesized text; parse(print(e)) reproduces e.
    std::string print() const;

    bool structurally_equal(const Expr& other) const;

private:
    NodePtr root_;
    int dim_;
};

Expr parse(std::string_view text, int dim);

std::string print(const Node& node);

}  // namespace warpgeo::dsl
