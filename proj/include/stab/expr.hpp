// Scalar expressions in the decision variables and parameters, with exact
// rational literals and forward-mode first and second derivatives.
#pragma once

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <memory>
#include <string>
#include <vector>

#include "stab/rational.hpp"

namespace stab {

// Extended float type for refinement passes where double rounding would
// blur a sign decision.
using HighFloat = boost::multiprecision::cpp_bin_float_50;

// Value, gradient and Hessian with respect to the decision variables only;
// parameters are treated as constants. h is row-major n x n, symmetric.
template <class T>
struct D2 {
    T v{};
    std::vector<T> g;
    std::vector<T> h;
};

using D2d = D2<double>;
using D2hp = D2<HighFloat>;

struct ExprNode;
using ExprPtr = std::shared_ptr<const ExprNode>;

// Thrown when evaluation leaves a function's domain (division by zero,
// sqrt of a negative, non-finite intermediate). where holds the offending
// sub-expression text.
struct EvalError : std::runtime_error {
    std::string where;
    EvalError(const std::string& msg, std::string where_)
        : std::runtime_error(msg + " in '" + where_ + "'"), where(std::move(where_)) {}
};

// One parsed expression over x1..xn and w1..ws. Supported operations:
// + - * / unary minus, ^ with a literal integer exponent, sin, cos, exp,
// sqrt, abs, and zguard(t, e) which evaluates to e except when t is exactly
// zero, where the value, gradient and Hessian are all taken to be zero.
// zguard encodes a caller's assertion that e has a removable singularity
// at t = 0 with vanishing local expansion; abs contributes derivative 0 at
// its kink.
struct Expr {
    ExprPtr root;
    std::string text;
    int n = 0;
    int s = 0;

    bool valid() const { return root != nullptr; }
    double value(const std::vector<double>& x, const std::vector<double>& w) const;
    D2d eval2(const std::vector<double>& x, const std::vector<double>& w) const;
    HighFloat value_hp(const std::vector<HighFloat>& x, const std::vector<HighFloat>& w) const;
    D2hp eval2_hp(const std::vector<HighFloat>& x, const std::vector<HighFloat>& w) const;
};

// Parse text against dimensions n (variables) and s (parameters).
// Throws InputError with a column reference on malformed input.
Expr parse_expr(const std::string& text, int n, int s);

}  // namespace stab
