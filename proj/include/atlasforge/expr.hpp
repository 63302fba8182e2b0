#pragma once

#include <memory>
#include <string>
#include <vector>

#include "atlasforge/common.hpp"

namespace af {

// Rational expressions over variables x1..xn: +, -, *, /, integer ^, rational
// constants, parentheses. Differentiation is exact term rewriting.
class Expr {
public:
    static Expr parse(const std::string& text, std::size_t dimension);
    static Expr constant(double v);
    static Expr variable(std::size_t index, std::size_t dimension);

    double eval(const std::vector<double>& x) const;  // EvaluationError on non-finite
    Expr derivative(std::size_t var) const;
    std::string to_string() const;
    std::size_t dimension() const { return dim_; }

    Expr() = default;

    struct Node;  // exposed for the implementation file

private:
    std::shared_ptr<const Node> root_;
    std::size_t dim_ = 0;
};

}  // namespace af
