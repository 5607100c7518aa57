#pragma once

#include <string>
#include <vector>

#include "approxsym/expr.hpp"
#include "approxsym/parse.hpp"

namespace approxsym {

/// Independent variables x_1..x_n, dependent base names u_1..u_m, truncation
/// order p and maximal derivative order r of the jet coordinates u_(k)α,J.
struct JetSpace {
    std::vector<std::string> independent{"t"};
    std::vector<std::string> dependent{"u"};
    int order_p = 1;
    int max_derivative = 1;

    std::size_t n() const { return independent.size(); }
    std::size_t m() const { return dependent.size(); }

    Expr x(std::size_t i) const { return Expr::symbol(independent.at(i)); }
    /// u_(k)α, or the base variable when k == kBaseOrder.
    Expr u(std::size_t alpha, int k) const { return Expr::jet(dependent.at(alpha), k); }
    /// u_(k)α,i
    Expr du(std::size_t alpha, int k, std::size_t i) const {
        return Expr::jet(dependent.at(alpha), k, {{independent.at(i), 1}});
    }
    /// u_(k)α,ij
    Expr ddu(std::size_t alpha, int k, std::size_t i, std::size_t j) const {
        return Expr::jet(dependent.at(alpha), k, {{independent.at(i), 1}, {independent.at(j), 1}});
    }

    int independent_index(const std::string& name) const;
    int dependent_index(const std::string& name) const;

    ParseContext parse_context(std::vector<std::string> constants = {}, bool strict = false) const;
};

/// Approximate total derivative D_i over all coordinates u_(k)α,J (and the
/// base variables, for exact computations). Throws DerivativeOverflow past
/// derivative order r + 1.
Expr total_derivative(const Expr& e, std::size_t i, const JetSpace& space);

/// Monomials in first-order derivatives u_(k)α,i with total degree <= degree
/// and ε-weight (sum of k) <= eps_order, degree-graded in a fixed order.
std::vector<Expr> enumerate_monomials(const JetSpace& space, int degree, int eps_order);

/// The first-order derivative generators in (k, α, i) order, k <= eps_order.
std::vector<Expr> first_derivative_generators(const JetSpace& space, int eps_order);

}  // namespace approxsym
