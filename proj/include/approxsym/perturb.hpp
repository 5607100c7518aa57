#pragma once

#include <string>
#include <vector>

#include "approxsym/expr.hpp"
#include "approxsym/jet.hpp"

namespace approxsym {

/// Truncated series c_0 + ε c_1 + ... + ε^p c_p with ε-free coefficients.
struct EpsSeries {
    std::vector<Expr> c;

    EpsSeries() = default;
    explicit EpsSeries(int p) : c(static_cast<std::size_t>(p + 1), Expr(0)) {}
    explicit EpsSeries(std::vector<Expr> coeffs) : c(std::move(coeffs)) {}
    static EpsSeries constant(const Expr& e, int p) {
        EpsSeries s(p);
        s.c[0] = e;
        return s;
    }

    int order() const { return static_cast<int>(c.size()) - 1; }
    const Expr& operator[](std::size_t k) const { return c.at(k); }
    Expr& operator[](std::size_t k) { return c.at(k); }
    /// Every coefficient is identically zero.
    bool is_zero() const;
};

EpsSeries series_add(const EpsSeries& a, const EpsSeries& b);
EpsSeries series_sub(const EpsSeries& a, const EpsSeries& b);
/// Truncated Cauchy product.
EpsSeries series_mul(const EpsSeries& a, const EpsSeries& b);
EpsSeries series_scale(const EpsSeries& a, const Expr& factor);
/// Multiplication by ε: shift right, dropping c_p.
EpsSeries series_shift(const EpsSeries& a);
/// a^q for rational q; needs a nonvanishing leading coefficient unless q is a
/// nonnegative integer.
EpsSeries series_pow(const EpsSeries& a, const Rational& q);

/// Name of the distinguished small parameter in source expressions.
inline const std::string kEps = "eps";

/// Substitutes u_α -> Σ ε^k u_(k)α (and likewise for every derivative) in an
/// expression written in base variables and `eps`, Taylor expands to order p.
EpsSeries expand(const Expr& e, const JetSpace& space);

/// Largest ε-order of a jet coordinate occurring in e (-1 if none; base
/// variables count as order kBaseOrder).
int max_jet_order(const Expr& e);

/// True when coefficient k references only u_(ℓ) with ℓ <= k.
bool respects_order(const EpsSeries& s);

/// Recursion operator: R[u_(k)] = (k+1) u_(k+1), family member f_(k) -> f_(k+1)
/// plus the chain rule, independent variables are constants.
Expr recursion_R(const Expr& e, const JetSpace& space);

/// ξ̃_(0) = seed, ξ̃_(k+1) = R[ξ̃_(k)] / (k+1) for k < p.
EpsSeries build_infinitesimals(const Expr& seed, const JetSpace& space);

/// Family member `name`_(k)(x, u_(0)) over the space's independent variables and u_(0) coordinates.
Expr family_function(const std::string& name, int k, const JetSpace& space);

}  // namespace approxsym
