#pragma once

#include <random>
#include <vector>

#include "approxsym/expr.hpp"

namespace approxsym::testing {

/// Random polynomials over a fixed atom set with small rational coefficients.
class RandomExpr {
public:
    RandomExpr(unsigned seed, std::vector<Expr> atoms) : rng_(seed), atoms_(std::move(atoms)) {}

    int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

    Rational coefficient() {
        int num = 0;
        while (num == 0) num = uniform(-5, 5);
        Rational q(num, uniform(1, 3));
        q.canonicalize();
        return q;
    }

    Expr atom() { return atoms_[static_cast<std::size_t>(uniform(0, static_cast<int>(atoms_.size()) - 1))]; }

    Expr monomial(int max_degree) {
        Expr m = Expr(coefficient());
        int degree = uniform(0, max_degree);
        for (int d = 0; d < degree; ++d) m = m * atom();
        return m;
    }

    Expr polynomial(int max_terms, int max_degree) {
        Expr p;
        int terms = uniform(1, max_terms);
        for (int i = 0; i < terms; ++i) p = p + monomial(max_degree);
        return p;
    }

    /// A polynomial guaranteed to contain at least one atom.
    Expr nonconstant(int max_terms, int max_degree) {
        return polynomial(max_terms, max_degree) + Expr(coefficient()) * atom();
    }

    std::mt19937& engine() { return rng_; }

private:
    std::mt19937 rng_;
    std::vector<Expr> atoms_;
};

}  // namespace approxsym::testing
