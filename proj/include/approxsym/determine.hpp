#pragma once

#include <map>
#include <string>
#include <vector>

#include "approxsym/linalg.hpp"
#include "approxsym/noether.hpp"

namespace approxsym {

/// Finite-dimensional function spaces for the seed family functions and the
/// gauge terms. Keys are tried from most to least specific:
/// "<fam>_<var><k>", "<fam>_<var>", "<fam><k>", "<fam>" with fam in {xi, eta, phi}.
struct AnsatzSpace {
    std::map<std::string, std::vector<Expr>> bases;
    /// Families without a key get an empty basis instead of AnsatzIncomplete.
    bool missing_is_empty = false;

    /// Basis for family `fam` of variable `var` at order k, or nullptr.
    const std::vector<Expr>* lookup(const std::string& fam, const std::string& var, int k) const;
};

/// Products of powers (degree <= 2 in each independent variable), plus
/// sin, cos of 1x and 2x and x sin x, x cos x when `oscillatory`.
std::vector<Expr> default_x_basis(const JetSpace& space, bool oscillatory);
/// Seeds: x-basis times u_(0) monomials of degree <= 2. Gauge of order k:
/// x-basis times monomials in u_(0..k) of degree <= 3 and ε-weight <= k,
/// without the constant.
AnsatzSpace default_ansatz(const JetSpace& space, bool oscillatory);

/// Throws ModelError if the basis is linearly dependent over the constants.
void check_independent(const std::vector<Expr>& basis, const std::vector<std::string>& constants);

struct DeterminingEquation {
    int order = 0;
    /// Monomial in first-order jet derivatives.
    Expr jet_monomial;
    /// Monomial in (x, u_(k), arbitrary functions) separated off its coefficient.
    Expr function_monomial;
    SparseRow row;
    /// Σ row[c]·unknown[c].
    Expr lhs;
};

struct DeterminingSystem {
    JetSpace space;
    std::vector<Expr> unknowns;
    std::vector<DeterminingEquation> equations;
    /// Generator and gauge components, linear in the unknowns: [k][i], [k][α], [k][i].
    std::vector<std::vector<Expr>> xi, eta, phi;
    Assumptions assumptions;
    std::vector<std::string> constants;
};

/// Builds the generator from the recursion with family functions replaced by
/// their ansatz, forms the variational residual and separates it on jet
/// monomials and then on function monomials. Throws AnsatzIncomplete,
/// NotPolynomial.
DeterminingSystem extract(const PerturbedLagrangian& L, const AnsatzSpace& ansatz, const Assumptions& assumptions);

struct Solution {
    ApproximateGenerator generator;
    Gauge gauge;
    std::vector<Expr> values;
};

/// Basis of the solution space from the reduced row-echelon form with the
/// unknowns in declaration order (one solution per free unknown, that unknown
/// set to 1). Throws SymbolicPivotAmbiguity.
std::vector<Solution> solve(const DeterminingSystem& sys);

/// Rank test: does (g, phi) lie in the span of the solutions? Additive
/// constants in the gauge are ignored.
bool in_solution_span(const std::vector<Solution>& basis, const ApproximateGenerator& g, const Gauge& phi,
                      const std::vector<std::string>& constants);

}  // namespace approxsym
