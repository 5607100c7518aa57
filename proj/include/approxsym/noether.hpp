#pragma once

#include <string>
#include <vector>

#include "approxsym/calculus.hpp"
#include "approxsym/expr.hpp"
#include "approxsym/jet.hpp"
#include "approxsym/linalg.hpp"
#include "approxsym/perturb.hpp"
#include "approxsym/symmetry.hpp"

namespace approxsym {

/// ℒ ≈ ℒ_0 + ε ℒ_1 + ... + ε^p ℒ_p of a first-order Lagrangian.
struct PerturbedLagrangian {
    JetSpace space;
    EpsSeries L;

    /// Expands a Lagrangian written in base variables and `eps`.
    static PerturbedLagrangian from_source(const Expr& lagrangian, const JetSpace& space);
    /// True when ℒ_k is linear in u_(k) and its derivatives for k >= 1.
    bool linear_in_top_order() const;
};

/// Gauge terms φ^i_(k), indexed [k][i].
using Gauge = std::vector<std::vector<Expr>>;
Gauge zero_gauge(const JetSpace& space);

/// Coefficient k of component α: ∂ℒ_k/∂u_(0)α - Σ_i D_i ∂ℒ_k/∂u_(0)α,i.
std::vector<EpsSeries> euler_lagrange(const PerturbedLagrangian& L);

/// Coefficient k: Σ_j (Ξ̃^(1)_(j) ℒ_(k-j) + ℒ_(k-j) Σ_i D_i ξ̃_(j)i) + Σ_i D_i φ^i_(k).
/// The generator is prolonged to first order if needed.
EpsSeries variational_residual(ApproximateGenerator g, const PerturbedLagrangian& L, const Gauge& phi);

enum class FluxAssembly {
    /// Truncated classical flux: [(η - ξ_j u_,j) ∂ℒ/∂u_,i]_(k) + [ξ_i ℒ]_(k) + φ^i_(k)
    /// with Cauchy products over ε-orders.
    Expanded,
    /// Pairing ξ̃_(ℓ) with u_(ℓ),j and Σ_q ∂ℒ_(k-ℓ)/∂u_(q),i, kept for comparison.
    Literal,
};

enum class LawClass { Nontrivial, Trivial, OnShellTrivial, Unverified };
std::string to_string(LawClass c);

struct ConservationLaw {
    /// Φ^i_(k), indexed [k][i].
    std::vector<std::vector<Expr>> fluxes;
    bool verified = false;
    LawClass classification = LawClass::Unverified;
    /// Per ε-order outcome of the divergence check.
    std::vector<bool> order_ok;
    std::string label;
};

/// Second derivatives solved from the Euler-Lagrange hierarchy.
struct OnShell {
    Bindings rules;
};

/// Solves the hierarchy for every second derivative that occurs in it.
/// Throws CannotSolveForLeadingDerivative if a pivot is not a single term.
OnShell solve_on_shell(const PerturbedLagrangian& L);

std::vector<std::vector<Expr>> assemble_fluxes(const ApproximateGenerator& g, const PerturbedLagrangian& L,
                                               const Gauge& phi, FluxAssembly assembly = FluxAssembly::Expanded);

/// Σ_i D_i Φ^i_(k) after on-shell substitution, one entry per order.
std::vector<Expr> divergence(const std::vector<std::vector<Expr>>& fluxes, const PerturbedLagrangian& L,
                             const OnShell& on_shell);
std::vector<bool> divergence_check(const std::vector<std::vector<Expr>>& fluxes, const PerturbedLagrangian& L,
                                   const OnShell& on_shell);

/// Noether flux assembly with enforced checks: NotAVariationalSymmetry when the
/// residual is nonzero, FormulaMismatch when the divergence check fails.
ConservationLaw noether_fluxes(const ApproximateGenerator& g, const PerturbedLagrangian& L, const Gauge& phi,
                               const OnShell& on_shell, FluxAssembly assembly = FluxAssembly::Expanded);

/// Wraps given fluxes (e.g. a tabulated golden quantity) and verifies them.
ConservationLaw make_law(std::vector<std::vector<Expr>> fluxes, const PerturbedLagrangian& L, const OnShell& on_shell);

/// One term c * ε^shift * law[index] of a dependency.
struct DependencyTerm {
    std::size_t law = 0;
    int shift = 0;
    Expr coefficient;
};
/// A combination of laws that vanishes up to O(ε^{p+1}) and constants.
using Dependency = std::vector<DependencyTerm>;

/// Linear dependencies with constant coefficients among the laws and their
/// ε-shifts, modulo identically O(ε^{p+1}) combinations and additive constants.
std::vector<Dependency> classify(const std::vector<ConservationLaw>& laws, const PerturbedLagrangian& L,
                                 const std::vector<std::string>& constants);

/// True if `target` equals Σ c_j ε^s law_j for constants c_j (additive
/// constants ignored); `coefficients` receives one dependency expressing it.
bool in_span(const std::vector<std::vector<Expr>>& target, const std::vector<ConservationLaw>& laws,
             const PerturbedLagrangian& L, const std::vector<std::string>& constants, Dependency* coefficients = nullptr);

}  // namespace approxsym
