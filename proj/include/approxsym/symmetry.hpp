#pragma once

#include <map>
#include <tuple>
#include <vector>

#include "approxsym/expr.hpp"
#include "approxsym/jet.hpp"
#include "approxsym/perturb.hpp"

namespace approxsym {

/// Derivative multi-index as a sorted list of independent-variable indices.
using MultiIndex = std::vector<int>;

/// Ξ ≈ Σ ε^k (ξ̃_(k)i ∂/∂x_i + η̃_(k)α ∂/∂u_α) with a cache of prolongation
/// coefficients η_(k)α,J.
class ApproximateGenerator {
public:
    ApproximateGenerator() = default;
    /// xi[k][i], eta[k][α] for k = 0..p.
    ApproximateGenerator(JetSpace space, std::vector<std::vector<Expr>> xi, std::vector<std::vector<Expr>> eta);
    static ApproximateGenerator zero(const JetSpace& space);
    /// Builds from one ε-series per component.
    static ApproximateGenerator from_series(const JetSpace& space, const std::vector<EpsSeries>& xi,
                                            const std::vector<EpsSeries>& eta);

    const JetSpace& space() const { return space_; }
    const Expr& xi(int k, std::size_t i) const { return xi_.at(k).at(i); }
    const Expr& eta(int k, std::size_t alpha) const { return eta_.at(k).at(alpha); }
    const std::vector<std::vector<Expr>>& xi() const { return xi_; }
    const std::vector<std::vector<Expr>>& eta() const { return eta_; }
    EpsSeries xi_series(std::size_t i) const;
    EpsSeries eta_series(std::size_t alpha) const;

    /// Fills the prolongation cache up to derivative order `order`.
    void prolong(int order);
    int prolonged_order() const { return prolonged_; }
    /// η_(k)α,J; throws CacheMissing when not prolonged far enough.
    const Expr& prolongation(int k, std::size_t alpha, const MultiIndex& J) const;

    /// True when ξ̃_(k), η̃_(k) reference only u_(0..k).
    bool respects_order() const;
    bool is_zero() const;

private:
    JetSpace space_;
    std::vector<std::vector<Expr>> xi_;
    std::vector<std::vector<Expr>> eta_;
    std::map<std::tuple<int, std::size_t, MultiIndex>, Expr> cache_;
    int prolonged_ = 0;
};

/// Ξ̃^(order)_(ℓ) applied to an ε-coefficient f: the generator acts through
/// ∂/∂x_i, ∂/∂u_(0)α and ∂/∂u_(0)α,J, the base-level slots of the expansion.
Expr act(const ApproximateGenerator& g, int ell, const Expr& f, int order);

/// Coefficient k of the result is Σ_ℓ Ξ̃^(order)_(ℓ)[s_(k-ℓ)].
EpsSeries apply(const ApproximateGenerator& g, const EpsSeries& s, int order);

/// [g1, g2] truncated at order p.
ApproximateGenerator commutator(const ApproximateGenerator& g1, const ApproximateGenerator& g2);

/// ε·g (shift of every component series).
ApproximateGenerator eps_shift(const ApproximateGenerator& g);

/// Linear combination a*g1 + b*g2.
ApproximateGenerator combine(const Expr& a, const ApproximateGenerator& g1, const Expr& b,
                             const ApproximateGenerator& g2);

/// Expands a generator written in base variables and `eps` into its
/// ε-series form.
ApproximateGenerator expand_generator(const JetSpace& space, const std::vector<Expr>& xi,
                                      const std::vector<Expr>& eta);

/// Compares the ε-series prolongation of the expanded generator with the
/// expansion of the exact prolongation computed on base variables, up to
/// derivative order `order`. Returns true when every coefficient agrees.
bool prolongation_routes_agree(const JetSpace& space, const std::vector<Expr>& xi, const std::vector<Expr>& eta,
                               int order);

}  // namespace approxsym
