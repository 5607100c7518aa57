#include "approxsym/jet.hpp"

#include <algorithm>
#include <functional>

#include "approxsym/calculus.hpp"
#include "approxsym/errors.hpp"
#include "approxsym/print.hpp"

namespace approxsym {

int JetSpace::independent_index(const std::string& name) const {
    auto it = std::find(independent.begin(), independent.end(), name);
    return it == independent.end() ? -1 : static_cast<int>(it - independent.begin());
}

int JetSpace::dependent_index(const std::string& name) const {
    auto it = std::find(dependent.begin(), dependent.end(), name);
    return it == dependent.end() ? -1 : static_cast<int>(it - dependent.begin());
}

ParseContext JetSpace::parse_context(std::vector<std::string> constants, bool strict) const {
    ParseContext ctx;
    ctx.dependents = dependent;
    ctx.independents = independent;
    ctx.symbols = std::move(constants);
    ctx.strict = strict;
    return ctx;
}

Expr total_derivative(const Expr& e, std::size_t i, const JetSpace& space) {
    const std::string& xi = space.independent.at(i);
    Derivation d;
    d.mask = signature_bit(xi) | kJetSignatureBit;
    d.leaf = [&](const Expr& leaf) -> Expr {
        if (leaf.kind() == Kind::Symbol) return leaf.name() == xi ? Expr(1) : Expr(0);
        if (space.dependent_index(leaf.name()) < 0)
            throw Error("jet coordinate '" + to_string(leaf) + "' is not in the jet space");
        if (leaf.jet_derivative_order() + 1 > space.max_derivative + 1)
            throw DerivativeOverflow("D_" + xi + " of " + to_string(leaf) + " exceeds derivative order " +
                                     std::to_string(space.max_derivative + 1));
        JetDerivative jd = leaf.jet_derivative();
        jd.emplace_back(xi, 1);
        return Expr::jet(leaf.name(), leaf.eps_order(), std::move(jd));
    };
    return derive(e, d);
}

std::vector<Expr> first_derivative_generators(const JetSpace& space, int eps_order) {
    std::vector<Expr> gens;
    for (int k = 0; k <= eps_order; ++k)
        for (std::size_t a = 0; a < space.m(); ++a)
            for (std::size_t i = 0; i < space.n(); ++i) gens.push_back(space.du(a, k, i));
    return gens;
}

std::vector<Expr> enumerate_monomials(const JetSpace& space, int degree, int eps_order) {
    const auto gens = first_derivative_generators(space, eps_order);
    const std::size_t per_order = space.m() * space.n();
    std::vector<Expr> out{Expr(1)};
    std::vector<std::size_t> idx;
    // Nondecreasing index combinations of each length, pruned by ε-weight.
    std::function<void(std::size_t, int, int, Expr)> rec = [&](std::size_t start, int left, int weight, Expr mono) {
        if (left == 0) {
            out.push_back(mono);
            return;
        }
        for (std::size_t g = start; g < gens.size(); ++g) {
            const int w = weight + static_cast<int>(g / per_order);
            if (w > eps_order) break;
            rec(g, left - 1, w, mono * gens[g]);
        }
    };
    for (int d = 1; d <= degree; ++d) rec(0, d, 0, Expr(1));
    return out;
}

}  // namespace approxsym
