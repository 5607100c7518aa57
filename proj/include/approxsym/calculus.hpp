#pragma once

#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "approxsym/expr.hpp"

namespace approxsym {

/// A derivation (linear map obeying Leibniz and the chain rule) described by
/// its action on leaves. Subtrees whose signature misses `mask` map to zero.
struct Derivation {
    std::uint64_t mask = ~std::uint64_t{0};
    /// Image of a Symbol or Jet leaf.
    std::function<Expr(const Expr&)> leaf;
    /// Extra contribution for an arbitrary-function node on top of the chain
    /// rule through its arguments (used by the recursion operator).
    std::function<Expr(const Expr&)> fn_extra;
};

Expr derive(const Expr& e, const Derivation& d);

/// Partial derivative with respect to a symbol or jet coordinate; every other
/// leaf is independent.
Expr differentiate(const Expr& e, const Expr& v);

/// Partial derivative of an arbitrary-function node in argument slot `slot`.
Expr fn_partial(const Expr& fn, std::size_t slot);

using Bindings = std::unordered_map<Expr, Expr, ExprHash>;

/// Simultaneous replacement of atoms (symbols, jets, function applications).
Expr substitute(const Expr& e, const Bindings& bindings);

/// Concrete definition of an arbitrary function in terms of its parameters.
struct FunctionDef {
    std::vector<std::string> params;
    Expr body;
    std::optional<Expr> antiderivative;  // in params[0], for Int(F, .)
};

/// Returns the definition of (name, family) or nullopt to keep the node opaque.
using FunctionResolver = std::function<std::optional<FunctionDef>(const std::string& name, int family)>;

/// Replaces arbitrary-function nodes (including derivatives and antiderivatives)
/// by their definitions.
Expr substitute_functions(const Expr& e, const FunctionResolver& resolve);

/// True if `atom` occurs anywhere inside `e`.
bool depends_on(const Expr& e, const Expr& atom);

/// Visits every distinct subexpression once, parents before children.
void visit(const Expr& e, const std::function<bool(const Expr&)>& enter);

/// All atoms of `e` satisfying `pred`, in canonical order.
std::vector<Expr> atoms_of(const Expr& e, const std::function<bool(const Expr&)>& pred);

}  // namespace approxsym
