#pragma once

#include <functional>
#include <map>
#include <vector>

#include "approxsym/expr.hpp"

namespace approxsym {

/// Rewrites sin/cos of integer multiples n*a into polynomials in sin a, cos a,
/// then reduces modulo sin^2 a = 1 - cos^2 a. The result is canonical on the
/// polynomial/trig subclass.
Expr trig_reduce(const Expr& e);

enum class ZeroVerdict { True, False, Unknown };

/// Sound zero test: True means e vanishes identically. False is only returned
/// when the normalized form lies in the decidable class (Laurent/Puiseux
/// polynomials in symbols, jets, opaque functions, sin/cos of a plain symbol or
/// jet); otherwise Unknown.
ZeroVerdict is_zero(const Expr& e);
inline bool is_identically_zero(const Expr& e) { return is_zero(e) == ZeroVerdict::True; }

/// Multiplies out powers of sums appearing as factors so that expressions
/// differing only by polynomial multiples of such a power compare equal; the
/// result equals e times a nonzero product of those powers.
Expr clear_sum_powers(const Expr& e);

using MonomialMap = std::map<Expr, Expr, ExprLess>;

/// Coefficients of e as a polynomial in the generator atoms; the key 1 holds
/// the generator-free remainder. Throws NotPolynomial when a generator occurs
/// other than as a nonnegative integer power factor.
MonomialMap collect(const Expr& e, const std::vector<Expr>& generators);

/// Splits every term into (coefficient part, function part): factors whose base
/// satisfies `is_coefficient` go to the coefficient. Returns function part -> summed
/// coefficient.
MonomialMap separate(const Expr& e, const std::function<bool(const Expr&)>& is_coefficient);

}  // namespace approxsym
