#pragma once

#include <iosfwd>
#include <string>

#include "approxsym/expr.hpp"

namespace approxsym {

/// Text form accepted back by `parse`.
std::string to_string(const Expr& e);
std::string to_string(const Rational& q);
std::string to_latex(const Expr& e);

/// Printed name of a jet coordinate without derivative prefix, e.g. `u0`, `x1_0`.
std::string jet_name(const std::string& base, int eps_order);

std::ostream& operator<<(std::ostream& os, const Expr& e);

}  // namespace approxsym
