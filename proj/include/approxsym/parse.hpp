#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "approxsym/expr.hpp"

namespace approxsym {

/// Names the parser needs to tell jet coordinates from plain symbols.
struct ParseContext {
    std::vector<std::string> dependents{"u", "v"};
    std::vector<std::string> independents{"t"};
    /// Extra symbols accepted in strict mode (constants, `eps` is always allowed).
    std::vector<std::string> symbols;
    bool strict = false;
};

/// Parses the text grammar:
///   `u` base dependent variable, `u0`/`u1` expansion coordinates (`x1_0` when
///   the base name ends in a digit), `du0#t`, `ddu0#t#t` or `d2u0#t2` for
///   derivatives, `F(u0)`, `F'(u0)`, `F_{1,0}(t,u0)`, family members
///   `xi[1](t,u0)`, antiderivatives `Int(F,u0)`, elementary functions
///   sin cos exp log sqrt, and `+ - * / ^` with the usual precedence.
Expr parse(std::string_view text, const ParseContext& ctx = {});

}  // namespace approxsym
