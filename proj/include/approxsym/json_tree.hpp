#pragma once

#include <json.hpp>

#include "approxsym/expr.hpp"

namespace approxsym {

/// JSON tree `{"op": ..., "args": [...]}` for an expression.
nlohmann::json to_json_tree(const Expr& e);
Expr from_json_tree(const nlohmann::json& j);

}  // namespace approxsym
