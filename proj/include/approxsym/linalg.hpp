#pragma once

#include <map>
#include <string>
#include <vector>

#include "approxsym/expr.hpp"

namespace approxsym {

enum class Assume { None, Nonzero, Positive };
using Assumptions = std::map<std::string, Assume>;

/// Sign facts derivable from the assumptions: products and positive-coefficient
/// sums of assumed constants.
bool provably_nonzero(const Expr& e, const Assumptions& assumptions);
bool provably_positive(const Expr& e, const Assumptions& assumptions);

enum class PivotPolicy {
    /// A pivot must be a nonzero rational or provably nonzero from the
    /// assumptions; otherwise SymbolicPivotAmbiguity is raised.
    Decided,
    /// Symbolic constants are independent transcendentals: any expression that
    /// is decidably nonzero is an admissible pivot; an undecidable one raises
    /// SymbolicPivotAmbiguity.
    Transcendental,
};

using SparseRow = std::map<std::size_t, Expr>;

struct RowEchelon {
    std::size_t cols = 0;
    /// Reduced rows; row r has coefficient 1 in column pivots[r] and 0 in every other pivot column.
    std::vector<SparseRow> rows;
    std::vector<std::size_t> pivots;
    std::size_t rank() const { return pivots.size(); }
    std::vector<std::size_t> free_columns() const;
};

/// Gauss-Jordan elimination with columns processed in order.
RowEchelon row_reduce(std::vector<SparseRow> rows, std::size_t cols, PivotPolicy policy,
                      const Assumptions& assumptions = {});

/// Null-space basis: one vector per free column (that column set to 1).
std::vector<std::vector<Expr>> nullspace(const RowEchelon& ech);

/// Rank of a dense matrix of expressions (transcendental policy).
std::size_t rank(const std::vector<std::vector<Expr>>& matrix);

}  // namespace approxsym
