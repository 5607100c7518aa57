#include <gtest/gtest.h>

#include "approxsym/errors.hpp"
#include "approxsym/linalg.hpp"
#include "approxsym/parse.hpp"
#include "random_expr.hpp"

namespace approxsym {
namespace {

Expr P(const std::string& s) { return parse(s); }

TEST(RowReduce, UniqueZeroSolution) {
    std::vector<SparseRow> rows{{{0, Expr(1)}, {1, Expr(1)}}, {{0, Expr(1)}, {1, Expr(-1)}}};
    auto ech = row_reduce(rows, 2, PivotPolicy::Decided);
    EXPECT_EQ(ech.rank(), 2u);
    EXPECT_TRUE(nullspace(ech).empty());
}

TEST(RowReduce, ReducedEchelonForm) {
    std::vector<SparseRow> rows{{{0, Expr(2)}, {1, Expr(4)}, {2, Expr(2)}}, {{0, Expr(1)}, {1, Expr(2)}, {2, Expr(3)}}};
    auto ech = row_reduce(rows, 3, PivotPolicy::Decided);
    ASSERT_EQ(ech.pivots, (std::vector<std::size_t>{0, 2}));
    EXPECT_EQ(ech.free_columns(), std::vector<std::size_t>{1});
    EXPECT_EQ(ech.rows[0].at(0), Expr(1));
    EXPECT_EQ(ech.rows[0].at(1), Expr(2));
    EXPECT_EQ(ech.rows[0].count(2), 0u);
    auto ns = nullspace(ech);
    ASSERT_EQ(ns.size(), 1u);
    EXPECT_EQ(ns[0], (std::vector<Expr>{Expr(-2), Expr(1), Expr(0)}));
}

TEST(RowReduce, CanonicalInput) {
    std::vector<SparseRow> rows{{{0, Expr(1)}, {2, Expr(5)}}, {{1, Expr(1)}, {2, Expr(-1)}}};
    auto ech = row_reduce(rows, 3, PivotPolicy::Decided);
    EXPECT_EQ(ech.rows, rows);
}

TEST(RowReduce, SymbolicPivotPolicies) {
    std::vector<SparseRow> rows{{{0, P("a")}, {1, Expr(1)}}};
    EXPECT_THROW(row_reduce(rows, 2, PivotPolicy::Decided), SymbolicPivotAmbiguity);
    auto ech = row_reduce(rows, 2, PivotPolicy::Decided, {{"a", Assume::Nonzero}});
    EXPECT_EQ(ech.rows[0].at(1), P("1/a"));
    EXPECT_EQ(row_reduce(rows, 2, PivotPolicy::Transcendental).rank(), 1u);
    try {
        row_reduce({{{0, P("exp(a) - 1")}}}, 1, PivotPolicy::Transcendental);
        FAIL() << "expected SymbolicPivotAmbiguity";
    } catch (const SymbolicPivotAmbiguity& e) {
        EXPECT_EQ(e.pivot(), "exp(a) - 1");
    }
}

TEST(RowReduce, SymbolicNullspaceIsExact) {
    // (m1 + m2) x - m1 y = 0 over independent transcendentals m1, m2.
    std::vector<SparseRow> rows{{{0, P("m1 + m2")}, {1, P("-m1")}}};
    auto ns = nullspace(row_reduce(rows, 2, PivotPolicy::Transcendental));
    ASSERT_EQ(ns.size(), 1u);
    EXPECT_EQ(P("m1 + m2") * ns[0][0] - P("m1") * ns[0][1], Expr(0));
}

TEST(RowReduce, RandomRationalSystems) {
    testing::RandomExpr rnd(41, {Expr(1)});
    for (int n = 0; n < 100; ++n) {
        std::size_t rows_n = static_cast<std::size_t>(rnd.uniform(1, 5));
        std::size_t cols = static_cast<std::size_t>(rnd.uniform(1, 6));
        std::vector<SparseRow> rows(rows_n);
        for (auto& r : rows)
            for (std::size_t c = 0; c < cols; ++c)
                if (rnd.uniform(0, 2) != 0) r[c] = Expr(rnd.coefficient());
        auto ech = row_reduce(rows, cols, PivotPolicy::Decided);
        auto ns = nullspace(ech);
        EXPECT_EQ(ech.rank() + ns.size(), cols);
        for (const auto& v : ns)
            for (const auto& r : rows) {
                Expr dot;
                for (const auto& [c, a] : r) dot = dot + a * v[c];
                EXPECT_EQ(dot, Expr(0));
            }
    }
}

TEST(Rank, DenseMatrices) {
    EXPECT_EQ(rank({{P("1"), P("2")}, {P("2"), P("4")}}), 1u);
    EXPECT_EQ(rank({{P("a"), P("b")}, {P("b"), P("a")}}), 2u);
    EXPECT_EQ(rank({}), 0u);
}

TEST(Assumptions, SignFacts) {
    Assumptions a{{"m1", Assume::Positive}, {"m2", Assume::Positive}, {"k", Assume::Nonzero}};
    EXPECT_TRUE(provably_positive(P("m1 + 2*m2"), a));
    EXPECT_TRUE(provably_nonzero(P("m1*m2*k"), a));
    EXPECT_FALSE(provably_nonzero(P("m1 - m2"), a));
    EXPECT_FALSE(provably_positive(P("k"), a));
}

}  // namespace
}  // namespace approxsym
