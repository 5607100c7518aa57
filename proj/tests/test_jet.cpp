#include <gtest/gtest.h>

#include "approxsym/calculus.hpp"
#include "approxsym/errors.hpp"
#include "approxsym/jet.hpp"
#include "approxsym/models.hpp"
#include "approxsym/parse.hpp"
#include "approxsym/print.hpp"
#include "approxsym/simplify.hpp"
#include "random_expr.hpp"

namespace approxsym {
namespace {

Expr P(const std::string& s) { return parse(s); }

TEST(TotalDerivative, ChainRuleThroughJets) {
    JetSpace s;
    EXPECT_EQ(total_derivative(P("u0^2"), 0, s), P("2*u0*du0#t"));
    EXPECT_EQ(total_derivative(P("sin(t)*u1"), 0, s), P("cos(t)*u1 + sin(t)*du1#t"));
    EXPECT_EQ(total_derivative(P("du0#t"), 0, s), P("ddu0#t#t"));
    EXPECT_EQ(total_derivative(P("F(u0)"), 0, s), P("F'(u0)*du0#t"));
    EXPECT_EQ(total_derivative(P("Int(F,u0)"), 0, s), P("F(u0)*du0#t"));
}

TEST(TotalDerivative, BaseVariablesForExactComputations) {
    JetSpace s;
    EXPECT_EQ(total_derivative(P("u^2*t"), 0, s), P("2*u*du#t*t + u^2"));
}

TEST(TotalDerivative, MixedPartialsAreIdentified) {
    JetSpace s;
    s.independent = {"x", "y"};
    s.max_derivative = 2;
    Expr ux = s.du(0, 0, 0), uy = s.du(0, 0, 1);
    EXPECT_EQ(total_derivative(ux, 1, s), total_derivative(uy, 0, s));
    EXPECT_EQ(total_derivative(ux, 1, s), s.ddu(0, 0, 1, 0));
}

TEST(TotalDerivative, OverflowPastOrderRPlusOne) {
    JetSpace s;
    s.max_derivative = 1;
    EXPECT_NO_THROW(total_derivative(P("du0#t"), 0, s));
    EXPECT_THROW(total_derivative(P("ddu0#t#t"), 0, s), DerivativeOverflow);
}

TEST(TotalDerivative, OscillatorEnergyIsConservedOnShell) {
    Model m = load_builtin("oscillator-arbitraryF");
    auto L = m.perturbed();
    OnShell on = solve_on_shell(L);
    const GoldenRecord& xi1 = m.golden.at(0);
    ASSERT_EQ(xi1.name, "Xi1");
    auto q = golden_quantity(m, xi1);
    ASSERT_EQ(q.size(), 2u);
    for (const auto& order : q) {
        Expr d = substitute(total_derivative(order[0], 0, L.space), on.rules);
        EXPECT_TRUE(is_identically_zero(d)) << to_string(d);
    }
}

TEST(TotalDerivative, ReducesToPartialWithoutJets) {
    JetSpace s;
    s.independent = {"x", "y"};
    testing::RandomExpr rnd(3, {P("x"), P("y"), P("sin(x)"), P("cos(y)"), P("(x^2+y^2)^(-1/2)"), P("a")});
    for (int n = 0; n < 100; ++n) {
        Expr e = rnd.polynomial(4, 3);
        EXPECT_EQ(total_derivative(e, 0, s), differentiate(e, P("x")));
        EXPECT_EQ(total_derivative(e, 1, s), differentiate(e, P("y")));
    }
}

TEST(Monomials, OneDependentFirstOrder) {
    JetSpace s;
    std::vector<Expr> expected{Expr(1), P("du0#t"), P("du1#t"), P("du0#t^2"), P("du0#t*du1#t")};
    EXPECT_EQ(enumerate_monomials(s, 2, 1), expected);
}

TEST(Monomials, DegreeZero) {
    JetSpace s;
    EXPECT_EQ(enumerate_monomials(s, 0, 1), std::vector<Expr>{Expr(1)});
}

TEST(Monomials, TwoDependents) {
    JetSpace s;
    s.dependent = {"u", "v"};
    std::vector<Expr> expected{Expr(1), P("du0#t"), P("dv0#t")};
    EXPECT_EQ(enumerate_monomials(s, 1, 0), expected);
}

TEST(Monomials, CountMatchesCombinatorics) {
    // Generators of weight 0 and 1 for m dependents: degree <= 2 with total
    // weight <= 1 gives 1 + 2m + m(m+1)/2 + m^2 monomials.
    for (int m = 1; m <= 3; ++m) {
        JetSpace s;
        s.dependent.clear();
        for (int a = 0; a < m; ++a) s.dependent.push_back(std::string(1, static_cast<char>('u' + a)));
        auto monos = enumerate_monomials(s, 2, 1);
        EXPECT_EQ(static_cast<int>(monos.size()), 1 + 2 * m + m * (m + 1) / 2 + m * m) << m;
        EXPECT_EQ(first_derivative_generators(s, 1).size(), static_cast<std::size_t>(2 * m));
    }
}

TEST(JetSpace, Lookup) {
    JetSpace s;
    s.independent = {"t"};
    s.dependent = {"x1", "y1"};
    EXPECT_EQ(s.dependent_index("y1"), 1);
    EXPECT_EQ(s.dependent_index("z"), -1);
    EXPECT_EQ(s.independent_index("t"), 0);
    EXPECT_EQ(parse("dy1_1#t", s.parse_context()), s.du(1, 1, 0));
}

}  // namespace
}  // namespace approxsym
