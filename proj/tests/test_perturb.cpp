#include <gtest/gtest.h>

#include "approxsym/calculus.hpp"
#include "approxsym/errors.hpp"
#include "approxsym/parse.hpp"
#include "approxsym/perturb.hpp"
#include "approxsym/print.hpp"
#include "random_expr.hpp"

namespace approxsym {
namespace {

Expr P(const std::string& s) { return parse(s); }

JetSpace space(int p) {
    JetSpace s;
    s.order_p = p;
    return s;
}

void expect_series(const EpsSeries& s, const std::vector<std::string>& expected) {
    ASSERT_EQ(s.c.size(), expected.size());
    for (std::size_t k = 0; k < expected.size(); ++k)
        EXPECT_EQ(s[k], P(expected[k])) << "order " << k << ": " << to_string(s[k]);
}

TEST(Expand, OscillatorLagrangian) {
    expect_series(expand(P("1/2*(du#t^2 - u^2) - eps*Int(F,u)"), space(1)),
                  {"1/2*(du0#t^2 - u0^2)", "du0#t*du1#t - u0*u1 - Int(F,u0)"});
}

TEST(Expand, ArbitraryFunction) { expect_series(expand(P("F(u)"), space(1)), {"F(u0)", "F'(u0)*u1"}); }

TEST(Expand, SecondOrderTaylor) {
    expect_series(expand(P("F(u)"), space(2)), {"F(u0)", "F'(u0)*u1", "F'(u0)*u2 + 1/2*F''(u0)*u1^2"});
    expect_series(expand(P("Int(F,u)"), space(2)), {"Int(F,u0)", "F(u0)*u1", "F(u0)*u2 + 1/2*F'(u0)*u1^2"});
}

TEST(Expand, EpsFreeExpressionInExpansionCoordinates) {
    expect_series(expand(P("u0^2*sin(t)"), space(2)), {"u0^2*sin(t)", "0", "0"});
}

TEST(Expand, CoupledLagrangian) {
    JetSpace s = space(1);
    s.dependent = {"u", "v"};
    EpsSeries L = expand(P("v*du#t^2 + u*du#t*dv#t - alpha*v/u^2 + eps*F(v)/u^2"), s);
    expect_series(L, {"v0*du0#t^2 + u0*du0#t*dv0#t - alpha*v0/u0^2",
                      "v1*du0#t^2 + 2*v0*du0#t*du1#t + u1*du0#t*dv0#t + u0*du1#t*dv0#t + u0*du0#t*dv1#t"
                      " - alpha*v1/u0^2 + 2*alpha*v0*u1/u0^3 + F(v0)/u0^2"});
}

TEST(Expand, InversePowersOfU) {
    expect_series(expand(P("kappa/u^3"), space(1)), {"kappa*u0^(-3)", "-3*kappa*u1*u0^(-4)"});
    expect_series(expand(P("(1 + eps*u)^(-1)"), space(2)), {"1", "-u0", "u0^2 - u1"});
}

TEST(Expand, SingularAtEpsZero) {
    EXPECT_THROW(expand(P("1/eps"), space(1)), SingularAtEpsZero);
    EXPECT_THROW(expand(P("u/(eps*t)"), space(1)), SingularAtEpsZero);
}

TEST(Expand, RespectsOrder) {
    EXPECT_TRUE(respects_order(expand(P("exp(u)*du#t^2 + eps*u^3"), space(2))));
    EXPECT_FALSE(respects_order(EpsSeries({P("u1"), P("0")})));
}

TEST(Series, Arithmetic) {
    EpsSeries a({P("a"), P("b")}), b({P("c"), P("d")});
    expect_series(series_mul(a, b), {"a*c", "a*d + b*c"});
    expect_series(series_shift(a), {"0", "a"});
    EXPECT_TRUE(series_add(a, series_scale(a, Expr(-1))).is_zero());
    expect_series(series_sub(a, b), {"a - c", "b - d"});
    EXPECT_THROW(series_add(a, EpsSeries(2)), OrderMismatch);
    EXPECT_THROW(series_mul(a, EpsSeries(0)), OrderMismatch);
}

TEST(Series, Powers) {
    EpsSeries a({P("a"), P("b"), P("c")});
    expect_series(series_pow(a, 2), {"a^2", "2*a*b", "b^2 + 2*a*c"});
    expect_series(series_pow(EpsSeries({P("1"), P("x"), P("0")}), Rational(1, 2)), {"1", "x/2", "-x^2/8"});
}

TEST(Recursion, JetCoordinates) {
    JetSpace s = space(2);
    EXPECT_EQ(recursion_R(P("u0"), s), P("u1"));
    EXPECT_EQ(recursion_R(P("u1"), s), P("2*u2"));
    EXPECT_EQ(recursion_R(P("u0^2"), s), P("2*u0*u1"));
    EXPECT_EQ(recursion_R(P("du0#t"), s), P("du1#t"));
    EXPECT_EQ(recursion_R(P("t^2*sin(t)"), s), Expr(0));
}

TEST(Recursion, FamilyFunctions) {
    JetSpace s = space(1);
    Expr xi0 = family_function("xi", 0, s);
    Expr xi1 = family_function("xi", 1, s);
    EXPECT_EQ(to_string(xi0), "xi[0](t,u0)");
    EXPECT_EQ(recursion_R(xi0, s), xi1 + fn_partial(xi0, 1) * P("u1"));
    Expr d = fn_partial(xi0, 1);
    EXPECT_EQ(recursion_R(d, s), fn_partial(xi1, 1) + fn_partial(d, 1) * P("u1"));
}

TEST(Recursion, MissingFamilyIndex) {
    EXPECT_THROW(recursion_R(P("F(u0)"), space(1)), MissingFamilyIndex);
}

FunctionResolver family_resolver(const std::vector<Expr>& members) {
    return [members](const std::string& name, int family) -> std::optional<FunctionDef> {
        if (name != "xi" || family < 0 || family >= static_cast<int>(members.size())) return std::nullopt;
        return FunctionDef{{"#0", "#1"}, members[static_cast<std::size_t>(family)], std::nullopt};
    };
}

TEST(BuildInfinitesimals, SeedSquare) {
    JetSpace s = space(1);
    EpsSeries xi = build_infinitesimals(family_function("xi", 0, s), s);
    Expr xi1 = substitute_functions(xi[1], family_resolver({pow(Expr::symbol("#1"), 2)}));
    EXPECT_EQ(xi1, family_function("xi", 1, s) + P("2*u0*u1"));
}

TEST(BuildInfinitesimals, ConstantAndLinearSeeds) {
    JetSpace s = space(1);
    expect_series(build_infinitesimals(Expr(1), s), {"1", "0"});
    expect_series(build_infinitesimals(P("u0"), s), {"u0", "u1"});
    expect_series(build_infinitesimals(P("t*u0"), space(2)), {"t*u0", "t*u1", "t*u2"});
}

// Expanding ξ(t, Σ ε^k u_(k); ε) agrees with the recursion applied to the
// family ξ_(k) = ∂^k ξ/∂ε^k at ε = 0, i.e. k! times the ε^k coefficient.
TEST(BuildInfinitesimals, ConsistentWithExpansion) {
    Expr t = P("t"), u = P("u");
    testing::RandomExpr rnd(17, {t, u, P("sin(t)")});
    for (int p = 1; p <= 2; ++p) {
        JetSpace s = space(p);
        for (int n = 0; n < 100; ++n) {
            std::vector<Expr> members;
            Expr source;
            Expr eps_k(1);
            long factorial = 1;
            for (int k = 0; k <= p; ++k) {
                if (k > 0) factorial *= k;
                Expr c = rnd.polynomial(3, 3);
                source = source + eps_k * c;
                eps_k = eps_k * P("eps");
                members.push_back(Expr(factorial) * substitute(c, {{t, Expr::symbol("#0")}, {u, Expr::symbol("#1")}}));
            }
            EpsSeries expected = expand(source, s);
            EpsSeries built = build_infinitesimals(family_function("xi", 0, s), s);
            for (int k = 0; k <= p; ++k)
                EXPECT_EQ(substitute_functions(built[k], family_resolver(members)), expected[k])
                    << "p = " << p << " k = " << k << " source " << to_string(source);
            EXPECT_TRUE(respects_order(built));
        }
    }
}

}  // namespace
}  // namespace approxsym
