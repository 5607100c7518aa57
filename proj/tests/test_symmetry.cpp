#include <gtest/gtest.h>

#include "approxsym/calculus.hpp"
#include "approxsym/errors.hpp"
#include "approxsym/models.hpp"
#include "approxsym/parse.hpp"
#include "approxsym/print.hpp"
#include "approxsym/simplify.hpp"
#include "approxsym/symmetry.hpp"
#include "random_expr.hpp"

namespace approxsym {
namespace {

Expr P(const std::string& s) { return parse(s); }

JetSpace space(int p, int r = 2) {
    JetSpace s;
    s.order_p = p;
    s.max_derivative = r;
    return s;
}

ApproximateGenerator gen(const JetSpace& s, const std::string& xi, const std::string& eta) {
    return expand_generator(s, {P(xi)}, {P(eta)});
}

bool same(const ApproximateGenerator& a, const ApproximateGenerator& b) {
    return combine(Expr(1), a, Expr(-1), b).is_zero();
}

TEST(Generator, ExpandedComponents) {
    JetSpace s = space(1);
    auto g = gen(s, "2*t", "u + eps*u^2");
    EXPECT_EQ(g.xi(0, 0), P("2*t"));
    EXPECT_EQ(g.xi(1, 0), Expr(0));
    EXPECT_EQ(g.eta(0, 0), P("u0"));
    EXPECT_EQ(g.eta(1, 0), P("u1 + u0^2"));
    EXPECT_TRUE(g.respects_order());
    EXPECT_FALSE(ApproximateGenerator(s, {{P("u1")}, {Expr(0)}}, {{Expr(0)}, {Expr(0)}}).respects_order());
}

TEST(Prolong, EpsSinT) {
    JetSpace s = space(1);
    auto g = gen(s, "0", "eps*sin(t)");
    g.prolong(1);
    EXPECT_EQ(g.prolongation(0, 0, {0}), Expr(0));
    EXPECT_EQ(g.prolongation(1, 0, {0}), P("cos(t)"));
}

TEST(Prolong, TimeTranslationProlongsToZero) {
    JetSpace s = space(1);
    auto g = gen(s, "1", "0");
    g.prolong(2);
    for (int k = 0; k <= 1; ++k) {
        EXPECT_EQ(g.prolongation(k, 0, {0}), Expr(0));
        EXPECT_EQ(g.prolongation(k, 0, {0, 0}), Expr(0));
    }
}

TEST(Prolong, ClassicalScaling) {
    JetSpace s = space(0);
    auto g = gen(s, "t", "u");
    g.prolong(2);
    EXPECT_EQ(g.prolongation(0, 0, {0}), Expr(0));
    EXPECT_EQ(g.prolongation(0, 0, {0, 0}), P("-ddu0#t#t"));
}

TEST(Prolong, CacheMissing) {
    JetSpace s = space(1);
    auto g = gen(s, "t", "u");
    EXPECT_THROW(g.prolongation(0, 0, {0}), CacheMissing);
    g.prolong(1);
    EXPECT_THROW(g.prolongation(0, 0, {0, 0}), CacheMissing);
    EXPECT_THROW(apply(g, EpsSeries({P("ddu0#t#t"), Expr(0)}), 2), CacheMissing);
}

TEST(Prolong, RoutesAgreeOnOscillatorGenerators) {
    JetSpace s = space(1);
    EXPECT_TRUE(prolongation_routes_agree(s, {P("eps*sin(2*t)")}, {P("eps*cos(2*t)*u")}, 2));
    EXPECT_TRUE(prolongation_routes_agree(s, {P("4*eps*sin(t)")}, {P("-3*cos(t) + eps*2*cos(t)*u")}, 2));
    EXPECT_TRUE(prolongation_routes_agree(s, {P("t^2")}, {P("t*u")}, 2));
}

TEST(Prolong, RoutesAgreeOnRandomGenerators) {
    JetSpace s = space(1);
    testing::RandomExpr rnd(23, {P("t"), P("u"), P("sin(t)"), P("eps")});
    for (int n = 0; n < 100; ++n) {
        Expr xi = rnd.polynomial(3, 3), eta = rnd.polynomial(3, 3);
        EXPECT_TRUE(prolongation_routes_agree(s, {xi}, {eta}, 2)) << to_string(xi) << " | " << to_string(eta);
    }
}

TEST(Prolong, EpsShiftCommutesWithProlongation) {
    JetSpace s = space(2);
    testing::RandomExpr rnd(29, {P("t"), P("u"), P("cos(t)"), P("eps")});
    for (int n = 0; n < 100; ++n) {
        auto g = expand_generator(s, {rnd.polynomial(3, 2)}, {rnd.polynomial(3, 2)});
        auto shifted = eps_shift(g);
        g.prolong(2);
        shifted.prolong(2);
        for (const MultiIndex& J : {MultiIndex{0}, MultiIndex{0, 0}})
            for (int k = 0; k <= 2; ++k)
                EXPECT_EQ(shifted.prolongation(k, 0, J), k == 0 ? Expr(0) : g.prolongation(k - 1, 0, J));
    }
}

TEST(Apply, TimeTranslationOnAutonomousSeries) {
    JetSpace s = space(1);
    auto g = gen(s, "1", "0");
    g.prolong(1);
    EXPECT_TRUE(apply(g, EpsSeries({P("du0#t^2 - u0^2"), P("u0*u1 + du0#t*du1#t")}), 1).is_zero());
}

TEST(Apply, OscillatorXi2) {
    Model m = load_builtin("oscillator-arbitraryF");
    auto L = m.perturbed();
    auto g = gen(L.space, "0", "eps*sin(t)");
    g.prolong(1);
    EpsSeries r = apply(g, L.L, 1);
    EXPECT_EQ(r[0], Expr(0));
    EXPECT_EQ(r[1], P("-sin(t)*u0 + cos(t)*du0#t"));
    EXPECT_EQ(r[1], total_derivative(P("cos(t)*u0"), 0, L.space));
}

TEST(Apply, CoupledScalingLeavesActionInvariant) {
    Model m = load_builtin("coupled-system");
    auto L = m.perturbed();
    auto g = expand_generator(L.space, {P("2*t")}, {P("u"), P("0")});
    g.prolong(1);
    EpsSeries dxi = EpsSeries({total_derivative(g.xi(0, 0), 0, L.space), total_derivative(g.xi(1, 0), 0, L.space)});
    EXPECT_TRUE(series_add(apply(g, L.L, 1), series_mul(L.L, dxi)).is_zero());
}

TEST(Commutator, SelfBracketVanishes) {
    JetSpace s = space(1);
    auto g = gen(s, "t^2", "t*u");
    EXPECT_TRUE(commutator(g, g).is_zero());
}

TEST(Commutator, OscillatorXi1Xi2) {
    JetSpace s = space(1);
    auto c = commutator(gen(s, "1", "0"), gen(s, "0", "eps*sin(t)"));
    EXPECT_TRUE(same(c, gen(s, "0", "eps*cos(t)")));
}

TEST(Commutator, CoupledXi1Xi2) {
    Model m = load_builtin("coupled-system");
    const JetSpace& s = m.space;
    auto xi1 = expand_generator(s, {P("1")}, {P("0"), P("0")});
    auto xi2 = expand_generator(s, {P("t^2")}, {P("t*u"), P("0")});
    auto xi3 = expand_generator(s, {P("2*t")}, {P("u"), P("0")});
    EXPECT_TRUE(same(commutator(xi1, xi2), xi3));
}

TEST(Commutator, AntisymmetricAndBilinear) {
    JetSpace s = space(1);
    testing::RandomExpr rnd(31, {P("t"), P("u"), P("sin(t)"), P("eps")});
    for (int n = 0; n < 100; ++n) {
        auto a = expand_generator(s, {rnd.polynomial(2, 2)}, {rnd.polynomial(2, 2)});
        auto b = expand_generator(s, {rnd.polynomial(2, 2)}, {rnd.polynomial(2, 2)});
        auto c = expand_generator(s, {rnd.polynomial(2, 2)}, {rnd.polynomial(2, 2)});
        Expr x(rnd.coefficient()), y(rnd.coefficient());
        EXPECT_TRUE(same(commutator(a, b), combine(Expr(-1), commutator(b, a), Expr(0), a)));
        EXPECT_TRUE(same(commutator(combine(x, a, y, b), c),
                         combine(x, commutator(a, c), y, commutator(b, c))));
    }
}

}  // namespace
}  // namespace approxsym
