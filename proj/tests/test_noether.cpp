#include <gtest/gtest.h>

#include "approxsym/errors.hpp"
#include "approxsym/models.hpp"
#include "approxsym/noether.hpp"
#include "approxsym/parse.hpp"
#include "approxsym/print.hpp"
#include "approxsym/simplify.hpp"

namespace approxsym {
namespace {

class Oscillator : public ::testing::Test {
protected:
    void SetUp() override {
        model = load_builtin("oscillator-arbitraryF");
        L = model.perturbed();
        on = solve_on_shell(L);
    }
    Expr P(const std::string& s) const { return model.parse_expr(s); }
    ApproximateGenerator gen(const std::string& xi, const std::string& eta) const {
        return expand_generator(L.space, {P(xi)}, {P(eta)});
    }
    Gauge gauge(const std::string& phi0, const std::string& phi1) const { return {{P(phi0)}, {P(phi1)}}; }
    const GoldenRecord& record(const std::string& name) const {
        for (const auto& r : model.golden)
            if (r.name == name) return r;
        throw std::runtime_error("no record " + name);
    }

    Model model;
    PerturbedLagrangian L;
    OnShell on;
};

TEST_F(Oscillator, LagrangianExpansion) {
    EXPECT_EQ(L.L[0], P("1/2*(du0#t^2 - u0^2)"));
    EXPECT_EQ(L.L[1], P("du0#t*du1#t - u0*u1 - Int(F,u0)"));
    EXPECT_TRUE(L.linear_in_top_order());
}

TEST_F(Oscillator, EulerLagrangeHierarchy) {
    auto el = euler_lagrange(L);
    ASSERT_EQ(el.size(), 1u);
    EXPECT_EQ(el[0][0], P("-(ddu0#t#t + u0)"));
    EXPECT_EQ(el[0][1], P("-(ddu1#t#t + u1 + F(u0))"));
    EXPECT_EQ(on.rules.at(P("ddu0#t#t")), P("-u0"));
    EXPECT_EQ(on.rules.at(P("ddu1#t#t")), P("-u1 - F(u0)"));
}

TEST(EulerLagrange, FreeParticle) {
    JetSpace s;
    s.order_p = 0;
    auto L = PerturbedLagrangian::from_source(parse("1/2*du#t^2"), s);
    auto el = euler_lagrange(L);
    EXPECT_EQ(el[0][0], parse("-ddu0#t#t"));
}

TEST(EulerLagrange, CoupledSystemAtEpsZero) {
    Model m = load_builtin("coupled-system");
    auto el = euler_lagrange(m.perturbed());
    ASSERT_EQ(el.size(), 2u);
    // The v-equation is -u (ü + α/u³) at ε = 0.
    EXPECT_EQ(el[1][0], m.parse_expr("-u0*(ddu0#t#t + alpha/u0^3)"));
}

TEST(EulerLagrange, DegenerateKineticTerm) {
    JetSpace s;
    s.order_p = 0;
    s.dependent = {"u", "v"};
    auto L = PerturbedLagrangian::from_source(parse("1/2*(du#t + dv#t)^2 - u^2"), s);
    EXPECT_THROW(solve_on_shell(L), CannotSolveForLeadingDerivative);
}

TEST_F(Oscillator, ResidualOfGoldenPairs) {
    EXPECT_TRUE(variational_residual(gen("1", "0"), L, zero_gauge(L.space)).is_zero());
    EXPECT_TRUE(variational_residual(gen("eps*sin(2*t)", "eps*cos(2*t)*u"), L, gauge("0", "sin(2*t)*u0^2")).is_zero());
}

TEST_F(Oscillator, ResidualDetectsWrongGauge) {
    // The gauge enters as +D_t φ.
    EpsSeries r = variational_residual(gen("1", "0"), L, gauge("0", "t"));
    EXPECT_EQ(r[0], Expr(0));
    EXPECT_EQ(r[1], Expr(1));
}

TEST_F(Oscillator, EnergyFlux) {
    auto law = noether_fluxes(gen("1", "0"), L, zero_gauge(L.space), on);
    EXPECT_TRUE(law.verified);
    EXPECT_EQ(law.classification, LawClass::Nontrivial);
    EXPECT_EQ(law.fluxes[0][0], P("-1/2*(du0#t^2 + u0^2)"));
    EXPECT_EQ(law.fluxes[1][0], P("-(du0#t*du1#t + u0*u1 + Int(F,u0))"));
}

TEST_F(Oscillator, Xi2Flux) {
    auto law = noether_fluxes(gen("0", "eps*sin(t)"), L, gauge("0", "-cos(t)*u0"), on);
    EXPECT_TRUE(law.verified);
    EXPECT_EQ(law.fluxes[0][0], Expr(0));
    EXPECT_EQ(law.fluxes[1][0], P("sin(t)*du0#t - cos(t)*u0"));
}

TEST_F(Oscillator, NotAVariationalSymmetry) {
    EXPECT_THROW(noether_fluxes(gen("0", "u"), L, zero_gauge(L.space), on), NotAVariationalSymmetry);
    EXPECT_THROW(noether_fluxes(gen("1", "0"), L, gauge("0", "t"), on), NotAVariationalSymmetry);
}

TEST_F(Oscillator, LiteralAssemblyIsGuarded) {
    EXPECT_THROW(noether_fluxes(gen("1", "0"), L, zero_gauge(L.space), on, FluxAssembly::Literal), FormulaMismatch);
    // Where both pairings coincide the literal route verifies.
    EXPECT_TRUE(noether_fluxes(gen("0", "eps*sin(t)"), L, gauge("0", "-cos(t)*u0"), on, FluxAssembly::Literal).verified);
}

TEST_F(Oscillator, DivergenceCheck) {
    auto I1 = golden_quantity(model, record("Xi1"));
    auto ok = divergence_check(I1, L, on);
    EXPECT_EQ(ok, (std::vector<bool>{true, true}));

    std::vector<std::vector<Expr>> not_conserved{{P("u0")}, {Expr(0)}};
    EXPECT_FALSE(divergence_check(not_conserved, L, on)[0]);

    auto I6 = golden_quantity(model, record("Xi6"));
    EXPECT_EQ(divergence_check(I6, L, on), (std::vector<bool>{true, true}));
    EXPECT_EQ(I6[0][0], Expr(0));
    EXPECT_EQ(I6[1][0], I1[0][0]);
}

TEST_F(Oscillator, MakeLawClassifies) {
    auto bogus = make_law({{P("u0")}, {Expr(0)}}, L, on);
    EXPECT_FALSE(bogus.verified);
    EXPECT_EQ(bogus.classification, LawClass::Unverified);

    auto trivial = make_law({{Expr(0)}, {Expr(0)}}, L, on);
    EXPECT_TRUE(trivial.verified);
    EXPECT_EQ(trivial.classification, LawClass::Trivial);
}

TEST_F(Oscillator, ClassifyFindsEpsShift) {
    auto I1 = make_law(golden_quantity(model, record("Xi1")), L, on);
    auto I6 = make_law(golden_quantity(model, record("Xi6")), L, on);
    auto deps = classify({I1, I6}, L, model.constant_names());
    ASSERT_EQ(deps.size(), 1u);
    Dependency d = deps[0];
    ASSERT_EQ(d.size(), 2u);
    // Normalize so the I6 term has coefficient 1: I6 - ε I1.
    std::sort(d.begin(), d.end(), [](const auto& a, const auto& b) { return a.law > b.law; });
    Expr scale = Expr(1) / d[0].coefficient;
    EXPECT_EQ(d[0].law, 1u);
    EXPECT_EQ(d[0].shift, 0);
    EXPECT_EQ(d[1].law, 0u);
    EXPECT_EQ(d[1].shift, 1);
    EXPECT_EQ(d[1].coefficient * scale, Expr(-1));

    EXPECT_TRUE(classify({I1}, L, model.constant_names()).empty());
}

TEST_F(Oscillator, InSpanIgnoresAdditiveConstants) {
    auto I1 = make_law(golden_quantity(model, record("Xi1")), L, on);
    auto target = I1.fluxes;
    target[0][0] = Expr(3) * target[0][0] + Expr(7);
    target[1][0] = Expr(3) * target[1][0];
    EXPECT_TRUE(in_span(target, {I1}, L, model.constant_names()));
    target[1][0] = target[1][0] + P("u0");
    EXPECT_FALSE(in_span(target, {I1}, L, model.constant_names()));
}

TEST(Noether, ThreeBodyEnergy) {
    Model m = load_builtin("three-body");
    auto L = m.perturbed();
    auto on = solve_on_shell(L);
    auto g = expand_generator(L.space, {parse("1")}, std::vector<Expr>(6, Expr(0)));
    auto law = noether_fluxes(g, L, zero_gauge(L.space), on);
    EXPECT_TRUE(law.verified);
    // Minus the kinetic plus potential energy of bodies 1 and 2 at order zero.
    Expr E0 = m.parse_expr("1/2*m1*(dx1_0#t^2 + dy1_0#t^2) + 1/2*m2*(dx2_0#t^2 + dy2_0#t^2)"
                           " - G*m1*m2*((x1_0 - x2_0)^2 + (y1_0 - y2_0)^2)^(-1/2)");
    EXPECT_TRUE(is_identically_zero(law.fluxes[0][0] + E0)) << to_string(law.fluxes[0][0]);
}

}  // namespace
}  // namespace approxsym
