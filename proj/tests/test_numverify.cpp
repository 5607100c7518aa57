#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "approxsym/errors.hpp"
#include "approxsym/jet.hpp"
#include "approxsym/models.hpp"
#include "approxsym/numverify.hpp"
#include "approxsym/parse.hpp"
#include "approxsym/print.hpp"

namespace approxsym {
namespace {

Expr P(const std::string& s) { return parse(s); }

/// First-order system y' = rhs(y, t) over the listed atoms.
NumericModel first_order(const std::vector<Expr>& coords, const std::vector<Expr>& rhs) {
    NumericModel m;
    m.coordinates = coords;
    for (std::size_t i = 0; i < coords.size(); ++i) m.slots[coords[i]] = i;
    m.slots[P("t")] = coords.size();
    for (const auto& r : rhs) m.rhs.push_back(m.compile(r));
    return m;
}

struct Case {
    Model model;
    PerturbedLagrangian L;
    OnShell on;
    NumericModel numeric;
    std::map<Expr, double, ExprLess> initial;
    Grid grid;
};

Case setup(const std::string& name) {
    Case s{load_builtin(name), {}, {}, {}, {}, {}};
    s.L = s.model.perturbed();
    s.on = solve_on_shell(s.L);
    s.numeric = compile_numeric(s.L, s.model.numeric.bindings);
    for (const auto& [k, v] : s.model.numeric.initial) s.initial[s.model.parse_expr(k)] = v;
    s.grid = Grid{s.model.numeric.t0, s.model.numeric.t1, s.model.numeric.h};
    return s;
}

ConservationLaw golden_law(const Case& s, const std::string& name) {
    for (const auto& r : s.model.golden)
        if (r.name == name) return make_law(golden_quantity(s.model, r), s.L, s.on);
    throw std::runtime_error("no record " + name);
}

TEST(Program, MatchesLibm) {
    Slots slots{{P("x"), 0}, {P("y"), 1}};
    std::map<std::string, double> b{{"a", 0.5}};
    Program p = Program::compile(P("a*sin(x)^2 + exp(y)*cos(x) - log(y)/x^3 + (x^2 + y^2)^(-1/2) + sqrt(y)"), slots, b);
    double x = 0.7, y = 1.3;
    double expected = 0.5 * std::sin(x) * std::sin(x) + std::exp(y) * std::cos(x) - std::log(y) / (x * x * x) +
                      1.0 / std::sqrt(x * x + y * y) + std::sqrt(y);
    EXPECT_NEAR(p.eval(std::vector<double>{x, y}), expected, 1e-13);
}

TEST(Program, UnboundSymbols) {
    Slots slots{{P("x"), 0}};
    EXPECT_THROW(Program::compile(P("x*a"), slots, {}), UnboundSymbol);
    EXPECT_THROW(Program::compile(P("F(x)"), slots, {}), UnboundSymbol);
}

TEST(Integrate, ExponentialDecay) {
    NumericModel m = first_order({P("u0")}, {P("-u0")});
    auto tr = integrate(m, {1.0}, Grid{0.0, 1.0, 1e-3});
    EXPECT_EQ(tr.t.size(), 1001u);
    EXPECT_NEAR(tr.states.back()[0], std::exp(-1.0), 1e-10);
}

TEST(Integrate, ZeroRightHandSide) {
    NumericModel m = first_order({P("u0"), P("v0")}, {Expr(0), Expr(0)});
    auto tr = integrate(m, {0.25, -3.0}, Grid{0.0, 2.0, 0.1});
    for (const auto& y : tr.states) EXPECT_EQ(y, (std::vector<double>{0.25, -3.0}));
}

TEST(Integrate, NonFiniteState) {
    // y' = y^2 blows up at t = 1.
    NumericModel m = first_order({P("u0")}, {P("u0^2")});
    EXPECT_THROW(integrate(m, {1.0}, Grid{0.0, 2.0, 1e-2}), NonFiniteState);
}

TEST(Integrate, InvalidGrid) {
    NumericModel m = first_order({P("u0")}, {Expr(0)});
    EXPECT_THROW(integrate(m, {0.0}, Grid{0.0, 1.0, 0.0}), ModelError);
    EXPECT_THROW(integrate(m, {0.0}, Grid{1.0, 0.0, 0.1}), ModelError);
    EXPECT_THROW(integrate(m, {0.0, 1.0}, Grid{0.0, 1.0, 0.1}), ModelError);
}

TEST(CompileNumeric, QuadraticOscillatorRhs) {
    Case s = setup("oscillator-quadratic");
    std::vector<std::string> names;
    for (const auto& c : s.numeric.coordinates) names.push_back(to_string(c));
    EXPECT_EQ(names, (std::vector<std::string>{"u0", "u1", "du0#t", "du1#t"}));
    std::vector<double> y{0.3, -0.8, 1.1, 0.4, 2.0};
    std::vector<double> expected{1.1, 0.4, -0.3, 0.8 - 0.09};
    for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(s.numeric.rhs[i].eval(y), expected[i], 1e-15) << names[i];
}

TEST(CompileNumeric, FreeParticle) {
    Case s = setup("free-particle");
    ASSERT_EQ(s.numeric.dim(), 2u);
    std::vector<double> y{0.3, 1.7, 0.0};
    EXPECT_EQ(s.numeric.rhs[0].eval(y), 1.7);
    EXPECT_EQ(s.numeric.rhs[1].eval(y), 0.0);
}

TEST(CompileNumeric, ThreeBodyNewtonianAcceleration) {
    Case s = setup("three-body");
    // u's then du's, each ordered by ε-order and body coordinate; t last.
    std::vector<double> y(s.numeric.dim() + 1, 0.0);
    std::map<std::string, double> at{{"x1_0", -1.0}, {"y1_0", 0.2}, {"x2_0", 1.0}, {"y2_0", -0.1},
                                     {"x3_0", 0.5}, {"y3_0", 2.0}};
    for (std::size_t i = 0; i < s.numeric.dim(); ++i) {
        auto it = at.find(to_string(s.numeric.coordinates[i]));
        if (it != at.end()) y[i] = it->second;
    }
    double dx = -2.0, dy = 0.3, r3 = std::pow(dx * dx + dy * dy, 1.5);
    for (std::size_t i = 0; i < s.numeric.dim(); ++i) {
        std::string c = to_string(s.numeric.coordinates[i]);
        if (c == "dx1_0#t") EXPECT_NEAR(s.numeric.rhs[i].eval(y), -dx / r3, 1e-14);
        if (c == "dy1_0#t") EXPECT_NEAR(s.numeric.rhs[i].eval(y), -dy / r3, 1e-14);
        if (c == "dx2_0#t") EXPECT_NEAR(s.numeric.rhs[i].eval(y), dx / r3, 1e-14);
    }
}

TEST(CompileNumeric, UnboundParameters) {
    Model m = load_builtin("oscillator-quadratic");
    EXPECT_THROW(compile_numeric(m.perturbed(), {}), UnboundSymbol);
    Model c = load_builtin("coupled-system");
    EXPECT_THROW(compile_numeric(c.perturbed(), {{"alpha", 1.0}}), UnboundSymbol);
}

TEST(Integrate, UnperturbedOscillatorIsCosine) {
    Case s = setup("oscillator-quadratic");
    auto tr = integrate(s.numeric, s.numeric.initial_state(s.initial), Grid{0.0, 20.0, 1e-3});
    double worst = 0.0;
    for (std::size_t i = 0; i < tr.t.size(); ++i) worst = std::max(worst, std::abs(tr.states[i][0] - std::cos(tr.t[i])));
    EXPECT_LT(worst, 1e-8);
}

TEST(Integrate, TimeReversal) {
    Case s = setup("oscillator-quadratic");
    auto y0 = s.numeric.initial_state(s.initial);
    y0[2] = 0.3;
    auto forward = integrate(s.numeric, y0, Grid{0.0, 20.0, 1e-3});
    auto y = forward.states.back();
    // The hierarchy is autonomous and even in the velocities.
    y[2] = -y[2];
    y[3] = -y[3];
    auto back = integrate(s.numeric, y, Grid{0.0, 20.0, 1e-3}).states.back();
    back[2] = -back[2];
    back[3] = -back[3];
    for (std::size_t i = 0; i < y0.size(); ++i) EXPECT_NEAR(back[i], y0[i], 1e-6);
}

TEST(Drift, OscillatorEnergyBothOrders) {
    Case s = setup("oscillator-quadratic");
    auto law = golden_law(s, "Xi1");
    auto tr = integrate(s.numeric, s.numeric.initial_state(s.initial), Grid{0.0, 20.0, 1e-3});
    auto d = drift(s.numeric, tr, law);
    ASSERT_EQ(d.drift.size(), 2u);
    EXPECT_LE(d.drift[0], 1e-8);
    EXPECT_LE(d.drift[1], 1e-8);
}

TEST(Drift, NonConservedQuantity) {
    Case s = setup("oscillator-quadratic");
    ConservationLaw law;
    law.fluxes = {{P("u0")}, {Expr(0)}};
    auto tr = integrate(s.numeric, s.numeric.initial_state(s.initial), Grid{0.0, 20.0, 1e-3});
    EXPECT_GT(drift(s.numeric, tr, law).drift[0], 1.0);
}

TEST(Drift, RungeKuttaOrder) {
    Case s = setup("oscillator-quadratic");
    auto law = golden_law(s, "Xi1");
    auto y0 = s.numeric.initial_state(s.initial);
    auto coarse = drift(s.numeric, integrate(s.numeric, y0, Grid{0.0, 20.0, 1e-2}), law);
    auto fine = drift(s.numeric, integrate(s.numeric, y0, Grid{0.0, 20.0, 5e-3}), law);
    for (std::size_t k = 0; k < 2; ++k) EXPECT_GE(coarse.drift[k] / fine.drift[k], 12.0) << k;
    double err = richardson_error(s.numeric, y0, Grid{0.0, 20.0, 1e-2});
    EXPECT_GT(err, 0.0);
    EXPECT_LT(err, 1e-6);
}

TEST(Drift, SymbolicDivergenceVanishesAlongTrajectory) {
    Case s = setup("oscillator-quadratic");
    auto law = golden_law(s, "Xi1");
    // D_t I_k before on-shell substitution, evaluated with the integrator's accelerations.
    Slots slots = s.numeric.slots;
    std::vector<Expr> accel;
    for (std::size_t i = 0; i < s.numeric.dim(); ++i) {
        const Expr& c = s.numeric.coordinates[i];
        if (c.jet_derivative_order() == 1) {
            accel.push_back(total_derivative(c, 0, s.L.space));
            slots[accel.back()] = s.numeric.dim() + accel.size();
        }
    }
    auto tr = integrate(s.numeric, s.numeric.initial_state(s.initial), Grid{0.0, 5.0, 1e-2});
    for (const auto& order : law.fluxes) {
        Program dI = Program::compile(total_derivative(order[0], 0, s.L.space), slots, s.numeric.bindings);
        for (std::size_t step = 0; step < tr.t.size(); step += 25) {
            std::vector<double> arg(tr.states[step]);
            arg.push_back(tr.t[step]);
            std::vector<double> extra;
            for (std::size_t i = 0; i < s.numeric.dim(); ++i)
                if (s.numeric.coordinates[i].jet_derivative_order() == 1) extra.push_back(s.numeric.rhs[i].eval(arg));
            arg.insert(arg.end(), extra.begin(), extra.end());
            EXPECT_LT(std::abs(dI.eval(arg)), 1e-12);
        }
    }
}

TEST(Drift, ThreeBodyMomentum) {
    Case s = setup("three-body");
    auto tr = integrate(s.numeric, s.numeric.initial_state(s.initial), s.grid);
    for (const char* name : {"Xi2a", "Xi2b"}) {
        auto d = drift(s.numeric, tr, golden_law(s, name));
        for (double x : d.drift) EXPECT_LE(x, 1e-8) << name;
    }
}

TEST(Sweep, OscillatorScalingSlope) {
    Case s = setup("oscillator-quadratic");
    auto law = golden_law(s, "Xi1");
    auto rep = eps_sweep(s.model.lagrangian(), s.model.space, law, s.model.numeric.bindings, s.initial, s.grid,
                         {1e-2, 1e-3, 1e-4});
    ASSERT_EQ(rep.points.size(), 3u);
    EXPECT_GE(rep.slope, 1.9);
    EXPECT_LE(rep.slope, 2.1);
}

TEST(Sweep, NonConservedQuantityHasFlatSlope) {
    Case s = setup("oscillator-quadratic");
    ConservationLaw law;
    law.fluxes = {{P("du0#t")}, {Expr(0)}};
    auto rep = eps_sweep(s.model.lagrangian(), s.model.space, law, s.model.numeric.bindings, s.initial, s.grid,
                         {1e-2, 1e-3, 1e-4});
    EXPECT_LT(std::abs(rep.slope), 0.1);
}

TEST(Csv, HeaderAndRows) {
    Case s = setup("oscillator-quadratic");
    auto law = golden_law(s, "Xi1");
    auto tr = integrate(s.numeric, s.numeric.initial_state(s.initial), Grid{0.0, 0.01, 1e-3});
    std::ostringstream os;
    write_csv(os, s.numeric, tr, &law);
    std::istringstream in(os.str());
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "t,u0,u1,du0#t,du1#t,I0,I1");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    EXPECT_EQ(rows, 11);
}

}  // namespace
}  // namespace approxsym
