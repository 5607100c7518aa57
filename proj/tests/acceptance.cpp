#include <chrono>
#include <cstdio>
#include <functional>
#include <string>

#include "approxsym/determine.hpp"
#include "approxsym/errors.hpp"
#include "approxsym/models.hpp"
#include "approxsym/noether.hpp"
#include "approxsym/numverify.hpp"
#include "approxsym/parse.hpp"
#include "property_suites.hpp"

using namespace approxsym;

namespace {

struct Check {
    bool ok = true;
    std::string detail;

    void require(bool cond, const std::string& what) {
        if (!cond && ok) detail = what;
        ok = ok && cond;
    }
};

const RecordReport* find_record(const GoldenReport& rep, const std::string& name) {
    for (const auto& r : rep.records)
        if (r.name == name) return &r;
    return nullptr;
}

bool record_passed(const GoldenReport& rep, const std::string& name) {
    const RecordReport* r = find_record(rep, name);
    return r && r->passed;
}

const GoldenRecord& golden(const Model& m, const std::string& name) {
    for (const auto& r : m.golden)
        if (r.name == name) return r;
    throw Error("no golden record " + name);
}

void ac1(Check& c) {
    Model m = load_builtin("oscillator-arbitraryF");
    auto L = m.perturbed();
    c.require(m.golden.size() == 6, "expected 6 golden pairs");
    for (const auto& r : m.golden)
        c.require(variational_residual(golden_generator(m, r), L, golden_gauge(m, r)).is_zero(),
                  r.name + " residual nonzero");
}

void ac2(Check& c) {
    Model m = load_builtin("oscillator-arbitraryF");
    GoldenReport rep = golden_check(m);
    auto L = m.perturbed();
    auto on = solve_on_shell(L);
    for (const auto& r : rep.records) {
        c.require(r.flux_verified && r.quantity_verified, r.name + " divergence check failed");
        c.require(r.match != MatchLevel::Mismatch && r.match != MatchLevel::None, r.name + " quantity not reproduced");
        c.require(r.passed, r.name + ": " + r.message);
        for (bool ok : divergence_check(golden_quantity(m, golden(m, r.name)), L, on))
            c.require(ok, r.name + " quantity not conserved at every order");
    }
}

void ac3(Check& c) {
    GoldenReport quad = golden_check(load_builtin("oscillator-quadratic"));
    GoldenReport cubic = golden_check(load_builtin("oscillator-cubic-inverse"));
    for (const char* n : {"Xi7a", "Xi8a"}) c.require(record_passed(quad, n), std::string(n) + " failed");
    for (const char* n : {"Xi7b", "Xi8b"}) c.require(record_passed(cubic, n), std::string(n) + " failed");
}

void ac4(Check& c) {
    GoldenReport rep = golden_check(load_builtin("coupled-system"));
    c.require(rep.records.size() == 6, "expected 6 generators");
    for (const auto& r : rep.records) c.require(r.passed, r.name + ": " + r.message);
    int detected = 0;
    for (const auto& d : rep.dependencies) {
        c.require(d.holds && d.detected, d.name + " not detected");
        detected += d.detected ? 1 : 0;
    }
    c.require(detected == 3, "expected 3 eps-shift dependencies");
}

void ac5(Check& c) {
    GoldenReport rep = golden_check(load_builtin("three-body"));
    for (const char* n : {"Xi1", "Xi2a", "Xi2b", "Xi3a", "Xi3b", "Xi4"})
        c.require(record_passed(rep, n), std::string(n) + " failed");
    for (const char* n : {"Xi11", "Xi12"}) {
        const RecordReport* r = find_record(rep, n);
        c.require(r && r->passed && r->classification == LawClass::Trivial, std::string(n) + " not trivial");
    }
    bool found = false;
    for (const auto& d : rep.dependencies)
        if (d.checked && d.name.find("m1 m2 I6") != std::string::npos) found = d.holds && d.detected;
    c.require(found, "m1 m2 I6 dependency not detected");
    c.require(rep.all_passed(), "three-body golden check failed");
}

void ac6(Check& c) {
    const std::pair<const char*, std::size_t> expected[] = {{"oscillator-arbitraryF", 6},
                                                           {"oscillator-quadratic", 8},
                                                           {"oscillator-cubic-inverse", 8},
                                                           {"coupled-system", 6}};
    for (const auto& [name, dim] : expected) {
        Model m = load_builtin(name);
        auto L = m.perturbed();
        auto sols = solve(extract(L, default_ansatz(m.space, m.oscillatory), m.constants));
        c.require(sols.size() == dim, std::string(name) + " dimension " + std::to_string(sols.size()));
        for (const auto& r : m.golden)
            c.require(in_solution_span(sols, golden_generator(m, r), golden_gauge(m, r), m.constant_names()),
                      std::string(name) + " " + r.name + " outside span");
    }
}

struct Oscillator {
    Model model = load_builtin("oscillator-quadratic");
    PerturbedLagrangian L = model.perturbed();
    OnShell on = solve_on_shell(L);
    NumericModel numeric = compile_numeric(L, model.numeric.bindings);
    std::map<Expr, double, ExprLess> initial;
    ConservationLaw law;

    Oscillator() {
        for (const auto& [k, v] : model.numeric.initial) initial[model.parse_expr(k)] = v;
        law = make_law(golden_quantity(model, golden(model, "Xi1")), L, on);
    }
};

void ac7(Check& c) {
    Oscillator o;
    auto y0 = o.numeric.initial_state(o.initial);
    auto d = drift(o.numeric, integrate(o.numeric, y0, Grid{0.0, 20.0, 1e-3}), o.law);
    for (std::size_t k = 0; k < d.drift.size(); ++k)
        c.require(d.drift[k] <= 1e-8, "drift I" + std::to_string(k) + " = " + std::to_string(d.drift[k]));
    auto coarse = drift(o.numeric, integrate(o.numeric, y0, Grid{0.0, 20.0, 1e-2}), o.law);
    auto fine = drift(o.numeric, integrate(o.numeric, y0, Grid{0.0, 20.0, 5e-3}), o.law);
    for (std::size_t k = 0; k < coarse.drift.size(); ++k)
        c.require(coarse.drift[k] / fine.drift[k] >= 12.0,
                  "halving ratio I" + std::to_string(k) + " = " + std::to_string(coarse.drift[k] / fine.drift[k]));
}

void ac8(Check& c) {
    Oscillator o;
    auto rep = eps_sweep(o.model.lagrangian(), o.model.space, o.law, o.model.numeric.bindings, o.initial,
                         Grid{o.model.numeric.t0, o.model.numeric.t1, o.model.numeric.h}, {1e-2, 1e-3, 1e-4});
    c.require(rep.points.size() == 3, "sweep incomplete");
    c.require(rep.slope >= 1.9, "slope " + std::to_string(rep.slope));
}

void ac9(Check& c) {
    for (const auto& s : testing::all_suites(20240611u, 120)) {
        c.require(s.instances >= 100, s.name + " ran " + std::to_string(s.instances) + " instances");
        c.require(s.ok(), s.name + ": " + s.first_failure);
    }
}

void ac10(Check& c) {
    Model m = load_builtin("oscillator-arbitraryF");
    for (auto& r : m.golden)
        if (r.name == "Xi4") r.phi[0] = "-eps*sin(2*t)*u0^2";
    c.require(!golden_check(m).all_passed(), "corrupted record passed golden_check");

    Model clean = load_builtin("oscillator-arbitraryF");
    auto L = clean.perturbed();
    auto on = solve_on_shell(L);
    bool raised = false;
    try {
        noether_fluxes(expand_generator(L.space, {Expr(0)}, {clean.parse_expr("u")}), L, zero_gauge(L.space), on);
    } catch (const NotAVariationalSymmetry&) {
        raised = true;
    }
    c.require(raised, "NotAVariationalSymmetry not raised");

    auto ok = divergence_check({{clean.parse_expr("du0#t")}, {Expr(0)}}, L, on);
    c.require(!ok.at(0), "non-conserved flux passed divergence_check");
}

}  // namespace

int main() {
    struct Criterion {
        const char* id;
        const char* title;
        double budget;
        std::function<void(Check&)> run;
    };
    const Criterion criteria[] = {
        {"AC1", "arbitrary-F residuals vanish", 10.0, ac1},
        {"AC2", "arbitrary-F conserved quantities", 0.0, ac2},
        {"AC3", "concrete-F branch pairs", 0.0, ac3},
        {"AC4", "coupled system and eps-shift dependencies", 0.0, ac4},
        {"AC5", "three-body laws and dependency", 60.0, ac5},
        {"AC6", "determine dimensions and membership", 0.0, ac6},
        {"AC7", "RK4 drift and order", 5.0, ac7},
        {"AC8", "eps-sweep slope", 30.0, ac8},
        {"AC9", "property suites", 0.0, ac9},
        {"AC10", "negative controls", 0.0, ac10},
    };
    int failed = 0;
    for (const auto& cr : criteria) {
        Check c;
        const auto start = std::chrono::steady_clock::now();
        try {
            cr.run(c);
        } catch (const std::exception& e) {
            c.require(false, std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (cr.budget > 0.0) c.require(secs < cr.budget, "over time budget");
        std::printf("%s %s %s (%.2f s)%s%s\n", cr.id, c.ok ? "PASS" : "FAIL", cr.title, secs, c.ok ? "" : ": ",
                    c.detail.c_str());
        failed += c.ok ? 0 : 1;
    }
    return failed == 0 ? 0 : 1;
}
