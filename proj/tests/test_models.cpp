#include <gtest/gtest.h>

#include <algorithm>

#include "approxsym/errors.hpp"
#include "approxsym/models.hpp"
#include "approxsym/noether.hpp"

namespace approxsym {
namespace {

const GoldenRecord& record(const Model& m, const std::string& name) {
    for (const auto& r : m.golden)
        if (r.name == name) return r;
    throw std::runtime_error("no record " + name);
}

TEST(Builtins, NamesAndLookup) {
    auto names = builtin_names();
    for (const char* n : {"oscillator-arbitraryF", "oscillator-quadratic", "oscillator-cubic-inverse", "coupled-system",
                          "three-body", "free-particle"})
        EXPECT_NE(std::find(names.begin(), names.end(), n), names.end()) << n;
    EXPECT_THROW(load_builtin("no-such-model"), UnknownModel);
}

TEST(Builtins, RecordCounts) {
    EXPECT_EQ(load_builtin("oscillator-arbitraryF").golden.size(), 6u);
    EXPECT_EQ(load_builtin("coupled-system").golden.size(), 6u);
    EXPECT_EQ(load_builtin("three-body").golden.size(), 16u);
}

class Golden : public ::testing::TestWithParam<std::string> {};

TEST_P(Golden, AllRecordsPass) {
    Model m = load_builtin(GetParam());
    GoldenReport rep = golden_check(m);
    for (const auto& r : rep.records) EXPECT_TRUE(r.passed) << r.name << ": " << r.message;
    for (const auto& d : rep.dependencies) EXPECT_TRUE(d.passed) << d.name << ": " << d.message;
    EXPECT_TRUE(rep.all_passed());
    EXPECT_EQ(rep.passed(), rep.records.size());
}

TEST_P(Golden, ZerothOrderConservedUnderUnperturbedLagrangian) {
    Model m = load_builtin(GetParam());
    auto L = m.perturbed();
    auto on = solve_on_shell(L);
    for (const auto& r : m.golden) {
        if (r.quantity.empty()) continue;
        auto q = golden_quantity(m, r.erratum.empty() ? r : GoldenRecord{r.name, r.xi, r.eta, r.phi, r.corrected});
        EXPECT_TRUE(divergence_check(q, L, on).at(0)) << r.name;
    }
}

TEST_P(Golden, JsonRoundTrip) {
    Model m = load_builtin(GetParam());
    Model back = model_from_json(model_to_json(m));
    EXPECT_EQ(back.name, m.name);
    EXPECT_EQ(back.lagrangian(), m.lagrangian());
    EXPECT_EQ(back.golden.size(), m.golden.size());
    EXPECT_EQ(model_to_json(back), model_to_json(m));
}

INSTANTIATE_TEST_SUITE_P(Builtins, Golden,
                         ::testing::Values("oscillator-arbitraryF", "oscillator-quadratic", "oscillator-cubic-inverse",
                                           "coupled-system", "three-body", "free-particle"),
                         [](const auto& info) {
                             std::string n = info.param;
                             for (char& c : n)
                                 if (c == '-') c = '_';
                             return n;
                         });

TEST(GoldenCheck, CorruptedEtaFails) {
    Model m = load_builtin("oscillator-arbitraryF");
    for (auto& r : m.golden)
        if (r.name == "Xi2") r.eta[0] = "-eps*sin(t)";
    GoldenReport rep = golden_check(m);
    EXPECT_FALSE(rep.all_passed());
    for (const auto& r : rep.records)
        if (r.name == "Xi2") {
            EXPECT_FALSE(r.passed);
            EXPECT_FALSE(r.residual_zero);
        }
}

TEST(GoldenCheck, CorruptedGaugeFails) {
    Model m = load_builtin("coupled-system");
    for (auto& r : m.golden)
        if (r.name == "Xi5") r.phi[0] = "eps*u0^2*v0";
    EXPECT_FALSE(golden_check(m).all_passed());
}

TEST(GoldenCheck, WrongQuantityFails) {
    Model m = load_builtin("free-particle");
    for (auto& r : m.golden)
        if (r.name == "Xi3") r.quantity[0] = "t*du0#t + u0";
    GoldenReport rep = golden_check(m);
    EXPECT_FALSE(rep.all_passed());
}

TEST(GoldenCheck, OscillatorMatchLevels) {
    GoldenReport rep = golden_check(load_builtin("oscillator-arbitraryF"));
    for (const auto& r : rep.records) {
        if (r.name == "Xi1") {
            EXPECT_EQ(r.match, MatchLevel::Scaled);
            ASSERT_TRUE(r.scale.has_value());
            EXPECT_EQ(*r.scale, Expr(-1));
        }
        if (r.name == "Xi5") EXPECT_EQ(r.match, MatchLevel::Equivalent);
    }
}

TEST(GoldenCheck, ThreeBodyErratumIsFlagged) {
    GoldenReport rep = golden_check(load_builtin("three-body"));
    for (const auto& r : rep.records) {
        if (r.name == "Xi10") {
            EXPECT_TRUE(r.flagged);
            EXPECT_NE(r.corrected_match, MatchLevel::Mismatch);
            EXPECT_TRUE(r.passed);
        }
        if (r.name == "Xi11" || r.name == "Xi12") EXPECT_EQ(r.classification, LawClass::Trivial);
    }
}

TEST(ThreeBody, BarycenterQuantityIsConserved) {
    Model m = load_builtin("three-body");
    auto L = m.perturbed();
    auto on = solve_on_shell(L);
    auto q = golden_quantity(m, record(m, "Xi3a"));
    EXPECT_EQ(divergence_check(q, L, on), (std::vector<bool>{true, true}));
    auto law = noether_fluxes(golden_generator(m, record(m, "Xi3a")), L, golden_gauge(m, record(m, "Xi3a")), on);
    EXPECT_TRUE(law.verified);
    EXPECT_TRUE(in_span(q, {law}, L, m.constant_names()));
}

TEST(Schema, ErrorsNamePath) {
    auto j = model_to_json(load_builtin("free-particle"));
    j["lagrangian"] = 3;
    try {
        model_from_json(j);
        FAIL() << "expected ModelError";
    } catch (const ModelError& e) {
        EXPECT_NE(std::string(e.what()).find("/lagrangian"), std::string::npos) << e.what();
    }
    auto k = model_to_json(load_builtin("free-particle"));
    k["order_p"] = -1;
    EXPECT_THROW(model_from_json(k), ModelError);
    k = model_to_json(load_builtin("free-particle"));
    k.erase("dependent");
    EXPECT_THROW(model_from_json(k), ModelError);
    EXPECT_THROW(model_from_json(nlohmann::json::array()), ModelError);
}

TEST(Schema, ParseErrorInLagrangian) {
    auto j = model_to_json(load_builtin("free-particle"));
    j["lagrangian"] = "1/2*du#t^2 +";
    EXPECT_ANY_THROW(model_from_json(j).lagrangian());
}

}  // namespace
}  // namespace approxsym
