#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "approxsym/calculus.hpp"
#include "approxsym/linalg.hpp"
#include "approxsym/noether.hpp"

namespace approxsym {

/// Declared arbitrary function; a definition makes it concrete.
struct FunctionSpec {
    int arity = 1;
    std::optional<FunctionDef> definition;
};

/// Expected generator, gauge and conserved quantity. Every entry is one
/// expression per component, written in expansion coordinates with `eps`.
struct GoldenRecord {
    std::string name;
    std::vector<std::string> xi;
    std::vector<std::string> eta;
    std::vector<std::string> phi;
    /// Empty when no quantity is given.
    std::vector<std::string> quantity;
    /// Expected classification of the computed law: "nontrivial" or "trivial".
    std::string expect = "nontrivial";
    /// Non-empty when the listed quantity is known not to be this generator's
    /// law; the record then passes only if the mismatch is detected and
    /// `corrected` matches instead.
    std::string erratum;
    std::vector<std::string> corrected;
    std::string note;
};

/// Σ coefficient·ε^shift·I(law) ≈ 0 among golden quantities.
struct DependencyRecord {
    struct Term {
        std::string law;
        int shift = 0;
        std::string coefficient;
    };
    std::string name;
    std::vector<Term> terms;
    /// Relations that need a time antiderivative are documentation only.
    bool checked = true;
    std::string note;
};

struct NumericSetup {
    bool present = false;
    std::map<std::string, double> bindings;
    /// Initial values keyed by coordinate text (`u0`, `du0#t`); absent ones are 0.
    std::map<std::string, double> initial;
    double t0 = 0.0;
    double t1 = 10.0;
    double h = 1e-3;
};

struct Model {
    std::string name;
    std::string description;
    JetSpace space;
    std::string lagrangian_source;
    Assumptions constants;
    std::map<std::string, FunctionSpec> functions;
    bool oscillatory = false;
    /// Family key ("xi", "eta1", "phi0", ...) to basis expressions; nullopt selects the default ansatz.
    std::optional<std::map<std::string, std::vector<std::string>>> ansatz;
    std::vector<GoldenRecord> golden;
    std::vector<DependencyRecord> dependencies;
    NumericSetup numeric;

    std::vector<std::string> constant_names() const;
    ParseContext context() const;
    FunctionResolver resolver() const;
    /// Parses against the model's space and substitutes concrete functions.
    Expr parse_expr(const std::string& text) const;
    Expr lagrangian() const;
    PerturbedLagrangian perturbed() const;
};

std::vector<std::string> builtin_names();
/// Throws UnknownModel.
Model load_builtin(const std::string& name);
/// Schema-validated; throws ModelError naming the offending path.
Model model_from_json(const nlohmann::json& j);
nlohmann::json model_to_json(const Model& m);

/// Expands per-component expressions (with `eps`) into [k][component].
std::vector<std::vector<Expr>> expand_components(const Model& m, const std::vector<std::string>& texts,
                                                 std::size_t expected);
ApproximateGenerator golden_generator(const Model& m, const GoldenRecord& r);
Gauge golden_gauge(const Model& m, const GoldenRecord& r);
/// Quantity as fluxes [k][i]; empty when the record has none.
std::vector<std::vector<Expr>> golden_quantity(const Model& m, const GoldenRecord& r);

enum class MatchLevel { None, Exact, Scaled, Equivalent, Mismatch };
std::string to_string(MatchLevel l);

struct RecordReport {
    std::string name;
    bool residual_zero = false;
    bool flux_verified = false;
    LawClass classification = LawClass::Unverified;
    bool expect_ok = false;
    /// Divergence check on the golden quantity itself.
    bool quantity_verified = false;
    MatchLevel match = MatchLevel::None;
    /// Constant c with quantity = c·flux for Exact/Scaled.
    std::optional<Expr> scale;
    /// Erratum records: match level of the corrected quantity.
    bool flagged = false;
    MatchLevel corrected_match = MatchLevel::None;
    bool passed = false;
    std::string message;
    ConservationLaw law;
};

struct DependencyReport {
    std::string name;
    bool checked = false;
    /// The combination vanishes up to O(ε^{p+1}) and additive constants.
    bool holds = false;
    /// The combination lies in the span of the dependencies found by classify.
    bool detected = false;
    bool passed = false;
    std::string message;
};

struct GoldenReport {
    std::string model;
    std::vector<RecordReport> records;
    std::vector<DependencyReport> dependencies;
    std::size_t passed() const;
    bool all_passed() const;
};

GoldenReport golden_check(const Model& m);

}  // namespace approxsym
