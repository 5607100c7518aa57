#include "approxsym/models.hpp"

#include <set>

#include "approxsym/errors.hpp"
#include "approxsym/parse.hpp"
#include "approxsym/print.hpp"
#include "approxsym/simplify.hpp"

namespace approxsym {

using nlohmann::json;

namespace {

// Golden data is kept in the same JSON format accepted from model files.

const char* const kOscillatorCommon = R"json(
  {"name": "Xi1", "xi": ["1"], "eta": ["0"], "phi": ["0"],
   "quantity": ["1/2*(du0#t^2 + u0^2) + eps*(du0#t*du1#t + u0*u1 + Int(F,u0))"]},
  {"name": "Xi2", "xi": ["0"], "eta": ["eps*sin(t)"], "phi": ["-eps*cos(t)*u0"],
   "quantity": ["eps*(sin(t)*du0#t - cos(t)*u0)"]},
  {"name": "Xi3", "xi": ["0"], "eta": ["eps*cos(t)"], "phi": ["eps*sin(t)*u0"],
   "quantity": ["eps*(cos(t)*du0#t + sin(t)*u0)"]},
  {"name": "Xi4", "xi": ["eps*sin(2*t)"], "eta": ["eps*cos(2*t)*u0"], "phi": ["eps*sin(2*t)*u0^2"],
   "quantity": ["eps*((sin(t)*du0#t - cos(t)*u0)*(cos(t)*du0#t + sin(t)*u0))"]},
  {"name": "Xi5", "xi": ["eps*cos(2*t)"], "eta": ["-eps*sin(2*t)*u0"], "phi": ["eps*cos(2*t)*u0^2"],
   "quantity": ["eps*(sin(t)*du0#t - cos(t)*u0)^2"]},
  {"name": "Xi6", "xi": ["eps"], "eta": ["0"], "phi": ["0"],
   "quantity": ["eps*(1/2*(du0#t^2 + u0^2) + eps*(du0#t*du1#t + u0*u1 + Int(F,u0)))"]}
)json";

const char* const kOscillatorDependencies = R"json(
  {"name": "I6 = eps I1", "terms": [{"law": "Xi6", "shift": 0, "coefficient": "1"},
                                    {"law": "Xi1", "shift": 1, "coefficient": "-1"}]}
)json";

std::string oscillator_model(const std::string& name, const std::string& description, const std::string& constants,
                             const std::string& function, const std::string& extra_golden,
                             const std::string& numeric) {
    return R"j({"schema": 1, "name": ")j" + name + R"j(", "description": ")j" + description +
           R"j(", "independent": ["t"], "dependent": ["u"], "order_p": 1,
  "lagrangian": "1/2*(du#t^2 - u^2) - eps*Int(F,u)",
  "constants": )j" + constants + R"j(, "functions": {"F": )j" + function + R"j(},
  "oscillatory": true,
  "golden": [)j" + kOscillatorCommon + extra_golden + R"j(],
  "dependencies": [)j" + kOscillatorDependencies + "]" + numeric + "}";
}

const char* const kQuadraticExtra = R"json(,
  {"name": "Xi7a", "xi": ["4*eps*sin(t)"],
   "eta": ["-3*cos(t) + eps*(3*delta*t*sin(t) + 2*cos(t)*u0)"],
   "phi": ["-3*sin(t)*u0 + eps*(sin(t)*u0^2 - 3*delta*(t*cos(t) + sin(t))*u0 - 3*sin(t)*u1 - 3*delta^2*sin(t))"],
   "quantity": ["cos(t)*du0#t + sin(t)*u0 + eps*(2/3*sin(t)*du0#t^2 - (2/3*cos(t)*u0 + delta*t*sin(t))*du0#t + sin(t)/3*u0^2 + delta*(t*cos(t) + sin(t))*u0 + cos(t)*du1#t + sin(t)*u1 + delta^2*sin(t))"]},
  {"name": "Xi8a", "xi": ["4*eps*cos(t)"],
   "eta": ["3*sin(t) + eps*(3*delta*t*cos(t) - 2*sin(t)*u0)"],
   "phi": ["-3*cos(t)*u0 + eps*(cos(t)*u0^2 + 3*delta*(t*sin(t) - cos(t))*u0 - 3*cos(t)*u1 - 3*delta^2*cos(t))"],
   "quantity": ["sin(t)*du0#t - cos(t)*u0 + eps*(-2/3*cos(t)*du0#t^2 - (2/3*sin(t)*u0 - delta*t*cos(t))*du0#t - cos(t)/3*u0^2 + delta*(t*sin(t) - cos(t))*u0 + sin(t)*du1#t - cos(t)*u1 - delta^2*cos(t))"]}
)json";

const char* const kCubicExtra = R"json(,
  {"name": "Xi7b", "xi": ["cos(2*t)"], "eta": ["-sin(2*t)*(u0 + eps*u1)"],
   "phi": ["cos(2*t)*u0^2 + eps*2*cos(2*t)*u0*u1"],
   "quantity": ["cos(2*t)*(du0#t^2 - u0^2)/2 + sin(2*t)*du0#t*u0 + eps*((cos(2*t)*du1#t + sin(2*t)*u1)*du0#t + (sin(2*t)*du1#t - cos(2*t)*u1)*u0 - kappa*cos(2*t)/(2*u0^2))"]},
  {"name": "Xi8b", "xi": ["sin(2*t)"], "eta": ["cos(2*t)*(u0 + eps*u1)"],
   "phi": ["sin(2*t)*u0^2 + eps*2*sin(2*t)*u0*u1"],
   "quantity": ["sin(2*t)*(du0#t^2 - u0^2)/2 - cos(2*t)*du0#t*u0 + eps*((sin(2*t)*du1#t - cos(2*t)*u1)*du0#t - (cos(2*t)*du1#t + sin(2*t)*u1)*u0 - kappa*sin(2*t)/(2*u0^2))"]}
)json";

const char* const kOscillatorNumeric = R"json(,
  "initial": {"u0": 1, "du0#t": 0, "u1": 0, "du1#t": 0},
  "grid": {"t0": 0, "t1": 20, "h": 0.001})json";

/// Replaces every `{{key}}` by its text; values may use earlier keys.
std::string fill(std::string text, const std::vector<std::pair<std::string, std::string>>& parts) {
    for (auto it = parts.rbegin(); it != parts.rend(); ++it) {
        const std::string key = "{{" + it->first + "}}";
        for (std::size_t at = text.find(key); at != std::string::npos; at = text.find(key, at + it->second.size()))
            text.replace(at, key.size(), it->second);
    }
    return text;
}

const std::vector<std::pair<std::string, std::string>> kCoupledParts = {
    {"E0", "du0#t^2*v0 + du0#t*dv0#t*u0 + alpha*v0/u0^2"},
    {"E1", "du0#t^2*v1 + du0#t*dv0#t*u1 + 2*du0#t*du1#t*v0 + du0#t*dv1#t*u0 + dv0#t*du1#t*u0 + "
           "alpha*(u0*v1 - 2*v0*u1)/u0^3 - F(v0)/u0^2"},
};

const char* const kCoupled = R"json({"schema": 1, "name": "coupled-system",
  "description": "coupled second-order system from v u'^2 + u u' v' - alpha v/u^2 + eps F(v)/u^2",
  "independent": ["t"], "dependent": ["u", "v"], "order_p": 1,
  "lagrangian": "v*du#t^2 + u*du#t*dv#t - alpha*v/u^2 + eps*F(v)/u^2",
  "constants": {"alpha": {"assume": "nonzero"}},
  "functions": {"F": {"arity": 1}},
  "oscillatory": false,
  "golden": [
    {"name": "Xi1", "xi": ["1"], "eta": ["0", "0"], "phi": ["0"],
     "quantity": ["{{E0}} + eps*({{E1}})"]},
    {"name": "Xi2", "xi": ["t^2"], "eta": ["t*(u0 + eps*u1)", "0"],
     "phi": ["-u0^2*v0 - eps*u0*(u0*v1 + 2*v0*u1)"],
     "quantity": ["t^2*({{E0}}) - t*(2*du0#t*u0*v0 + dv0#t*u0^2) + u0^2*v0 + eps*(t^2*({{E1}}) - t*(2*du0#t*(u0*v1 + u1*v0) + 2*dv0#t*u0*u1 + 2*du1#t*u0*v0 + dv1#t*u0^2) + u0^2*v1 + 2*u0*v0*u1)"]},
    {"name": "Xi3", "xi": ["2*t"], "eta": ["u0 + eps*u1", "0"], "phi": ["0"],
     "quantity": ["2*t*({{E0}}) - 2*du0#t*u0*v0 - dv0#t*u0^2 + eps*(2*t*({{E1}}) - (2*du0#t*(u0*v1 + u1*v0) + 2*dv0#t*u0*u1 + 2*du1#t*u0*v0 + dv1#t*u0^2))"]},
    {"name": "Xi4", "xi": ["eps"], "eta": ["0", "0"], "phi": ["0"], "quantity": ["eps*({{E0}})"]},
    {"name": "Xi5", "xi": ["eps*t^2"], "eta": ["eps*t*u0", "0"], "phi": ["-eps*u0^2*v0"],
     "quantity": ["eps*(t^2*({{E0}}) - t*(2*du0#t*u0*v0 + dv0#t*u0^2) + u0^2*v0)"]},
    {"name": "Xi6", "xi": ["2*eps*t"], "eta": ["eps*u0", "0"], "phi": ["0"],
     "quantity": ["eps*(2*t*({{E0}}) - 2*du0#t*u0*v0 - dv0#t*u0^2)"]}
  ],
  "dependencies": [
    {"name": "I4 = eps I1", "terms": [{"law": "Xi4", "shift": 0, "coefficient": "1"}, {"law": "Xi1", "shift": 1, "coefficient": "-1"}]},
    {"name": "I5 = eps I2", "terms": [{"law": "Xi5", "shift": 0, "coefficient": "1"}, {"law": "Xi2", "shift": 1, "coefficient": "-1"}]},
    {"name": "I6 = eps I3", "terms": [{"law": "Xi6", "shift": 0, "coefficient": "1"}, {"law": "Xi3", "shift": 1, "coefficient": "-1"}]}
  ]
})json";

const std::vector<std::pair<std::string, std::string>> kThreeBodyParts = {
    {"R12", "((x1_0 - x2_0)^2 + (y1_0 - y2_0)^2)"},
    {"R13", "((x1_0 - x3_0)^2 + (y1_0 - y3_0)^2)"},
    {"R23", "((x2_0 - x3_0)^2 + (y2_0 - y3_0)^2)"},
    {"E0", "1/2*(m1*(dx1_0#t^2 + dy1_0#t^2) + m2*(dx2_0#t^2 + dy2_0#t^2)) - G*m1*m2*{{R12}}^(-1/2)"},
    {"Px0", "m1*dx1_0#t + m2*dx2_0#t"},
    {"Py0", "m1*dy1_0#t + m2*dy2_0#t"},
    {"Px", "{{Px0}} + eps*(m1*dx1_1#t + m2*dx2_1#t + m3*dx3_0#t)"},
    {"Py", "{{Py0}} + eps*(m1*dy1_1#t + m2*dy2_1#t + m3*dy3_0#t)"},
    {"Cx0", "m1*(t*dx1_0#t - x1_0) + m2*(t*dx2_0#t - x2_0)"},
    {"Cy0", "m1*(t*dy1_0#t - y1_0) + m2*(t*dy2_0#t - y2_0)"},
    {"I50", "(m1*x1_0 + m2*x2_0)*({{Py0}}) - (m1*y1_0 + m2*y2_0)*({{Px0}})"},
    {"Sx", "m1*x1_0 + m2*x2_0 + eps*(m1*x1_1 + m2*x2_1)"},
    {"Sy", "m1*y1_0 + m2*y2_0 + eps*(m1*y1_1 + m2*y2_1)"},
};

const char* const kThreeBody = R"json({"schema": 1, "name": "three-body",
  "description": "planar three-body problem with the third mass of order eps",
  "independent": ["t"], "dependent": ["x1", "y1", "x2", "y2", "x3", "y3"], "order_p": 1,
  "lagrangian": "1/2*(m1*(dx1#t^2 + dy1#t^2) + m2*(dx2#t^2 + dy2#t^2)) + G*m1*m2*((x1 - x2)^2 + (y1 - y2)^2)^(-1/2) + eps*(1/2*m3*(dx3#t^2 + dy3#t^2) + G*m1*m3*((x1 - x3)^2 + (y1 - y3)^2)^(-1/2) + G*m2*m3*((x2 - x3)^2 + (y2 - y3)^2)^(-1/2))",
  "constants": {"G": {"assume": "positive"}, "m1": {"assume": "positive"}, "m2": {"assume": "positive"}, "m3": {"assume": "positive"}},
  "functions": {},
  "oscillatory": false,
  "golden": [
    {"name": "Xi1", "xi": ["1"], "eta": ["0", "0", "0", "0", "0", "0"], "phi": ["0"],
     "quantity": ["{{E0}} + eps*(1/2*m3*(dx3_0#t^2 + dy3_0#t^2) + m1*(dx1_0#t*dx1_1#t + dy1_0#t*dy1_1#t) + m2*(dx2_0#t*dx2_1#t + dy2_0#t*dy2_1#t) - G*m1*m3*{{R13}}^(-1/2) - G*m2*m3*{{R23}}^(-1/2) + G*m1*m2*{{R12}}^(-3/2)*((x1_0 - x2_0)*(x1_1 - x2_1) + (y1_0 - y2_0)*(y1_1 - y2_1)))"]},
    {"name": "Xi2a", "xi": ["0"], "eta": ["1", "0", "1", "0", "1", "0"], "phi": ["0"], "quantity": ["{{Px}}"]},
    {"name": "Xi2b", "xi": ["0"], "eta": ["0", "1", "0", "1", "0", "1"], "phi": ["0"], "quantity": ["{{Py}}"]},
    {"name": "Xi3a", "xi": ["0"], "eta": ["t", "0", "t", "0", "t", "0"],
     "phi": ["-(m1*x1_0 + m2*x2_0) - eps*(m1*x1_1 + m2*x2_1 + m3*x3_0)"],
     "quantity": ["{{Cx0}} + eps*(m1*(t*dx1_1#t - x1_1) + m2*(t*dx2_1#t - x2_1) + m3*(t*dx3_0#t - x3_0))"]},
    {"name": "Xi3b", "xi": ["0"], "eta": ["0", "t", "0", "t", "0", "t"],
     "phi": ["-(m1*y1_0 + m2*y2_0) - eps*(m1*y1_1 + m2*y2_1 + m3*y3_0)"],
     "quantity": ["{{Cy0}} + eps*(m1*(t*dy1_1#t - y1_1) + m2*(t*dy2_1#t - y2_1) + m3*(t*dy3_0#t - y3_0))"]},
    {"name": "Xi4", "xi": ["0"],
     "eta": ["y1_0 + eps*y1_1", "-(x1_0 + eps*x1_1)", "y2_0 + eps*y2_1", "-(x2_0 + eps*x2_1)", "y3_0 + eps*y3_1", "-(x3_0 + eps*x3_1)"],
     "phi": ["0"],
     "quantity": ["m1*(x1_0*dy1_0#t - y1_0*dx1_0#t) + m2*(x2_0*dy2_0#t - y2_0*dx2_0#t) + eps*(m1*(x1_0*dy1_1#t - y1_0*dx1_1#t + x1_1*dy1_0#t - y1_1*dx1_0#t) + m2*(x2_0*dy2_1#t - y2_0*dx2_1#t + x2_1*dy2_0#t - y2_1*dx2_0#t) + m3*(x3_0*dy3_0#t - y3_0*dx3_0#t))"]},
    {"name": "Xi5", "xi": ["0"],
     "eta": ["{{Sy}} + eps*m3*y3_0", "-({{Sx}}) - eps*m3*x3_0", "{{Sy}} + eps*m3*y3_0", "-({{Sx}}) - eps*m3*x3_0", "{{Sy}}", "-({{Sx}})"],
     "phi": ["0"],
     "quantity": ["(m1*x1_0 + m2*x2_0)*({{Py}}) - (m1*y1_0 + m2*y2_0)*({{Px}}) + eps*((m1*x1_1 + m2*x2_1 + m3*x3_0)*({{Py0}}) - (m1*y1_1 + m2*y2_1 + m3*y3_0)*({{Px0}}))"]},
    {"name": "Xi6", "xi": ["0"],
     "eta": ["eps*m2*(y2_0 - y1_0)", "eps*m2*(x1_0 - x2_0)", "-eps*m1*(y2_0 - y1_0)", "-eps*m1*(x1_0 - x2_0)", "0", "0"],
     "phi": ["0"], "quantity": ["eps*((x1_0 - x2_0)*(dy1_0#t - dy2_0#t) - (y1_0 - y2_0)*(dx1_0#t - dx2_0#t))"]},
    {"name": "Xi7", "xi": ["eps"], "eta": ["0", "0", "0", "0", "0", "0"], "phi": ["0"], "quantity": ["eps*({{E0}})"]},
    {"name": "Xi8a", "xi": ["0"], "eta": ["eps", "0", "eps", "0", "eps", "0"], "phi": ["0"], "quantity": ["eps*({{Px0}})"]},
    {"name": "Xi8b", "xi": ["0"], "eta": ["0", "eps", "0", "eps", "0", "eps"], "phi": ["0"], "quantity": ["eps*({{Py0}})"]},
    {"name": "Xi9a", "xi": ["0"], "eta": ["eps*t", "0", "eps*t", "0", "0", "0"], "phi": ["-eps*(m1*x1_0 + m2*x2_0)"],
     "quantity": ["eps*({{Cx0}})"]},
    {"name": "Xi9b", "xi": ["0"], "eta": ["0", "eps*t", "0", "eps*t", "0", "0"], "phi": ["-eps*(m1*y1_0 + m2*y2_0)"],
     "quantity": ["eps*({{Cy0}})"]},
    {"name": "Xi10", "xi": ["0"], "eta": ["eps*y1_0", "-eps*x1_0", "eps*y2_0", "-eps*x2_0", "0", "0"], "phi": ["0"],
     "quantity": ["eps*({{I50}})"],
     "erratum": "listed as eps times the combined-momentum moment; the flux is minus eps times the zeroth-order angular momentum of bodies 1 and 2",
     "corrected": ["eps*(m1*(x1_0*dy1_0#t - y1_0*dx1_0#t) + m2*(x2_0*dy2_0#t - y2_0*dx2_0#t))"]},
    {"name": "Xi11", "xi": ["0"], "eta": ["0", "0", "0", "0", "eps", "0"], "phi": ["0"], "expect": "trivial"},
    {"name": "Xi12", "xi": ["0"], "eta": ["0", "0", "0", "0", "0", "eps"], "phi": ["0"], "expect": "trivial"}
  ],
  "dependencies": [
    {"name": "m1 m2 I6 - eps (m1 + m2) I4 + eps I5", "terms": [
      {"law": "Xi6", "shift": 0, "coefficient": "m1*m2"},
      {"law": "Xi4", "shift": 1, "coefficient": "-(m1 + m2)"},
      {"law": "Xi5", "shift": 1, "coefficient": "1"}]},
    {"name": "I5 = (Int I2 dt) ^ I2", "checked": false, "terms": [],
     "note": "involves a time antiderivative of the momentum"}
  ],
  "bindings": {"G": 1, "m1": 1, "m2": 1, "m3": 1},
  "initial": {"x1_0": -1, "y1_0": 0, "dx1_0#t": 0, "dy1_0#t": -0.5,
              "x2_0": 1, "y2_0": 0, "dx2_0#t": 0, "dy2_0#t": 0.5,
              "x3_0": 0, "y3_0": 4, "dx3_0#t": 0.7, "dy3_0#t": 0},
  "grid": {"t0": 0, "t1": 10, "h": 0.001}
})json";

const char* const kFreeParticle = R"json({"schema": 1, "name": "free-particle",
  "description": "free particle, smoke test",
  "independent": ["t"], "dependent": ["u"], "order_p": 0,
  "lagrangian": "1/2*du#t^2",
  "constants": {}, "functions": {}, "oscillatory": false,
  "golden": [
    {"name": "Xi1", "xi": ["1"], "eta": ["0"], "phi": ["0"], "quantity": ["1/2*du0#t^2"]},
    {"name": "Xi2", "xi": ["0"], "eta": ["1"], "phi": ["0"], "quantity": ["du0#t"]},
    {"name": "Xi3", "xi": ["0"], "eta": ["t"], "phi": ["-u0"], "quantity": ["t*du0#t - u0"]}
  ],
  "dependencies": [],
  "initial": {"u0": 0, "du0#t": 1},
  "grid": {"t0": 0, "t1": 1, "h": 0.001}
})json";

std::string builtin_source(const std::string& name) {
    if (name == "oscillator-arbitraryF")
        return oscillator_model(name, "u'' + u + eps F(u) = 0 with F arbitrary", "{}", R"j({"arity": 1})j", "", "");
    if (name == "oscillator-quadratic")
        return oscillator_model(
            name, "u'' + u + eps (u + delta)^2 = 0", R"j({"delta": {"assume": null}})j",
            R"j({"arity": 1, "params": ["u"], "body": "(u + delta)^2", "antiderivative": "(u + delta)^3/3"})j",
            kQuadraticExtra, std::string(kOscillatorNumeric).insert(1, R"j( "bindings": {"delta": 0},)j"));
    if (name == "oscillator-cubic-inverse")
        return oscillator_model(
            name, "u'' + u + eps kappa/u^3 = 0", R"j({"kappa": {"assume": "nonzero"}})j",
            R"j({"arity": 1, "params": ["u"], "body": "kappa/u^3", "antiderivative": "-kappa/(2*u^2)"})j", kCubicExtra,
            "");
    if (name == "coupled-system") return fill(kCoupled, kCoupledParts);
    if (name == "three-body") return fill(kThreeBody, kThreeBodyParts);
    if (name == "free-particle") return kFreeParticle;
    throw UnknownModel("unknown builtin model '" + name + "'");
}

// ---------------------------------------------------------------------------
// Schema

[[noreturn]] void schema_error(const std::string& path, const std::string& what) {
    throw ModelError("model schema error at " + path + ": " + what);
}

const json& field(const json& j, const std::string& key, const std::string& path) {
    if (!j.is_object()) schema_error(path, "expected an object");
    auto it = j.find(key);
    if (it == j.end()) schema_error(path + "/" + key, "missing");
    return *it;
}

std::string get_string(const json& j, const std::string& path) {
    if (!j.is_string()) schema_error(path, "expected a string");
    return j.get<std::string>();
}

std::vector<std::string> get_strings(const json& j, const std::string& path) {
    if (!j.is_array()) schema_error(path, "expected an array of strings");
    std::vector<std::string> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(get_string(j[i], path + "/" + std::to_string(i)));
    return out;
}

double get_number(const json& j, const std::string& path) {
    if (!j.is_number()) schema_error(path, "expected a number");
    return j.get<double>();
}

std::map<std::string, double> get_number_map(const json& j, const std::string& path) {
    if (!j.is_object()) schema_error(path, "expected an object of numbers");
    std::map<std::string, double> out;
    for (auto it = j.begin(); it != j.end(); ++it) out[it.key()] = get_number(it.value(), path + "/" + it.key());
    return out;
}

Assume parse_assume(const json& j, const std::string& path) {
    if (j.is_null()) return Assume::None;
    const std::string s = get_string(j, path);
    if (s == "nonzero") return Assume::Nonzero;
    if (s == "positive") return Assume::Positive;
    schema_error(path, "expected \"nonzero\", \"positive\" or null");
}

std::optional<std::string> assume_name(Assume a) {
    switch (a) {
        case Assume::Nonzero: return "nonzero";
        case Assume::Positive: return "positive";
        default: return std::nullopt;
    }
}

/// Constant part removed: terms free of every non-constant atom.
Expr drop_constant_terms(const Expr& e, const std::vector<std::string>& constants) {
    std::set<std::string> cs(constants.begin(), constants.end());
    SumBuilder sb;
    for (const Expr& t : terms_of(e)) {
        if (t.is_number()) continue;
        bool constant = true;
        for (const auto& [b, x] : factors_of(t))
            if (!(b.kind() == Kind::Symbol && cs.count(b.name()))) constant = false;
        if (!constant) sb.add(t);
    }
    return sb.build();
}

}  // namespace

// ---------------------------------------------------------------------------

std::vector<std::string> Model::constant_names() const {
    std::vector<std::string> out;
    for (const auto& [name, a] : constants) out.push_back(name);
    return out;
}

ParseContext Model::context() const { return space.parse_context(constant_names(), true); }

FunctionResolver Model::resolver() const {
    auto defs = std::make_shared<std::map<std::string, FunctionDef>>();
    for (const auto& [name, spec] : functions)
        if (spec.definition) defs->emplace(name, *spec.definition);
    return [defs](const std::string& name, int family) -> std::optional<FunctionDef> {
        if (family != kNoFamily) return std::nullopt;
        auto it = defs->find(name);
        if (it == defs->end()) return std::nullopt;
        return it->second;
    };
}

Expr Model::parse_expr(const std::string& text) const {
    Expr e = parse(text, context());
    if (std::any_of(functions.begin(), functions.end(), [](const auto& f) { return f.second.definition.has_value(); }))
        e = substitute_functions(e, resolver());
    return e;
}

Expr Model::lagrangian() const { return parse_expr(lagrangian_source); }

PerturbedLagrangian Model::perturbed() const { return PerturbedLagrangian::from_source(lagrangian(), space); }

std::vector<std::string> builtin_names() {
    return {"oscillator-arbitraryF", "oscillator-quadratic", "oscillator-cubic-inverse",
            "coupled-system",        "three-body",           "free-particle"};
}

Model load_builtin(const std::string& name) {
    const std::string src = builtin_source(name);
    json j;
    try {
        j = json::parse(src);
    } catch (const json::exception& e) {
        throw ModelError("builtin model '" + name + "' is malformed: " + e.what());
    }
    return model_from_json(j);
}

Model model_from_json(const json& j) {
    Model m;
    if (!j.is_object()) schema_error("", "expected an object");
    if (auto it = j.find("schema"); it != j.end() && (!it->is_number_integer() || it->get<int>() != 1))
        schema_error("/schema", "unsupported schema version");
    m.name = get_string(field(j, "name", ""), "/name");
    if (auto it = j.find("description"); it != j.end()) m.description = get_string(*it, "/description");
    m.space.independent = get_strings(field(j, "independent", ""), "/independent");
    m.space.dependent = get_strings(field(j, "dependent", ""), "/dependent");
    if (m.space.independent.empty()) schema_error("/independent", "at least one independent variable required");
    if (m.space.dependent.empty()) schema_error("/dependent", "at least one dependent variable required");
    const json& p = field(j, "order_p", "");
    if (!p.is_number_integer() || p.get<int>() < 0) schema_error("/order_p", "expected a nonnegative integer");
    m.space.order_p = p.get<int>();
    if (auto it = j.find("max_derivative"); it != j.end()) {
        if (!it->is_number_integer() || it->get<int>() < 1) schema_error("/max_derivative", "expected a positive integer");
        m.space.max_derivative = it->get<int>();
    }
    m.lagrangian_source = get_string(field(j, "lagrangian", ""), "/lagrangian");
    if (auto it = j.find("constants"); it != j.end()) {
        if (!it->is_object()) schema_error("/constants", "expected an object");
        for (auto c = it->begin(); c != it->end(); ++c) {
            const std::string path = "/constants/" + c.key();
            if (!c.value().is_object()) schema_error(path, "expected an object");
            auto a = c.value().find("assume");
            m.constants[c.key()] = a == c.value().end() ? Assume::None : parse_assume(*a, path + "/assume");
        }
    }
    if (auto it = j.find("functions"); it != j.end()) {
        if (!it->is_object()) schema_error("/functions", "expected an object");
        for (auto f = it->begin(); f != it->end(); ++f) {
            const std::string path = "/functions/" + f.key();
            const json& fj = f.value();
            if (!fj.is_object()) schema_error(path, "expected an object");
            FunctionSpec spec;
            if (auto a = fj.find("arity"); a != fj.end()) {
                if (!a->is_number_integer() || a->get<int>() < 1) schema_error(path + "/arity", "expected a positive integer");
                spec.arity = a->get<int>();
            }
            if (auto b = fj.find("body"); b != fj.end()) {
                FunctionDef def;
                def.params = get_strings(field(fj, "params", path), path + "/params");
                if (static_cast<int>(def.params.size()) != spec.arity) schema_error(path + "/params", "arity mismatch");
                ParseContext ctx;
                ctx.dependents = {};
                ctx.independents = m.space.independent;
                ctx.symbols = def.params;
                for (const auto& [c, a] : m.constants) ctx.symbols.push_back(c);
                ctx.strict = true;
                try {
                    def.body = parse(get_string(*b, path + "/body"), ctx);
                    if (auto ad = fj.find("antiderivative"); ad != fj.end())
                        def.antiderivative = parse(get_string(*ad, path + "/antiderivative"), ctx);
                } catch (const ParseError& e) {
                    schema_error(path, e.what());
                }
                spec.definition = std::move(def);
            }
            m.functions[f.key()] = std::move(spec);
        }
    }
    if (auto it = j.find("oscillatory"); it != j.end()) {
        if (!it->is_boolean()) schema_error("/oscillatory", "expected a boolean");
        m.oscillatory = it->get<bool>();
    }
    if (auto it = j.find("ansatz"); it != j.end() && !it->is_null()) {
        if (!it->is_object()) schema_error("/ansatz", "expected an object");
        std::map<std::string, std::vector<std::string>> a;
        for (auto f = it->begin(); f != it->end(); ++f) a[f.key()] = get_strings(f.value(), "/ansatz/" + f.key());
        m.ansatz = std::move(a);
    }
    if (auto it = j.find("golden"); it != j.end()) {
        if (!it->is_array()) schema_error("/golden", "expected an array");
        for (std::size_t r = 0; r < it->size(); ++r) {
            const std::string path = "/golden/" + std::to_string(r);
            const json& rj = (*it)[r];
            GoldenRecord g;
            g.name = get_string(field(rj, "name", path), path + "/name");
            g.xi = get_strings(field(rj, "xi", path), path + "/xi");
            g.eta = get_strings(field(rj, "eta", path), path + "/eta");
            if (auto ph = rj.find("phi"); ph != rj.end()) g.phi = get_strings(*ph, path + "/phi");
            if (auto q = rj.find("quantity"); q != rj.end()) g.quantity = get_strings(*q, path + "/quantity");
            if (auto e = rj.find("expect"); e != rj.end()) {
                g.expect = get_string(*e, path + "/expect");
                if (g.expect != "trivial" && g.expect != "nontrivial")
                    schema_error(path + "/expect", "expected \"trivial\" or \"nontrivial\"");
            }
            if (auto n = rj.find("note"); n != rj.end()) g.note = get_string(*n, path + "/note");
            if (auto e = rj.find("erratum"); e != rj.end()) {
                g.erratum = get_string(*e, path + "/erratum");
                g.corrected = get_strings(field(rj, "corrected", path), path + "/corrected");
                if (g.quantity.empty()) schema_error(path + "/erratum", "an erratum needs the listed quantity");
                if (g.corrected.size() != m.space.n())
                    schema_error(path + "/corrected", "one entry per independent variable required");
            }
            if (g.xi.size() != m.space.n()) schema_error(path + "/xi", "one entry per independent variable required");
            if (g.eta.size() != m.space.m()) schema_error(path + "/eta", "one entry per dependent variable required");
            if (!g.phi.empty() && g.phi.size() != m.space.n())
                schema_error(path + "/phi", "one entry per independent variable required");
            if (!g.quantity.empty() && g.quantity.size() != m.space.n())
                schema_error(path + "/quantity", "one entry per independent variable required");
            m.golden.push_back(std::move(g));
        }
    }
    if (auto it = j.find("dependencies"); it != j.end()) {
        if (!it->is_array()) schema_error("/dependencies", "expected an array");
        for (std::size_t r = 0; r < it->size(); ++r) {
            const std::string path = "/dependencies/" + std::to_string(r);
            const json& dj = (*it)[r];
            DependencyRecord d;
            d.name = get_string(field(dj, "name", path), path + "/name");
            if (auto c = dj.find("checked"); c != dj.end()) {
                if (!c->is_boolean()) schema_error(path + "/checked", "expected a boolean");
                d.checked = c->get<bool>();
            }
            if (auto n = dj.find("note"); n != dj.end()) d.note = get_string(*n, path + "/note");
            const json& terms = field(dj, "terms", path);
            if (!terms.is_array()) schema_error(path + "/terms", "expected an array");
            for (std::size_t t = 0; t < terms.size(); ++t) {
                const std::string tp = path + "/terms/" + std::to_string(t);
                DependencyRecord::Term term;
                term.law = get_string(field(terms[t], "law", tp), tp + "/law");
                const json& s = field(terms[t], "shift", tp);
                if (!s.is_number_integer() || s.get<int>() < 0) schema_error(tp + "/shift", "expected a nonnegative integer");
                term.shift = s.get<int>();
                term.coefficient = get_string(field(terms[t], "coefficient", tp), tp + "/coefficient");
                d.terms.push_back(std::move(term));
            }
            m.dependencies.push_back(std::move(d));
        }
    }
    if (auto it = j.find("bindings"); it != j.end()) {
        m.numeric.bindings = get_number_map(*it, "/bindings");
        m.numeric.present = true;
    }
    if (auto it = j.find("initial"); it != j.end()) {
        m.numeric.initial = get_number_map(*it, "/initial");
        m.numeric.present = true;
    }
    if (auto it = j.find("grid"); it != j.end()) {
        if (!it->is_object()) schema_error("/grid", "expected an object");
        if (auto v = it->find("t0"); v != it->end()) m.numeric.t0 = get_number(*v, "/grid/t0");
        if (auto v = it->find("t1"); v != it->end()) m.numeric.t1 = get_number(*v, "/grid/t1");
        if (auto v = it->find("h"); v != it->end()) m.numeric.h = get_number(*v, "/grid/h");
        if (!(m.numeric.h > 0)) schema_error("/grid/h", "step must be positive");
        m.numeric.present = true;
    }
    // Expression strings must parse against the declared space.
    auto check = [&](const std::string& text, const std::string& path) {
        try {
            m.parse_expr(text);
        } catch (const ParseError& e) {
            schema_error(path, e.what());
        }
    };
    check(m.lagrangian_source, "/lagrangian");
    for (std::size_t r = 0; r < m.golden.size(); ++r) {
        const auto& g = m.golden[r];
        const std::string path = "/golden/" + std::to_string(r);
        for (std::size_t i = 0; i < g.xi.size(); ++i) check(g.xi[i], path + "/xi/" + std::to_string(i));
        for (std::size_t i = 0; i < g.eta.size(); ++i) check(g.eta[i], path + "/eta/" + std::to_string(i));
        for (std::size_t i = 0; i < g.phi.size(); ++i) check(g.phi[i], path + "/phi/" + std::to_string(i));
        for (std::size_t i = 0; i < g.quantity.size(); ++i)
            check(g.quantity[i], path + "/quantity/" + std::to_string(i));
        for (std::size_t i = 0; i < g.corrected.size(); ++i)
            check(g.corrected[i], path + "/corrected/" + std::to_string(i));
    }
    return m;
}

json model_to_json(const Model& m) {
    json j;
    j["schema"] = 1;
    j["name"] = m.name;
    if (!m.description.empty()) j["description"] = m.description;
    j["independent"] = m.space.independent;
    j["dependent"] = m.space.dependent;
    j["order_p"] = m.space.order_p;
    if (m.space.max_derivative != 1) j["max_derivative"] = m.space.max_derivative;
    j["lagrangian"] = m.lagrangian_source;
    j["constants"] = json::object();
    for (const auto& [name, a] : m.constants) {
        auto n = assume_name(a);
        j["constants"][name] = {{"assume", n ? json(*n) : json(nullptr)}};
    }
    j["functions"] = json::object();
    for (const auto& [name, f] : m.functions) {
        json fj{{"arity", f.arity}};
        if (f.definition) {
            fj["params"] = f.definition->params;
            fj["body"] = to_string(f.definition->body);
            if (f.definition->antiderivative) fj["antiderivative"] = to_string(*f.definition->antiderivative);
        }
        j["functions"][name] = fj;
    }
    j["oscillatory"] = m.oscillatory;
    if (m.ansatz) j["ansatz"] = *m.ansatz;
    j["golden"] = json::array();
    for (const auto& g : m.golden) {
        json gj{{"name", g.name}, {"xi", g.xi}, {"eta", g.eta}};
        if (!g.phi.empty()) gj["phi"] = g.phi;
        if (!g.quantity.empty()) gj["quantity"] = g.quantity;
        if (g.expect != "nontrivial") gj["expect"] = g.expect;
        if (!g.erratum.empty()) {
            gj["erratum"] = g.erratum;
            gj["corrected"] = g.corrected;
        }
        if (!g.note.empty()) gj["note"] = g.note;
        j["golden"].push_back(gj);
    }
    j["dependencies"] = json::array();
    for (const auto& d : m.dependencies) {
        json dj{{"name", d.name}, {"terms", json::array()}};
        if (!d.checked) dj["checked"] = false;
        if (!d.note.empty()) dj["note"] = d.note;
        for (const auto& t : d.terms)
            dj["terms"].push_back({{"law", t.law}, {"shift", t.shift}, {"coefficient", t.coefficient}});
        j["dependencies"].push_back(dj);
    }
    if (m.numeric.present) {
        j["bindings"] = m.numeric.bindings;
        j["initial"] = m.numeric.initial;
        j["grid"] = {{"t0", m.numeric.t0}, {"t1", m.numeric.t1}, {"h", m.numeric.h}};
    }
    return j;
}

// ---------------------------------------------------------------------------

std::vector<std::vector<Expr>> expand_components(const Model& m, const std::vector<std::string>& texts,
                                                 std::size_t expected) {
    const int p = m.space.order_p;
    std::vector<std::vector<Expr>> out(static_cast<std::size_t>(p + 1), std::vector<Expr>(expected, Expr(0)));
    if (texts.empty()) return out;
    if (texts.size() != expected) throw ModelError("wrong number of components");
    for (std::size_t i = 0; i < expected; ++i) {
        EpsSeries s = expand(m.parse_expr(texts[i]), m.space);
        for (int k = 0; k <= p; ++k) out[k][i] = s.c[k];
    }
    return out;
}

ApproximateGenerator golden_generator(const Model& m, const GoldenRecord& r) {
    return ApproximateGenerator(m.space, expand_components(m, r.xi, m.space.n()),
                                expand_components(m, r.eta, m.space.m()));
}

Gauge golden_gauge(const Model& m, const GoldenRecord& r) { return expand_components(m, r.phi, m.space.n()); }

std::vector<std::vector<Expr>> golden_quantity(const Model& m, const GoldenRecord& r) {
    if (r.quantity.empty()) return {};
    return expand_components(m, r.quantity, m.space.n());
}

std::string to_string(MatchLevel l) {
    switch (l) {
        case MatchLevel::None: return "none";
        case MatchLevel::Exact: return "exact";
        case MatchLevel::Scaled: return "scaled";
        case MatchLevel::Equivalent: return "equivalent";
        case MatchLevel::Mismatch: return "mismatch";
    }
    return "none";
}

std::size_t GoldenReport::passed() const {
    std::size_t n = 0;
    for (const auto& r : records) n += r.passed;
    return n;
}

bool GoldenReport::all_passed() const {
    for (const auto& r : records)
        if (!r.passed) return false;
    for (const auto& d : dependencies)
        if (!d.passed) return false;
    return true;
}

namespace {

MatchLevel match_own(const std::vector<std::vector<Expr>>& q, const ConservationLaw& law, const PerturbedLagrangian& L,
                     const std::vector<std::string>& constants, std::optional<Expr>* scale) {
    Dependency coeffs;
    if (!in_span(q, {law}, L, constants, &coeffs)) return MatchLevel::Mismatch;
    if (coeffs.size() == 1 && coeffs[0].shift == 0) {
        if (scale) *scale = coeffs[0].coefficient;
        return coeffs[0].coefficient.is_one() ? MatchLevel::Exact : MatchLevel::Scaled;
    }
    return MatchLevel::Equivalent;
}

}  // namespace

GoldenReport golden_check(const Model& m) {
    GoldenReport report;
    report.model = m.name;
    const PerturbedLagrangian L = m.perturbed();
    const OnShell on_shell = solve_on_shell(L);
    const auto constants = m.constant_names();
    const int p = m.space.order_p;

    std::vector<std::vector<std::vector<Expr>>> quantities;
    for (const auto& rec : m.golden) {
        RecordReport rr;
        rr.name = rec.name;
        try {
            const ApproximateGenerator g = golden_generator(m, rec);
            const Gauge phi = golden_gauge(m, rec);
            const EpsSeries res = variational_residual(g, L, phi);
            rr.residual_zero = true;
            for (int k = 0; k <= p; ++k)
                if (!is_identically_zero(res.c[k])) {
                    rr.residual_zero = false;
                    rr.message = "residual nonzero at order " + std::to_string(k) + ": " + to_string(trig_reduce(res.c[k]));
                    break;
                }
            rr.law = make_law(assemble_fluxes(g, L, phi), L, on_shell);
            rr.law.label = rec.name;
            rr.flux_verified = rr.law.verified;
            rr.classification = rr.law.classification;
            rr.expect_ok = rec.expect == "trivial" ? rr.classification == LawClass::Trivial
                                                   : rr.classification == LawClass::Nontrivial;
            auto q = golden_quantity(m, rec);
            if (!q.empty()) {
                rr.quantity_verified = make_law(q, L, on_shell).verified;
                rr.match = match_own(q, rr.law, L, constants, &rr.scale);
            }
            if (!rec.erratum.empty()) {
                auto c = expand_components(m, rec.corrected, m.space.n());
                rr.corrected_match = make_law(c, L, on_shell).verified ? match_own(c, rr.law, L, constants, nullptr)
                                                                       : MatchLevel::Mismatch;
            }
            quantities.push_back(std::move(q));
        } catch (const Error& e) {
            rr.message = e.what();
            quantities.emplace_back();
        }
        report.records.push_back(std::move(rr));
    }
    // Second pass: quantities matching only in combination with other laws.
    for (std::size_t r = 0; r < report.records.size(); ++r) {
        auto& rr = report.records[r];
        if (rr.match != MatchLevel::Mismatch || !m.golden[r].erratum.empty()) continue;
        std::vector<ConservationLaw> laws{rr.law};
        for (std::size_t o = 0; o < report.records.size(); ++o)
            if (o != r && report.records[o].flux_verified) laws.push_back(report.records[o].law);
        Dependency coeffs;
        if (in_span(quantities[r], laws, L, constants, &coeffs)) {
            for (const auto& t : coeffs)
                if (t.law == 0 && !t.coefficient.is_zero()) rr.match = MatchLevel::Equivalent;
        }
        if (rr.match == MatchLevel::Mismatch && rr.message.empty())
            rr.message = "quantity is not a constant multiple of the flux or an equivalent combination";
    }
    for (std::size_t r = 0; r < report.records.size(); ++r) {
        auto& rr = report.records[r];
        bool quantity_ok = quantities[r].empty() || (rr.quantity_verified && rr.match != MatchLevel::Mismatch);
        if (!m.golden[r].erratum.empty()) {
            rr.flagged = rr.match == MatchLevel::Mismatch;
            quantity_ok = rr.flagged && (rr.corrected_match == MatchLevel::Exact || rr.corrected_match == MatchLevel::Scaled);
            if (rr.message.empty())
                rr.message = rr.flagged ? "flagged: " + m.golden[r].erratum
                                        : "erratum record, but the listed quantity matches the flux";
        }
        rr.passed = rr.residual_zero && rr.flux_verified && rr.expect_ok && quantity_ok;
        if (!rr.passed && rr.message.empty()) {
            if (!rr.flux_verified)
                rr.message = "flux divergence does not vanish on-shell";
            else if (!rr.expect_ok)
                rr.message = "law classified as " + to_string(rr.classification) + ", expected " + m.golden[r].expect;
            else if (!rr.quantity_verified)
                rr.message = "golden quantity fails the divergence check";
        }
    }

    // Dependencies among golden quantities (computed flux where none is given).
    auto law_index = [&](const std::string& name) -> std::size_t {
        for (std::size_t r = 0; r < m.golden.size(); ++r)
            if (m.golden[r].name == name) return r;
        throw ModelError("dependency refers to unknown record '" + name + "'");
    };
    for (const auto& dep : m.dependencies) {
        DependencyReport dr;
        dr.name = dep.name;
        dr.checked = dep.checked;
        if (!dep.checked) {
            dr.passed = true;
            dr.message = dep.note.empty() ? "documentation only" : "documentation only: " + dep.note;
            report.dependencies.push_back(std::move(dr));
            continue;
        }
        try {
            std::vector<std::size_t> used;
            std::vector<ConservationLaw> laws;
            std::vector<std::pair<std::size_t, int>> terms;  // (local law, shift)
            std::vector<Expr> coeffs;
            for (const auto& t : dep.terms) {
                const std::size_t r = law_index(t.law);
                auto it = std::find(used.begin(), used.end(), r);
                std::size_t local = static_cast<std::size_t>(it - used.begin());
                if (it == used.end()) {
                    used.push_back(r);
                    ConservationLaw law = report.records[r].law;
                    if (!quantities[r].empty()) law.fluxes = quantities[r];
                    laws.push_back(std::move(law));
                }
                terms.emplace_back(local, t.shift);
                coeffs.push_back(m.parse_expr(t.coefficient));
            }
            // Combination itself.
            dr.holds = true;
            for (int k = 0; k <= p && dr.holds; ++k)
                for (std::size_t i = 0; i < m.space.n(); ++i) {
                    SumBuilder sb;
                    for (std::size_t t = 0; t < terms.size(); ++t) {
                        const int src = k - terms[t].second;
                        if (src < 0) continue;
                        sb.add(coeffs[t] * laws[terms[t].first].fluxes[src][i]);
                    }
                    if (!is_identically_zero(drop_constant_terms(trig_reduce(sb.build()), constants))) {
                        dr.holds = false;
                        break;
                    }
                }
            // The same vector must lie in the kernel reported by classify.
            const auto kernel = classify(laws, L, constants);
            std::vector<std::pair<std::size_t, int>> columns;
            auto column_of = [&](std::size_t law, int shift) {
                for (std::size_t c = 0; c < columns.size(); ++c)
                    if (columns[c] == std::make_pair(law, shift)) return c;
                columns.emplace_back(law, shift);
                return columns.size() - 1;
            };
            std::vector<std::vector<std::pair<std::size_t, Expr>>> sparse;
            for (const auto& d : kernel) {
                std::vector<std::pair<std::size_t, Expr>> v;
                for (const auto& t : d) v.emplace_back(column_of(t.law, t.shift), t.coefficient);
                sparse.push_back(std::move(v));
            }
            std::vector<std::pair<std::size_t, Expr>> target;
            for (std::size_t t = 0; t < terms.size(); ++t) {
                // Columns that vanish identically never enter classify.
                bool zero = true;
                for (const auto& row : laws[terms[t].first].fluxes)
                    for (const auto& x : row) zero = zero && is_identically_zero(x);
                if (zero || terms[t].second > p) continue;
                target.emplace_back(column_of(terms[t].first, terms[t].second), coeffs[t]);
            }
            auto dense = [&](const std::vector<std::vector<std::pair<std::size_t, Expr>>>& vs) {
                std::vector<std::vector<Expr>> mat;
                for (const auto& v : vs) {
                    std::vector<Expr> row(columns.size(), Expr(0));
                    for (const auto& [c, x] : v) row[c] = row[c] + x;
                    mat.push_back(std::move(row));
                }
                return mat;
            };
            const std::size_t before = rank(dense(sparse));
            auto with = sparse;
            with.push_back(target);
            dr.detected = !kernel.empty() && rank(dense(with)) == before;
            dr.passed = dr.holds && dr.detected;
            if (!dr.holds)
                dr.message = "combination does not vanish";
            else if (!dr.detected)
                dr.message = "classify did not report this dependency";
        } catch (const Error& e) {
            dr.message = e.what();
        }
        report.dependencies.push_back(std::move(dr));
    }
    return report;
}

}  // namespace approxsym
