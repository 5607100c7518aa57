#include "approxsym/cli.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "approxsym/determine.hpp"
#include "approxsym/errors.hpp"
#include "approxsym/models.hpp"
#include "approxsym/numverify.hpp"
#include "approxsym/perturb.hpp"
#include "approxsym/print.hpp"
#include "approxsym/simplify.hpp"

namespace approxsym {

namespace {

using nlohmann::json;

enum class Format { Text, Latex, Json };

struct Common {
    std::string file;
    std::string model;
    Format format = Format::Text;
};

struct NoetherOptions {
    std::vector<std::string> generators;
    std::vector<std::string> xi, eta, phi;
    std::string from;
    bool classify = false;
    std::string assembly = "expanded";
};

struct VerifyOptions {
    std::vector<std::string> laws;
    bool numeric = false;
    std::vector<double> sweep;
    std::string csv;
    double h = 0.0;
    double t1 = 0.0;
};

Model load_model(const Common& c) {
    if (!c.model.empty()) {
        if (!c.file.empty()) throw ModelError("give either a model file or --model, not both");
        return load_builtin(c.model);
    }
    if (c.file.empty()) throw ModelError("no model given: pass a model file or --model <name>");
    std::ifstream in(c.file);
    if (!in) throw ModelError("cannot read " + c.file);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ModelError(c.file + ": malformed JSON at byte " + std::to_string(e.byte));
    }
    return model_from_json(j);
}

std::string show(const Expr& e, Format f) { return f == Format::Latex ? to_latex(e) : to_string(e); }

/// Σ_k ε^k c_k as one expression.
Expr eps_sum(const std::vector<Expr>& coeffs) {
    Expr r(0), pw(1);
    for (const auto& c : coeffs) {
        r += pw * c;
        pw *= Expr::symbol(kEps);
    }
    return r;
}

/// Component i of [k][i] as an ε-expression.
Expr component(const std::vector<std::vector<Expr>>& m, std::size_t i) {
    std::vector<Expr> c;
    for (const auto& row : m) c.push_back(row.at(i));
    return eps_sum(c);
}

std::string flux_label(const JetSpace& sp, std::size_t i, int k, Format f) {
    if (f == Format::Latex)
        return sp.n() == 1 ? "I_{" + std::to_string(k) + "}"
                           : "\\Phi^{" + sp.independent[i] + "}_{" + std::to_string(k) + "}";
    return sp.n() == 1 ? "I_" + std::to_string(k) : "Phi^" + sp.independent[i] + "_" + std::to_string(k);
}

void print_line(std::ostream& out, Format f, const std::string& lhs, const std::string& rhs) {
    if (f == Format::Latex)
        out << "  " << lhs << " &= " << rhs << " \\\\\n";
    else
        out << "  " << lhs << " = " << rhs << "\n";
}

json series_json(const std::vector<std::vector<Expr>>& m, std::size_t comps) {
    json a = json::array();
    for (std::size_t i = 0; i < comps; ++i) a.push_back(to_string(component(m, i)));
    return a;
}

// expand

int cmd_expand(const Common& c, std::ostream& out) {
    const Model m = load_model(c);
    const auto L = m.perturbed();
    if (c.format == Format::Json) {
        json j{{"model", m.name}, {"lagrangian", m.lagrangian_source}, {"order_p", m.space.order_p}};
        j["orders"] = json::array();
        for (const auto& e : L.L.c) j["orders"].push_back(to_string(e));
        out << j.dump(2) << "\n";
        return kExitOk;
    }
    for (std::size_t k = 0; k < L.L.c.size(); ++k) {
        const std::string lhs = c.format == Format::Latex ? "\\mathcal{L}_{" + std::to_string(k) + "}"
                                                          : "L" + std::to_string(k);
        if (c.format == Format::Latex)
            out << lhs << " &= " << to_latex(L.L.c[k]) << " \\\\\n";
        else
            out << lhs << " = " << to_string(L.L.c[k]) << "\n";
    }
    return kExitOk;
}

// determine

AnsatzSpace model_ansatz(const Model& m) {
    if (!m.ansatz) return default_ansatz(m.space, m.oscillatory);
    AnsatzSpace a;
    a.missing_is_empty = m.ansatz->empty();
    for (const auto& [key, texts] : *m.ansatz) {
        auto& basis = a.bases[key];
        for (const auto& t : texts) basis.push_back(m.parse_expr(t));
    }
    return a;
}

bool residual_zero(const Solution& s, const PerturbedLagrangian& L) {
    for (const auto& r : variational_residual(s.generator, L, s.gauge).c)
        if (!is_identically_zero(r)) return false;
    return true;
}

int cmd_determine(const Common& c, bool dump, std::ostream& out) {
    const Model m = load_model(c);
    const auto L = m.perturbed();
    const auto sys = extract(L, model_ansatz(m), m.constants);
    const auto sols = solve(sys);
    const JetSpace& sp = m.space;
    std::vector<bool> sound;
    for (const auto& s : sols) sound.push_back(residual_zero(s, L));

    if (c.format == Format::Json) {
        json j{{"model", m.name}, {"unknowns", sys.unknowns.size()}, {"equations", sys.equations.size()}};
        j["generators"] = json::array();
        for (std::size_t g = 0; g < sols.size(); ++g) {
            const auto& s = sols[g];
            j["generators"].push_back({{"name", "S" + std::to_string(g + 1)},
                                       {"xi", series_json(s.generator.xi(), sp.n())},
                                       {"eta", series_json(s.generator.eta(), sp.m())},
                                       {"phi", series_json(s.gauge, sp.n())},
                                       {"residual_zero", static_cast<bool>(sound[g])}});
        }
        if (dump) {
            j["system"] = json::array();
            for (const auto& eq : sys.equations)
                j["system"].push_back({{"order", eq.order},
                                       {"jet_monomial", to_string(eq.jet_monomial)},
                                       {"function_monomial", to_string(eq.function_monomial)},
                                       {"lhs", to_string(eq.lhs)}});
        }
        out << j.dump(2) << "\n";
        return kExitOk;
    }
    out << "model " << m.name << ": " << sys.unknowns.size() << " unknowns, " << sys.equations.size()
        << " equations, " << sols.size() << " generators\n";
    if (dump) {
        for (const auto& eq : sys.equations)
            out << "[order " << eq.order << "; " << show(eq.jet_monomial, c.format) << "; "
                << show(eq.function_monomial, c.format) << "] " << show(eq.lhs, c.format) << " = 0\n";
    }
    for (std::size_t g = 0; g < sols.size(); ++g) {
        const auto& s = sols[g];
        out << "S" << g + 1 << (sound[g] ? " (residual zero)" : " (RESIDUAL NONZERO)") << "\n";
        const bool tex = c.format == Format::Latex;
        for (std::size_t i = 0; i < sp.n(); ++i)
            print_line(out, c.format, (tex ? "\\xi_{" : "xi_") + sp.independent[i] + (tex ? "}" : ""),
                       show(component(s.generator.xi(), i), c.format));
        for (std::size_t a = 0; a < sp.m(); ++a)
            print_line(out, c.format, (tex ? "\\eta_{" : "eta_") + sp.dependent[a] + (tex ? "}" : ""),
                       show(component(s.generator.eta(), a), c.format));
        for (std::size_t i = 0; i < sp.n(); ++i)
            print_line(out, c.format, (tex ? "\\phi^{" : "phi^") + sp.independent[i] + (tex ? "}" : ""),
                       show(component(s.gauge, i), c.format));
    }
    return kExitOk;
}

// noether

struct Candidate {
    std::string name;
    ApproximateGenerator g;
    Gauge phi;
};

std::vector<std::string> json_strings(const json& j, const char* key) {
    std::vector<std::string> out;
    if (!j.contains(key)) return out;
    if (!j.at(key).is_array()) throw ModelError(std::string("expected an array of expressions at '") + key + "'");
    for (const auto& s : j.at(key)) {
        if (!s.is_string()) throw ModelError(std::string("expected an expression string in '") + key + "'");
        out.push_back(s.get<std::string>());
    }
    return out;
}

std::vector<Candidate> noether_candidates(const Model& m, const NoetherOptions& o) {
    std::vector<Candidate> out;
    const JetSpace& sp = m.space;
    if (!o.xi.empty() || !o.eta.empty() || !o.phi.empty()) {
        out.push_back({"custom", ApproximateGenerator(sp, expand_components(m, o.xi, sp.n()),
                                                      expand_components(m, o.eta, sp.m())),
                       expand_components(m, o.phi, sp.n())});
        return out;
    }
    if (!o.from.empty()) {
        std::ifstream in(o.from);
        if (!in) throw ModelError("cannot read " + o.from);
        json j;
        try {
            j = json::parse(in);
        } catch (const json::parse_error& e) {
            throw ModelError(o.from + ": malformed JSON at byte " + std::to_string(e.byte));
        }
        if (!j.contains("generators") || !j["generators"].is_array())
            throw ModelError(o.from + ": expected a 'generators' array");
        for (const auto& g : j["generators"]) {
            const std::string name = g.value("name", "S" + std::to_string(out.size() + 1));
            out.push_back({name,
                           ApproximateGenerator(sp, expand_components(m, json_strings(g, "xi"), sp.n()),
                                                expand_components(m, json_strings(g, "eta"), sp.m())),
                           expand_components(m, json_strings(g, "phi"), sp.n())});
        }
        return out;
    }
    for (const auto& r : m.golden) {
        if (!o.generators.empty() && std::find(o.generators.begin(), o.generators.end(), r.name) == o.generators.end())
            continue;
        out.push_back({r.name, golden_generator(m, r), golden_gauge(m, r)});
    }
    for (const auto& want : o.generators)
        if (std::none_of(m.golden.begin(), m.golden.end(), [&](const auto& r) { return r.name == want; }))
            throw ModelError("model " + m.name + " has no generator named '" + want + "'");
    return out;
}

std::string dependency_text(const Dependency& d, const std::vector<std::string>& names) {
    std::string s;
    for (const auto& t : d) {
        if (!s.empty()) s += " + ";
        s += "(" + to_string(t.coefficient) + ")";
        if (t.shift == 1) s += "*eps";
        if (t.shift > 1) s += "*eps^" + std::to_string(t.shift);
        s += "*I[" + names.at(t.law) + "]";
    }
    return s + " ~ 0";
}

int cmd_noether(const Common& c, const NoetherOptions& o, std::ostream& out, std::ostream& err) {
    const Model m = load_model(c);
    const auto L = m.perturbed();
    const auto on = solve_on_shell(L);
    const FluxAssembly assembly = o.assembly == "literal" ? FluxAssembly::Literal : FluxAssembly::Expanded;
    const JetSpace& sp = m.space;
    std::vector<ConservationLaw> laws;
    std::vector<std::string> names;
    json jl = json::array();
    int code = kExitOk;
    for (const auto& cand : noether_candidates(m, o)) {
        ConservationLaw law;
        try {
            law = noether_fluxes(cand.g, L, cand.phi, on, assembly);
        } catch (const NotAVariationalSymmetry& e) {
            err << cand.name << ": " << e.what() << "\n";
            jl.push_back({{"name", cand.name}, {"error", "NotAVariationalSymmetry"}, {"message", e.what()}});
            code = kExitLaw;
            continue;
        } catch (const FormulaMismatch& e) {
            err << cand.name << ": " << e.what() << "\n";
            jl.push_back({{"name", cand.name}, {"error", "FormulaMismatch"}, {"message", e.what()}});
            code = kExitLaw;
            continue;
        }
        laws.push_back(law);
        names.push_back(cand.name);
        if (c.format == Format::Json) {
            json fl = json::array();
            for (std::size_t i = 0; i < sp.n(); ++i) fl.push_back(to_string(component(law.fluxes, i)));
            jl.push_back({{"name", cand.name},
                          {"classification", to_string(law.classification)},
                          {"verified", law.verified},
                          {"order_ok", law.order_ok},
                          {"fluxes", fl}});
            continue;
        }
        out << cand.name << ": " << to_string(law.classification)
            << (law.verified ? ", divergence check passed" : ", divergence check FAILED") << "\n";
        for (std::size_t k = 0; k < law.fluxes.size(); ++k)
            for (std::size_t i = 0; i < sp.n(); ++i)
                print_line(out, c.format, flux_label(sp, i, static_cast<int>(k), c.format),
                           show(law.fluxes[k][i], c.format));
    }
    std::vector<Dependency> deps;
    if (o.classify) deps = classify(laws, L, m.constant_names());
    if (c.format == Format::Json) {
        json j{{"model", m.name}, {"laws", jl}};
        if (o.classify) {
            j["dependencies"] = json::array();
            for (const auto& d : deps) {
                json terms = json::array();
                for (const auto& t : d)
                    terms.push_back({{"law", names.at(t.law)}, {"shift", t.shift}, {"coefficient", to_string(t.coefficient)}});
                j["dependencies"].push_back(terms);
            }
        }
        out << j.dump(2) << "\n";
    } else if (o.classify) {
        out << "dependencies: " << deps.size() << "\n";
        for (const auto& d : deps) out << "  " << dependency_text(d, names) << "\n";
    }
    return code;
}

// verify

struct VerifiedLaw {
    std::string name;
    ConservationLaw law;
    bool ok = false;
    std::string error;
};

std::vector<VerifiedLaw> verify_laws(const Model& m, const PerturbedLagrangian& L, const OnShell& on,
                                     const std::vector<std::string>& select) {
    std::vector<VerifiedLaw> out;
    for (const auto& want : select)
        if (std::none_of(m.golden.begin(), m.golden.end(), [&](const auto& r) { return r.name == want; }))
            throw ModelError("model " + m.name + " has no law named '" + want + "'");
    for (const auto& r : m.golden) {
        if (!select.empty() && std::find(select.begin(), select.end(), r.name) == select.end()) continue;
        VerifiedLaw v;
        v.name = r.name;
        try {
            const auto q = golden_quantity(m, r);
            v.law = q.empty() ? noether_fluxes(golden_generator(m, r), L, golden_gauge(m, r), on)
                              : make_law(q, L, on);
            v.ok = v.law.verified;
        } catch (const NotAVariationalSymmetry& e) {
            v.error = e.what();
        } catch (const FormulaMismatch& e) {
            v.error = e.what();
        }
        out.push_back(std::move(v));
    }
    return out;
}

int cmd_verify(const Common& c, const VerifyOptions& o, std::ostream& out) {
    const Model m = load_model(c);
    const auto L = m.perturbed();
    const auto on = solve_on_shell(L);
    auto laws = verify_laws(m, L, on, o.laws);
    int code = kExitOk;
    for (const auto& v : laws)
        if (!v.ok) code = kExitLaw;

    json j{{"model", m.name}, {"laws", json::array()}};
    std::vector<DriftReport> drifts;
    std::vector<SweepReport> sweeps;
    double estimate = -1.0;
    if (o.numeric || !o.sweep.empty() || !o.csv.empty()) {
        if (!m.numeric.present) throw ModelError("model " + m.name + " has no numeric setup");
        Grid grid{m.numeric.t0, o.t1 > 0 ? o.t1 : m.numeric.t1, o.h > 0 ? o.h : m.numeric.h};
        std::map<Expr, double, ExprLess> init;
        for (const auto& [k, v] : m.numeric.initial) init[m.parse_expr(k)] = v;
        if (o.numeric || !o.csv.empty()) {
            const NumericModel nm = compile_numeric(L, m.numeric.bindings);
            const auto y0 = nm.initial_state(init);
            const auto tr = integrate(nm, y0, grid);
            if (o.numeric) {
                for (const auto& v : laws) drifts.push_back(v.ok ? drift(nm, tr, v.law) : DriftReport{});
                estimate = richardson_error(nm, y0, grid);
            }
            if (!o.csv.empty()) {
                std::ofstream f(o.csv);
                if (!f) throw ModelError("cannot write " + o.csv);
                const ConservationLaw* first = nullptr;
                for (const auto& v : laws)
                    if (v.ok) {
                        first = &v.law;
                        break;
                    }
                write_csv(f, nm, tr, first);
            }
        }
        if (!o.sweep.empty())
            for (const auto& v : laws)
                sweeps.push_back(v.ok ? eps_sweep(m.lagrangian(), m.space, v.law, m.numeric.bindings, init, grid, o.sweep)
                                      : SweepReport{});
    }

    for (std::size_t i = 0; i < laws.size(); ++i) {
        const auto& v = laws[i];
        if (c.format == Format::Json) {
            json e{{"name", v.name}, {"verified", v.ok}};
            if (!v.error.empty()) e["error"] = v.error;
            if (v.ok) e["order_ok"] = v.law.order_ok;
            if (!drifts.empty()) e["drift"] = drifts[i].drift;
            if (!sweeps.empty()) {
                json pts = json::array();
                for (const auto& p : sweeps[i].points) pts.push_back({{"eps", p.eps}, {"drift", p.drift}});
                e["sweep"] = {{"points", pts}, {"slope", sweeps[i].slope}};
            }
            j["laws"].push_back(e);
            continue;
        }
        out << v.name << ": " << (v.ok ? "verified" : "NOT verified");
        if (!v.error.empty()) out << " (" << v.error << ")";
        out << "\n";
        if (!drifts.empty() && v.ok) {
            out << "  drift";
            for (std::size_t k = 0; k < drifts[i].drift.size(); ++k) out << " I" << k << "=" << drifts[i].drift[k];
            out << "\n";
        }
        if (!sweeps.empty() && v.ok) {
            out << "  sweep";
            for (const auto& p : sweeps[i].points) out << " eps=" << p.eps << ":" << p.drift;
            out << " slope=" << sweeps[i].slope << "\n";
        }
    }
    if (c.format == Format::Json) {
        if (estimate >= 0) j["error_estimate"] = estimate;
        out << j.dump(2) << "\n";
    } else if (estimate >= 0) {
        out << "integrator error estimate " << estimate << "\n";
    }
    return code;
}

// models

int cmd_models(const Common& c, std::ostream& out) {
    json j = json::array();
    for (const auto& name : builtin_names()) {
        const Model m = load_builtin(name);
        if (c.format == Format::Json)
            j.push_back({{"name", name}, {"description", m.description}, {"order_p", m.space.order_p}});
        else
            out << name << "  " << m.description << "\n";
    }
    if (c.format == Format::Json) out << j.dump(2) << "\n";
    return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Approximate Noether symmetries and conservation laws of perturbed Lagrangians", "approxsym"};
    app.require_subcommand(1);
    app.fallthrough();
    Common common;
    std::map<std::string, Format> formats{{"text", Format::Text}, {"latex", Format::Latex}, {"json", Format::Json}};
    app.add_option("--format", common.format, "Output format: text, latex or json")
        ->transform(CLI::CheckedTransformer(formats, CLI::ignore_case));
    app.add_option("--model", common.model, "Builtin model name instead of a model file");

    auto* expand = app.add_subcommand("expand", "Print the ε-coefficients of the Lagrangian");
    expand->add_option("file", common.file, "Model file (JSON)");

    bool dump = false;
    auto* determine = app.add_subcommand("determine", "Solve the determining equations over the ansatz");
    determine->add_option("file", common.file, "Model file (JSON)");
    determine->add_flag("--dump-system", dump, "Also print the determining equations with provenance");

    NoetherOptions no;
    auto* noether = app.add_subcommand("noether", "Conservation laws of the model's generators");
    noether->add_option("file", common.file, "Model file (JSON)");
    noether->add_option("--generator", no.generators, "Generator name (repeatable)");
    noether->add_option("--xi", no.xi, "ξ component with eps (repeatable, one per independent variable)");
    noether->add_option("--eta", no.eta, "η component with eps (repeatable, one per dependent variable)");
    noether->add_option("--phi", no.phi, "Gauge component with eps (repeatable)");
    noether->add_option("--from", no.from, "Generators from a `determine --format json` report");
    noether->add_flag("--classify", no.classify, "Report dependencies among the laws");
    noether->add_option("--assembly", no.assembly, "Flux assembly: expanded or literal")
        ->check(CLI::IsMember({"expanded", "literal"}));

    VerifyOptions vo;
    auto* verify = app.add_subcommand("verify", "Check conserved quantities symbolically and numerically");
    verify->add_option("file", common.file, "Model file (JSON)");
    verify->add_option("--law", vo.laws, "Law name (repeatable)");
    verify->add_flag("--numeric", vo.numeric, "Integrate the hierarchy and report drift");
    verify->add_option("--sweep", vo.sweep, "Comma-separated ε values for the scaling fit")->delimiter(',');
    verify->add_option("--csv", vo.csv, "Write the trajectory to this CSV file");
    verify->add_option("--step", vo.h, "Step size override");
    verify->add_option("--t1", vo.t1, "Final time override");

    auto* models = app.add_subcommand("models", "List builtin models");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e, out, err);
        return rc == 0 ? kExitOk : kExitModel;
    }

    try {
        if (*expand) return cmd_expand(common, out);
        if (*determine) return cmd_determine(common, dump, out);
        if (*noether) return cmd_noether(common, no, out, err);
        if (*verify) return cmd_verify(common, vo, out);
        if (*models) return cmd_models(common, out);
    } catch (const SymbolicPivotAmbiguity& e) {
        err << "error: " << e.what() << "\n";
        return kExitPivot;
    } catch (const NotAVariationalSymmetry& e) {
        err << "error: " << e.what() << "\n";
        return kExitLaw;
    } catch (const FormulaMismatch& e) {
        err << "error: " << e.what() << "\n";
        return kExitLaw;
    } catch (const NonFiniteState& e) {
        err << "error: " << e.what() << "\n";
        return kExitNonFinite;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitModel;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitModel;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
    return kExitModel;
}

}  // namespace approxsym
