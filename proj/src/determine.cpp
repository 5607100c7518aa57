#include "approxsym/determine.hpp"

#include <functional>
#include <set>

#include "approxsym/calculus.hpp"
#include "approxsym/errors.hpp"
#include "approxsym/perturb.hpp"
#include "approxsym/print.hpp"
#include "approxsym/simplify.hpp"

namespace approxsym {

namespace {

/// Monomials in `gens` of total degree <= max_degree whose weight (sum of
/// weight[g] over factors) is <= max_weight.
std::vector<Expr> monomials(const std::vector<Expr>& gens, const std::vector<int>& weight, int max_degree,
                            int max_weight) {
    std::vector<Expr> out;
    std::function<void(std::size_t, int, int, Expr)> rec = [&](std::size_t start, int left, int w, Expr mono) {
        out.push_back(mono);
        if (left == 0) return;
        for (std::size_t g = start; g < gens.size(); ++g) {
            if (w + weight[g] > max_weight) continue;
            rec(g, left - 1, w + weight[g], mono * gens[g]);
        }
    };
    rec(0, max_degree, 0, Expr(1));
    return out;
}

std::vector<Expr> products(const std::vector<Expr>& a, const std::vector<Expr>& b) {
    std::vector<Expr> out;
    for (const auto& x : a)
        for (const auto& y : b) out.push_back(x * y);
    return out;
}

std::function<bool(const Expr&)> constant_test(const std::vector<std::string>& constants) {
    auto names = std::make_shared<std::set<std::string>>(constants.begin(), constants.end());
    return [names](const Expr& b) {
        if (b.kind() == Kind::Symbol) return names->count(b.name()) > 0;
        if (b.kind() == Kind::Jet) return false;
        return atoms_of(b, [&](const Expr& a) {
                   return a.kind() == Kind::Jet || (a.kind() == Kind::Symbol && names->count(a.name()) == 0);
               }).empty();
    };
}

using CoordKey = std::pair<std::size_t, Expr>;

struct CoordLess {
    bool operator()(const CoordKey& a, const CoordKey& b) const {
        if (a.first != b.first) return a.first < b.first;
        return compare(a.second, b.second) < 0;
    }
};

/// Coefficients over (component, function monomial).
using CoordMap = std::map<CoordKey, Expr, CoordLess>;

void append_coordinates(CoordMap& out, std::size_t component, const Expr& e,
                        const std::function<bool(const Expr&)>& is_constant, bool drop_constant) {
    for (auto& [fm, c] : separate(trig_reduce(e), is_constant)) {
        if (drop_constant && fm.is_one()) continue;
        if (c.is_zero()) continue;
        out[{component, fm}] += c;
    }
}

CoordMap coordinates(const std::vector<std::vector<Expr>>& xi, const std::vector<std::vector<Expr>>& eta,
                     const Gauge& phi, const std::function<bool(const Expr&)>& is_constant) {
    CoordMap m;
    std::size_t comp = 0;
    for (const auto& row : xi)
        for (const auto& e : row) append_coordinates(m, comp++, e, is_constant, false);
    for (const auto& row : eta)
        for (const auto& e : row) append_coordinates(m, comp++, e, is_constant, false);
    for (const auto& row : phi)
        for (const auto& e : row) append_coordinates(m, comp++, e, is_constant, true);
    return m;
}

}  // namespace

const std::vector<Expr>* AnsatzSpace::lookup(const std::string& fam, const std::string& var, int k) const {
    for (const auto& key : {fam + "_" + var + std::to_string(k), fam + "_" + var, fam + std::to_string(k), fam}) {
        auto it = bases.find(key);
        if (it != bases.end()) return &it->second;
    }
    return nullptr;
}

std::vector<Expr> default_x_basis(const JetSpace& space, bool oscillatory) {
    std::vector<Expr> out{Expr(1)};
    for (std::size_t i = 0; i < space.n(); ++i) out = products(out, {Expr(1), space.x(i), pow(space.x(i), 2)});
    if (oscillatory) {
        for (std::size_t i = 0; i < space.n(); ++i) {
            const Expr x = space.x(i);
            for (const auto& e : {sin(x), cos(x), sin(Expr(2) * x), cos(Expr(2) * x), x * sin(x), x * cos(x)})
                out.push_back(e);
        }
    }
    return out;
}

AnsatzSpace default_ansatz(const JetSpace& space, bool oscillatory) {
    AnsatzSpace a;
    const auto xb = default_x_basis(space, oscillatory);
    std::vector<Expr> u0;
    for (std::size_t al = 0; al < space.m(); ++al) u0.push_back(space.u(al, 0));
    const auto seed = products(xb, monomials(u0, std::vector<int>(u0.size(), 0), 2, 0));
    a.bases["xi"] = seed;
    a.bases["eta"] = seed;
    std::vector<Expr> uk;
    std::vector<int> w;
    for (int k = 0; k <= space.order_p; ++k)
        for (std::size_t al = 0; al < space.m(); ++al) {
            uk.push_back(space.u(al, k));
            w.push_back(k);
        }
    for (int k = 0; k <= space.order_p; ++k) {
        std::vector<Expr> g;
        for (const auto& e : products(xb, monomials(uk, w, 3, k)))
            if (!e.is_one()) g.push_back(e);
        a.bases["phi" + std::to_string(k)] = g;
    }
    return a;
}

void check_independent(const std::vector<Expr>& basis, const std::vector<std::string>& constants) {
    const auto is_constant = constant_test(constants);
    std::map<Expr, std::size_t, ExprLess> row_of;
    std::vector<SparseRow> rows;
    for (std::size_t j = 0; j < basis.size(); ++j) {
        for (auto& [fm, c] : separate(trig_reduce(basis[j]), is_constant)) {
            if (c.is_zero()) continue;
            auto [it, fresh] = row_of.emplace(fm, rows.size());
            if (fresh) rows.emplace_back();
            rows[it->second][j] = c;
        }
    }
    const auto ech = row_reduce(std::move(rows), basis.size(), PivotPolicy::Transcendental);
    if (ech.rank() != basis.size()) {
        const auto free = ech.free_columns();
        throw ModelError("ansatz basis is linearly dependent: " + to_string(basis.at(free.front())));
    }
}

DeterminingSystem extract(const PerturbedLagrangian& L, const AnsatzSpace& ansatz, const Assumptions& assumptions) {
    const JetSpace& sp = L.space;
    const int p = sp.order_p;
    DeterminingSystem sys;
    sys.space = sp;
    sys.assumptions = assumptions;
    for (const auto& [name, a] : assumptions) sys.constants.push_back(name);
    const auto is_constant = constant_test(sys.constants);

    auto basis_for = [&](const std::string& fam, const std::string& var, int k) -> std::vector<Expr> {
        if (const auto* b = ansatz.lookup(fam, var, k)) {
            check_independent(*b, sys.constants);
            return *b;
        }
        if (ansatz.missing_is_empty) return {};
        throw AnsatzIncomplete("no ansatz for " + fam + " of " + var + " at order " + std::to_string(k));
    };
    auto new_unknown = [&](const std::string& fam, const std::string& var, int k, std::size_t j) {
        Expr c = Expr::symbol("c_" + fam + "_" + var + "_" + std::to_string(k) + "_" + std::to_string(j));
        sys.unknowns.push_back(c);
        return c;
    };

    // Seed bases live in (x, u_(0)); the family definition takes them as parameters.
    std::vector<std::string> params;
    Bindings to_params;
    for (std::size_t i = 0; i < sp.n(); ++i) {
        params.push_back("#" + std::to_string(params.size()));
        to_params.emplace(sp.x(i), Expr::symbol(params.back()));
    }
    for (std::size_t al = 0; al < sp.m(); ++al) {
        params.push_back("#" + std::to_string(params.size()));
        to_params.emplace(sp.u(al, 0), Expr::symbol(params.back()));
    }
    auto seed_ok = [&](const Expr& e) {
        return atoms_of(e, [&](const Expr& a) {
                   if (a.kind() == Kind::Jet) return a.eps_order() != 0 || a.jet_derivative_order() != 0;
                   return a.kind() == Kind::Fn;
               }).empty();
    };

    std::map<std::pair<std::string, int>, FunctionDef> defs;
    std::vector<std::string> xi_names, eta_names;
    auto add_family = [&](const std::string& fam, const std::string& var) {
        const std::string fname = fam + "_" + var;
        for (int k = 0; k <= p; ++k) {
            const auto basis = basis_for(fam, var, k);
            Expr body(0);
            for (std::size_t j = 0; j < basis.size(); ++j) {
                if (!seed_ok(basis[j]))
                    throw ModelError("ansatz for " + fname + " must depend on independent variables and u_(0) only: " +
                                     to_string(basis[j]));
                body += new_unknown(fam, var, k, j) * substitute(basis[j], to_params);
            }
            defs[{fname, k}] = FunctionDef{params, body, std::nullopt};
        }
        return fname;
    };
    for (const auto& x : sp.independent) xi_names.push_back(add_family("xi", x));
    for (const auto& u : sp.dependent) eta_names.push_back(add_family("eta", u));

    FunctionResolver resolve = [&defs](const std::string& name, int family) -> std::optional<FunctionDef> {
        auto it = defs.find({name, family});
        if (it == defs.end()) return std::nullopt;
        return it->second;
    };
    std::vector<EpsSeries> xs, es;
    for (const auto& n : xi_names) {
        EpsSeries s = build_infinitesimals(family_function(n, 0, sp), sp);
        for (auto& c : s.c) c = substitute_functions(c, resolve);
        xs.push_back(s);
    }
    for (const auto& n : eta_names) {
        EpsSeries s = build_infinitesimals(family_function(n, 0, sp), sp);
        for (auto& c : s.c) c = substitute_functions(c, resolve);
        es.push_back(s);
    }
    ApproximateGenerator g = ApproximateGenerator::from_series(sp, xs, es);
    sys.xi = g.xi();
    sys.eta = g.eta();

    Gauge phi(p + 1, std::vector<Expr>(sp.n()));
    for (int k = 0; k <= p; ++k)
        for (std::size_t i = 0; i < sp.n(); ++i) {
            const auto basis = basis_for("phi", sp.independent[i], k);
            for (std::size_t j = 0; j < basis.size(); ++j) {
                const bool ok = atoms_of(basis[j], [&](const Expr& a) {
                                    if (a.kind() == Kind::Jet) return a.eps_order() > k || a.jet_derivative_order() != 0;
                                    return a.kind() == Kind::Fn;
                                }).empty();
                if (!ok)
                    throw ModelError("gauge ansatz at order " + std::to_string(k) +
                                     " must depend on independent variables and u_(0..k) only: " + to_string(basis[j]));
                phi[k][i] += new_unknown("phi", sp.independent[i], k, j) * basis[j];
            }
        }
    sys.phi = phi;

    std::map<Expr, std::size_t, ExprLess> column;
    for (std::size_t c = 0; c < sys.unknowns.size(); ++c) column.emplace(sys.unknowns[c], c);

    const EpsSeries res = variational_residual(g, L, phi);
    const auto jets = first_derivative_generators(sp, p);
    const auto is_coefficient = [&](const Expr& b) { return is_constant(b) || column.count(b) > 0; };
    for (int k = 0; k <= p; ++k) {
        const Expr r = trig_reduce(res.c[k]);
        const auto leftover = atoms_of(r, [](const Expr& a) { return a.kind() == Kind::Fn && a.family() != kNoFamily; });
        if (!leftover.empty()) throw AnsatzIncomplete("residual still contains " + to_string(leftover.front()));
        for (auto& [jm, jc] : collect(r, jets)) {
            for (auto& [fm, fc] : separate(jc, is_coefficient)) {
                if (fc.is_zero()) continue;
                DeterminingEquation eq;
                eq.order = k;
                eq.jet_monomial = jm;
                eq.function_monomial = fm;
                for (auto& [um, uc] : collect(fc, sys.unknowns)) {
                    if (uc.is_zero()) continue;
                    auto it = column.find(um);
                    if (it == column.end())
                        throw NotPolynomial("determining equation is not linear in the unknowns: " + to_string(fc));
                    eq.row[it->second] = uc;
                }
                if (eq.row.empty()) continue;
                eq.lhs = fc;
                sys.equations.push_back(std::move(eq));
            }
        }
    }
    return sys;
}

std::vector<Solution> solve(const DeterminingSystem& sys) {
    std::vector<SparseRow> rows;
    rows.reserve(sys.equations.size());
    for (const auto& eq : sys.equations) rows.push_back(eq.row);
    const auto ech = row_reduce(std::move(rows), sys.unknowns.size(), PivotPolicy::Transcendental, sys.assumptions);
    std::vector<Solution> out;
    for (auto& v : nullspace(ech)) {
        Bindings b;
        for (std::size_t c = 0; c < v.size(); ++c) b.emplace(sys.unknowns[c], v[c]);
        auto sub = [&](const std::vector<std::vector<Expr>>& comps) {
            auto r = comps;
            for (auto& row : r)
                for (auto& e : row) e = substitute(e, b);
            return r;
        };
        Solution s;
        s.generator = ApproximateGenerator(sys.space, sub(sys.xi), sub(sys.eta));
        s.gauge = sub(sys.phi);
        s.values = std::move(v);
        out.push_back(std::move(s));
    }
    return out;
}

bool in_solution_span(const std::vector<Solution>& basis, const ApproximateGenerator& g, const Gauge& phi,
                      const std::vector<std::string>& constants) {
    const auto is_constant = constant_test(constants);
    std::vector<CoordMap> cols;
    for (const auto& s : basis) cols.push_back(coordinates(s.generator.xi(), s.generator.eta(), s.gauge, is_constant));
    cols.push_back(coordinates(g.xi(), g.eta(), phi, is_constant));
    std::map<CoordKey, std::size_t, CoordLess> row_index;
    std::vector<SparseRow> rows;
    for (std::size_t j = 0; j < cols.size(); ++j)
        for (auto& [key, c] : cols[j]) {
            auto [it, fresh] = row_index.emplace(key, rows.size());
            if (fresh) rows.emplace_back();
            rows[it->second][j] = c;
        }
    const auto ech = row_reduce(std::move(rows), cols.size(), PivotPolicy::Transcendental);
    for (auto pc : ech.pivots)
        if (pc == basis.size()) return false;
    return true;
}

}  // namespace approxsym
