#include "approxsym/noether.hpp"

#include <map>
#include <set>
#include <tuple>

#include "approxsym/errors.hpp"
#include "approxsym/print.hpp"
#include "approxsym/simplify.hpp"

namespace approxsym {

PerturbedLagrangian PerturbedLagrangian::from_source(const Expr& lagrangian, const JetSpace& space) {
    return {space, expand(lagrangian, space)};
}

bool PerturbedLagrangian::linear_in_top_order() const {
    for (int k = 1; k <= L.order(); ++k) {
        auto jets = atoms_of(L.c[k], [k](const Expr& x) { return x.kind() == Kind::Jet && x.eps_order() == k; });
        if (jets.empty()) continue;
        try {
            for (const auto& [mono, coeff] : collect(L.c[k], jets)) {
                int degree = 0;
                for (const auto& [b, x] : factors_of(mono)) degree += static_cast<int>(x.get_num().get_si());
                if (degree > 1) return false;
            }
        } catch (const NotPolynomial&) {
            return false;
        }
    }
    return true;
}

Gauge zero_gauge(const JetSpace& space) {
    return Gauge(static_cast<std::size_t>(space.order_p + 1), std::vector<Expr>(space.n()));
}

std::string to_string(LawClass c) {
    switch (c) {
        case LawClass::Nontrivial: return "nontrivial";
        case LawClass::Trivial: return "trivial";
        case LawClass::OnShellTrivial: return "on-shell-trivial";
        case LawClass::Unverified: return "unverified";
    }
    return "unverified";
}

std::vector<EpsSeries> euler_lagrange(const PerturbedLagrangian& L) {
    const JetSpace& s = L.space;
    std::vector<EpsSeries> out;
    for (std::size_t a = 0; a < s.m(); ++a) {
        EpsSeries e(s.order_p);
        for (int k = 0; k <= s.order_p; ++k) {
            SumBuilder sb;
            sb.add(differentiate(L.L.c[k], s.u(a, 0)));
            for (std::size_t i = 0; i < s.n(); ++i)
                sb.add(total_derivative(differentiate(L.L.c[k], s.du(a, 0, i)), i, s), Rational(-1));
            e.c[k] = sb.build();
        }
        out.push_back(std::move(e));
    }
    return out;
}

EpsSeries variational_residual(ApproximateGenerator g, const PerturbedLagrangian& L, const Gauge& phi) {
    const JetSpace& s = L.space;
    const int p = s.order_p;
    g.prolong(1);
    std::vector<Expr> div_xi(static_cast<std::size_t>(p + 1));
    for (int j = 0; j <= p; ++j) {
        SumBuilder sb;
        for (std::size_t i = 0; i < s.n(); ++i) sb.add(total_derivative(g.xi(j, i), i, s));
        div_xi[j] = sb.build();
    }
    EpsSeries r(p);
    for (int k = 0; k <= p; ++k) {
        SumBuilder sb;
        for (int j = 0; j <= k; ++j) {
            const Expr& Lm = L.L.c[k - j];
            sb.add(act(g, j, Lm, 1));
            if (!div_xi[j].is_zero()) sb.add(Lm * div_xi[j]);
        }
        for (std::size_t i = 0; i < s.n(); ++i) sb.add(total_derivative(phi.at(k).at(i), i, s));
        r.c[k] = sb.build();
    }
    return r;
}

OnShell solve_on_shell(const PerturbedLagrangian& L) {
    const JetSpace& s = L.space;
    const auto el = euler_lagrange(L);
    std::vector<Expr> equations;
    for (const auto& series : el)
        for (const auto& e : series.c)
            if (!is_identically_zero(e)) equations.push_back(e);
    std::set<Expr, ExprLess> unknown_set;
    for (const auto& e : equations)
        for (const auto& a : atoms_of(e, [](const Expr& x) { return x.kind() == Kind::Jet && x.jet_derivative_order() == 2; }))
            unknown_set.insert(a);
    const std::vector<Expr> unknowns(unknown_set.begin(), unknown_set.end());
    const std::size_t nu = unknowns.size();
    // Rows: coefficients of the unknowns, then the remainder in column nu.
    std::vector<SparseRow> rows;
    for (const auto& e : equations) {
        SparseRow row;
        for (const auto& [mono, coeff] : collect(e, unknowns)) {
            if (mono.is_one()) {
                row[nu] = coeff;
                continue;
            }
            if (!mono.is_atom()) throw CannotSolveForLeadingDerivative("equation is nonlinear in second derivatives: " + to_string(e));
            const std::size_t c = static_cast<std::size_t>(
                std::find(unknowns.begin(), unknowns.end(), mono) - unknowns.begin());
            row[c] = coeff;
        }
        rows.push_back(std::move(row));
    }
    std::vector<bool> used(rows.size(), false);
    std::vector<std::pair<std::size_t, std::size_t>> pivots;  // (column, row)
    for (std::size_t c = 0; c < nu; ++c) {
        std::size_t best = rows.size();
        bool any = false;
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (used[r]) continue;
            auto it = rows[r].find(c);
            if (it == rows[r].end()) continue;
            if (is_identically_zero(it->second)) {
                rows[r].erase(it);
                continue;
            }
            any = true;
            if (it->second.kind() != Kind::Add && best == rows.size()) best = r;
        }
        if (best == rows.size()) {
            if (any)
                throw CannotSolveForLeadingDerivative("no single-term pivot for " + to_string(unknowns[c]) +
                                                      " in the Euler-Lagrange hierarchy");
            continue;
        }
        used[best] = true;
        const Expr inv = pow(rows[best].at(c), -1);
        for (auto& [col, v] : rows[best]) v = col == c ? Expr(1) : v * inv;
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (r == best) continue;
            auto it = rows[r].find(c);
            if (it == rows[r].end()) continue;
            const Expr f = it->second;
            for (const auto& [col, v] : rows[best]) {
                Expr nv = rows[r][col] - f * v;
                if (col == c || nv.is_zero())
                    rows[r].erase(col);
                else
                    rows[r][col] = nv;
            }
        }
        pivots.emplace_back(c, best);
    }
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (used[r]) continue;
        for (const auto& [col, v] : rows[r])
            if (!is_identically_zero(v))
                throw CannotSolveForLeadingDerivative("Euler-Lagrange hierarchy imposes a constraint: " + to_string(v));
    }
    OnShell out;
    for (const auto& [c, r] : pivots) {
        SumBuilder sb;
        for (const auto& [col, v] : rows[r]) {
            if (col == c) continue;
            sb.add(col == nu ? v : v * unknowns[col], Rational(-1));
        }
        out.rules.emplace(unknowns[c], sb.build());
    }
    (void)s;
    return out;
}

std::vector<std::vector<Expr>> assemble_fluxes(const ApproximateGenerator& g, const PerturbedLagrangian& L,
                                               const Gauge& phi, FluxAssembly assembly) {
    const JetSpace& s = L.space;
    const int p = s.order_p;
    // W_(ℓ)α: characteristic coefficients; P_(m)α,i: momenta.
    std::vector<std::vector<Expr>> W(p + 1, std::vector<Expr>(s.m()));
    for (int l = 0; l <= p; ++l)
        for (std::size_t a = 0; a < s.m(); ++a) {
            SumBuilder sb;
            sb.add(g.eta(l, a));
            for (std::size_t j = 0; j < s.n(); ++j) {
                if (assembly == FluxAssembly::Expanded) {
                    for (int b = 0; b <= l; ++b) sb.add(g.xi(l - b, j) * s.du(a, b, j), Rational(-1));
                } else {
                    sb.add(g.xi(l, j) * s.du(a, l, j), Rational(-1));
                }
            }
            W[l][a] = sb.build();
        }
    std::vector<std::vector<Expr>> fluxes(p + 1, std::vector<Expr>(s.n()));
    for (int k = 0; k <= p; ++k)
        for (std::size_t i = 0; i < s.n(); ++i) {
            SumBuilder sb;
            for (int l = 0; l <= k; ++l) {
                const Expr& Lm = L.L.c[k - l];
                for (std::size_t a = 0; a < s.m(); ++a) {
                    Expr P = differentiate(Lm, s.du(a, 0, i));
                    if (assembly == FluxAssembly::Literal)
                        for (int q = 1; q <= k - l; ++q) P = P + differentiate(Lm, s.du(a, q, i));
                    if (!P.is_zero() && !W[l][a].is_zero()) sb.add(W[l][a] * P);
                }
                sb.add(g.xi(l, i) * Lm);
            }
            sb.add(phi.at(k).at(i));
            fluxes[k][i] = trig_reduce(sb.build());
        }
    return fluxes;
}

std::vector<Expr> divergence(const std::vector<std::vector<Expr>>& fluxes, const PerturbedLagrangian& L,
                             const OnShell& on_shell) {
    const JetSpace& s = L.space;
    std::vector<Expr> out;
    for (const auto& row : fluxes) {
        SumBuilder sb;
        for (std::size_t i = 0; i < s.n(); ++i) sb.add(total_derivative(row.at(i), i, s));
        out.push_back(substitute(sb.build(), on_shell.rules));
    }
    return out;
}

std::vector<bool> divergence_check(const std::vector<std::vector<Expr>>& fluxes, const PerturbedLagrangian& L,
                                   const OnShell& on_shell) {
    std::vector<bool> ok;
    for (const auto& d : divergence(fluxes, L, on_shell)) ok.push_back(is_identically_zero(d));
    return ok;
}

namespace {

LawClass classify_fluxes(const std::vector<std::vector<Expr>>& fluxes, const OnShell& on_shell) {
    bool all_zero = true, shell_zero = true;
    for (const auto& row : fluxes)
        for (const auto& f : row) {
            if (!is_identically_zero(f)) {
                all_zero = false;
                if (!is_identically_zero(substitute(f, on_shell.rules))) shell_zero = false;
            }
        }
    if (all_zero) return LawClass::Trivial;
    if (shell_zero) return LawClass::OnShellTrivial;
    return LawClass::Nontrivial;
}

}  // namespace

ConservationLaw make_law(std::vector<std::vector<Expr>> fluxes, const PerturbedLagrangian& L, const OnShell& on_shell) {
    ConservationLaw law;
    law.order_ok = divergence_check(fluxes, L, on_shell);
    law.verified = true;
    for (bool b : law.order_ok) law.verified = law.verified && b;
    law.classification = law.verified ? classify_fluxes(fluxes, on_shell) : LawClass::Unverified;
    law.fluxes = std::move(fluxes);
    return law;
}

ConservationLaw noether_fluxes(const ApproximateGenerator& g, const PerturbedLagrangian& L, const Gauge& phi,
                               const OnShell& on_shell, FluxAssembly assembly) {
    const EpsSeries res = variational_residual(g, L, phi);
    for (int k = 0; k <= res.order(); ++k) {
        if (!is_identically_zero(res.c[k]))
            throw NotAVariationalSymmetry("variational residual is nonzero at order " + std::to_string(k) + ": " +
                                          to_string(trig_reduce(res.c[k])));
    }
    ConservationLaw law = make_law(assemble_fluxes(g, L, phi, assembly), L, on_shell);
    if (!law.verified) {
        std::string bad;
        for (std::size_t k = 0; k < law.order_ok.size(); ++k)
            if (!law.order_ok[k]) bad += (bad.empty() ? "" : ", ") + std::to_string(k);
        throw FormulaMismatch("zero residual but the flux divergence does not vanish on-shell at order " + bad);
    }
    return law;
}

// ---------------------------------------------------------------------------
// Dependencies

namespace {

struct Column {
    std::size_t law;
    int shift;
    std::vector<std::vector<Expr>> values;  // [k][i]
};

std::vector<std::vector<Expr>> shifted(const std::vector<std::vector<Expr>>& f, int s) {
    std::vector<std::vector<Expr>> out(f.size(), std::vector<Expr>(f.at(0).size()));
    for (std::size_t k = static_cast<std::size_t>(s); k < f.size(); ++k) out[k] = f[k - static_cast<std::size_t>(s)];
    return out;
}

bool all_zero(const std::vector<std::vector<Expr>>& f) {
    for (const auto& row : f)
        for (const auto& x : row)
            if (!is_identically_zero(x)) return false;
    return true;
}

/// Rows keyed by (order, component, function monomial); constant monomials dropped.
std::vector<SparseRow> build_rows(const std::vector<std::vector<std::vector<Expr>>>& columns,
                                  const std::vector<std::string>& constants) {
    std::set<std::string> cset(constants.begin(), constants.end());
    auto is_const = [&](const Expr& a) { return a.kind() == Kind::Symbol && cset.count(a.name()); };
    std::map<std::tuple<std::size_t, std::size_t, Expr>, SparseRow,
             decltype([](const auto& a, const auto& b) {
                 if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) < std::get<0>(b);
                 if (std::get<1>(a) != std::get<1>(b)) return std::get<1>(a) < std::get<1>(b);
                 return compare(std::get<2>(a), std::get<2>(b)) < 0;
             })>
        rows;
    for (std::size_t c = 0; c < columns.size(); ++c) {
        const auto& f = columns[c];
        for (std::size_t k = 0; k < f.size(); ++k)
            for (std::size_t i = 0; i < f[k].size(); ++i) {
                Expr x = trig_reduce(f[k][i]);
                if (x.is_zero()) continue;
                for (const auto& [mono, coeff] : separate(x, is_const)) {
                    if (mono.is_one()) continue;
                    rows[{k, i, mono}][c] = coeff;
                }
            }
    }
    std::vector<SparseRow> out;
    for (auto& [key, row] : rows) out.push_back(std::move(row));
    return out;
}

std::vector<Column> law_columns(const std::vector<ConservationLaw>& laws, int p) {
    std::vector<Column> cols;
    for (std::size_t j = 0; j < laws.size(); ++j)
        for (int s = 0; s <= p; ++s) {
            auto v = shifted(laws[j].fluxes, s);
            if (all_zero(v)) continue;
            cols.push_back({j, s, std::move(v)});
        }
    return cols;
}

}  // namespace

std::vector<Dependency> classify(const std::vector<ConservationLaw>& laws, const PerturbedLagrangian& L,
                                 const std::vector<std::string>& constants) {
    const auto cols = law_columns(laws, L.space.order_p);
    std::vector<std::vector<std::vector<Expr>>> values;
    for (const auto& c : cols) values.push_back(c.values);
    auto ech = row_reduce(build_rows(values, constants), cols.size(), PivotPolicy::Transcendental);
    std::vector<Dependency> out;
    for (const auto& v : nullspace(ech)) {
        Dependency d;
        for (std::size_t c = 0; c < v.size(); ++c)
            if (!v[c].is_zero()) d.push_back({cols[c].law, cols[c].shift, v[c]});
        out.push_back(std::move(d));
    }
    return out;
}

bool in_span(const std::vector<std::vector<Expr>>& target, const std::vector<ConservationLaw>& laws,
             const PerturbedLagrangian& L, const std::vector<std::string>& constants, Dependency* coefficients) {
    const auto cols = law_columns(laws, L.space.order_p);
    std::vector<std::vector<std::vector<Expr>>> values;
    for (const auto& c : cols) values.push_back(c.values);
    values.push_back(target);
    const std::size_t t = cols.size();
    auto ech = row_reduce(build_rows(values, constants), t + 1, PivotPolicy::Transcendental);
    for (std::size_t pc : ech.pivots)
        if (pc == t) return false;
    if (coefficients) {
        coefficients->clear();
        for (std::size_t r = 0; r < ech.rows.size(); ++r) {
            auto it = ech.rows[r].find(t);
            if (it == ech.rows[r].end()) continue;
            const auto& col = cols[ech.pivots[r]];
            coefficients->push_back({col.law, col.shift, it->second});
        }
    }
    return true;
}

}  // namespace approxsym
