#include "approxsym/calculus.hpp"

#include <set>
#include <unordered_set>

#include "approxsym/errors.hpp"

namespace approxsym {

namespace {

class Deriver {
public:
    explicit Deriver(const Derivation& d) : d_(d) {}

    Expr run(const Expr& e) {
        if ((e.signature() & d_.mask) == 0) return Expr(0);
        if (e.is_number()) return Expr(0);
        if (auto it = cache_.find(e.node()); it != cache_.end()) return it->second;
        Expr r = compute(e);
        cache_.emplace(e.node(), r);
        return r;
    }

private:
    const Derivation& d_;
    std::unordered_map<const Node*, Expr> cache_;

    Expr compute(const Expr& e) {
        switch (e.kind()) {
            case Kind::Number: return Expr(0);
            case Kind::Symbol:
            case Kind::Jet: return d_.leaf ? d_.leaf(e) : Expr(0);
            case Kind::Func: {
                const Expr& a = e.args()[0];
                Expr da = run(a);
                if (da.is_zero()) return da;
                const std::string& f = e.name();
                if (f == "sin") return cos(a) * da;
                if (f == "cos") return -(sin(a) * da);
                if (f == "exp") return e * da;
                if (f == "log") return da * pow(a, -1);
                throw Error("cannot differentiate " + f);
            }
            case Kind::Fn: {
                SumBuilder sb;
                if (d_.fn_extra) sb.add(d_.fn_extra(e));
                for (std::size_t s = 0; s < e.args().size(); ++s) {
                    Expr da = run(e.args()[s]);
                    if (!da.is_zero()) sb.add(fn_partial(e, s) * da);
                }
                return sb.build();
            }
            case Kind::Integral: {
                const Expr& a = e.args()[0];
                Expr da = run(a);
                if (da.is_zero()) return da;
                return Expr::fn(e.name(), {a}) * da;
            }
            case Kind::Mul: {
                const auto& ops = e.operands();
                SumBuilder sb;
                for (std::size_t i = 0; i < ops.size(); ++i) {
                    Expr db = run(ops[i].first);
                    if (db.is_zero()) continue;
                    auto f = ops;
                    f[i].second -= 1;
                    sb.add(product(e.coefficient() * ops[i].second, std::move(f)) * db);
                }
                return sb.build();
            }
            case Kind::Add: {
                SumBuilder sb;
                for (const auto& [t, c] : e.operands()) sb.add(run(t), c);
                return sb.build();
            }
        }
        return Expr(0);
    }
};

}  // namespace

Expr derive(const Expr& e, const Derivation& d) { return Deriver(d).run(e); }

Expr fn_partial(const Expr& fn, std::size_t slot) {
    auto deriv = fn.fn_derivative();
    deriv.at(slot) += 1;
    return Expr::fn(fn.name(), fn.args(), std::move(deriv), fn.family());
}

Expr differentiate(const Expr& e, const Expr& v) {
    if (v.kind() != Kind::Symbol && v.kind() != Kind::Jet)
        throw Error("can only differentiate with respect to a symbol or jet coordinate");
    Derivation d;
    std::uint64_t mask = v.signature();
    if (v.kind() == Kind::Jet && (mask & ~kJetSignatureBit) != 0) mask &= ~kJetSignatureBit;
    d.mask = mask;
    d.leaf = [&v](const Expr& x) { return x == v ? Expr(1) : Expr(0); };
    return derive(e, d);
}

// ---------------------------------------------------------------------------

namespace {

class Substituter {
public:
    Substituter(const Bindings& b) : b_(b) {
        for (const auto& [k, v] : b) mask_ |= k.signature();
    }

    Expr run(const Expr& e) {
        if ((e.signature() & mask_) == 0) return e;
        if (auto it = cache_.find(e.node()); it != cache_.end()) return it->second;
        Expr r = compute(e);
        cache_.emplace(e.node(), r);
        return r;
    }

private:
    const Bindings& b_;
    std::uint64_t mask_ = 0;
    std::unordered_map<const Node*, Expr> cache_;

    Expr compute(const Expr& e) {
        if (e.is_atom()) {
            if (auto it = b_.find(e); it != b_.end()) return it->second;
        }
        switch (e.kind()) {
            case Kind::Number:
            case Kind::Symbol:
            case Kind::Jet: return e;
            case Kind::Func: return Expr::func(e.name(), run(e.args()[0]));
            case Kind::Integral: return Expr::integral(e.name(), run(e.args()[0]));
            case Kind::Fn: {
                std::vector<Expr> args;
                for (const auto& a : e.args()) args.push_back(run(a));
                return Expr::fn(e.name(), std::move(args), e.fn_derivative(), e.family());
            }
            case Kind::Mul: {
                std::vector<std::pair<Expr, Rational>> kept;
                std::vector<std::pair<Expr, Rational>> changed;
                for (const auto& [b, x] : e.operands()) {
                    Expr nb = run(b);
                    if (nb == b)
                        kept.emplace_back(b, x);
                    else
                        changed.emplace_back(nb, x);
                }
                Expr r = product(e.coefficient(), std::move(kept));
                for (const auto& [b, x] : changed) {
                    if (r.is_zero()) break;
                    if (b.is_zero() && x < 0) throw Error("division by zero during substitution");
                    r = r * pow(b, x);
                }
                return r;
            }
            case Kind::Add: {
                SumBuilder sb;
                sb.add(Expr(e.coefficient()));
                for (const auto& [t, c] : e.operands()) sb.add(run(t), c);
                return sb.build();
            }
        }
        return e;
    }
};

}  // namespace

Expr substitute(const Expr& e, const Bindings& bindings) {
    if (bindings.empty()) return e;
    return Substituter(bindings).run(e);
}

// ---------------------------------------------------------------------------

namespace {

class FunctionSubstituter {
public:
    explicit FunctionSubstituter(const FunctionResolver& r) : resolve_(r) {}

    Expr run(const Expr& e) {
        if ((e.signature() & kFnSignatureBit) == 0) return e;
        if (auto it = cache_.find(e.node()); it != cache_.end()) return it->second;
        Expr r = compute(e);
        cache_.emplace(e.node(), r);
        return r;
    }

private:
    const FunctionResolver& resolve_;
    std::unordered_map<const Node*, Expr> cache_;

    static Expr instantiate(const FunctionDef& def, const Expr& body, const std::vector<Expr>& args) {
        if (def.params.size() != args.size()) throw ModelError("function definition arity mismatch");
        Bindings b;
        for (std::size_t i = 0; i < args.size(); ++i) b.emplace(Expr::symbol(def.params[i]), args[i]);
        return substitute(body, b);
    }

    Expr compute(const Expr& e) {
        switch (e.kind()) {
            case Kind::Number:
            case Kind::Symbol:
            case Kind::Jet: return e;
            case Kind::Func: return Expr::func(e.name(), run(e.args()[0]));
            case Kind::Integral: {
                Expr arg = run(e.args()[0]);
                auto def = resolve_(e.name(), kNoFamily);
                if (!def) return Expr::integral(e.name(), arg);
                if (!def->antiderivative)
                    throw ModelError("function '" + e.name() + "' has no antiderivative for Int(" + e.name() + ",.)");
                return instantiate(*def, *def->antiderivative, {arg});
            }
            case Kind::Fn: {
                std::vector<Expr> args;
                for (const auto& a : e.args()) args.push_back(run(a));
                auto def = resolve_(e.name(), e.family());
                if (!def) return Expr::fn(e.name(), std::move(args), e.fn_derivative(), e.family());
                Expr body = def->body;
                const auto& d = e.fn_derivative();
                for (std::size_t s = 0; s < d.size(); ++s)
                    for (int n = 0; n < d[s]; ++n) body = differentiate(body, Expr::symbol(def->params.at(s)));
                return instantiate(*def, body, args);
            }
            case Kind::Mul: {
                Expr r(e.coefficient());
                for (const auto& [b, x] : e.operands()) r = r * pow(run(b), x);
                return r;
            }
            case Kind::Add: {
                SumBuilder sb;
                sb.add(Expr(e.coefficient()));
                for (const auto& [t, c] : e.operands()) sb.add(run(t), c);
                return sb.build();
            }
        }
        return e;
    }
};

}  // namespace

Expr substitute_functions(const Expr& e, const FunctionResolver& resolve) {
    return FunctionSubstituter(resolve).run(e);
}

void visit(const Expr& e, const std::function<bool(const Expr&)>& enter) {
    std::unordered_set<const Node*> seen;
    std::vector<Expr> stack{e};
    while (!stack.empty()) {
        Expr x = stack.back();
        stack.pop_back();
        if (!seen.insert(x.node()).second) continue;
        if (!enter(x)) continue;
        switch (x.kind()) {
            case Kind::Func:
            case Kind::Fn:
            case Kind::Integral:
                for (const auto& a : x.args()) stack.push_back(a);
                break;
            case Kind::Mul:
            case Kind::Add:
                for (const auto& [y, c] : x.operands()) stack.push_back(y);
                break;
            default: break;
        }
    }
}

bool depends_on(const Expr& e, const Expr& atom) {
    if ((e.signature() & atom.signature()) != atom.signature()) return false;
    bool found = false;
    visit(e, [&](const Expr& x) {
        if (found) return false;
        if (x == atom) {
            found = true;
            return false;
        }
        return (x.signature() & atom.signature()) == atom.signature();
    });
    return found;
}

std::vector<Expr> atoms_of(const Expr& e, const std::function<bool(const Expr&)>& pred) {
    std::set<Expr, ExprLess> out;
    visit(e, [&](const Expr& x) {
        if (x.is_atom() && pred(x)) out.insert(x);
        return true;
    });
    return {out.begin(), out.end()};
}

}  // namespace approxsym
