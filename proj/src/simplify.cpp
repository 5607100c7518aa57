#include "approxsym/simplify.hpp"

#include <unordered_map>

#include "approxsym/calculus.hpp"
#include "approxsym/errors.hpp"

namespace approxsym {

namespace {

bool has_trig(const Expr& e) {
    bool found = false;
    visit(e, [&](const Expr& x) {
        if (found) return false;
        if (x.kind() == Kind::Func && (x.name() == "sin" || x.name() == "cos")) found = true;
        return !found;
    });
    return found;
}

Rational binomial(long n, long k) {
    mpz_class r;
    mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
    return Rational(r);
}

/// sin(n a) or cos(n a) as a polynomial in sin a, cos a.
Expr multiple_angle(bool is_sin, long n, const Expr& a) {
    const Expr s = sin(a), c = cos(a);
    SumBuilder sb;
    for (long j = is_sin ? 1 : 0; j <= n; j += 2) {
        const long half = is_sin ? (j - 1) / 2 : j / 2;
        Rational coeff = binomial(n, j) * (half % 2 ? -1 : 1);
        sb.add(pow(c, static_cast<int>(n - j)) * pow(s, static_cast<int>(j)), coeff);
    }
    return sb.build();
}

class TrigReducer {
public:
    Expr run(const Expr& e) {
        if (e.is_number() || e.kind() == Kind::Symbol || e.kind() == Kind::Jet) return e;
        if (auto it = cache_.find(e.node()); it != cache_.end()) return it->second;
        Expr r = reduce_powers(expand_angles(e));
        cache_.emplace(e.node(), r);
        return r;
    }

private:
    std::unordered_map<const Node*, Expr> cache_;
    std::unordered_map<const Node*, Expr> angle_cache_;

    Expr expand_angles(const Expr& e) {
        if (e.is_number() || e.kind() == Kind::Symbol || e.kind() == Kind::Jet) return e;
        if (auto it = angle_cache_.find(e.node()); it != angle_cache_.end()) return it->second;
        Expr r = expand_angles_impl(e);
        angle_cache_.emplace(e.node(), r);
        return r;
    }

    Expr expand_angles_impl(const Expr& e) {
        switch (e.kind()) {
            case Kind::Func: {
                Expr arg = run(e.args()[0]);
                const bool trig = e.name() == "sin" || e.name() == "cos";
                if (trig && arg.kind() == Kind::Mul && arg.coefficient().get_den() == 1 && arg.coefficient() > 1) {
                    const long n = arg.coefficient().get_num().get_si();
                    Expr a = arg * Expr(Rational(1, n));
                    return multiple_angle(e.name() == "sin", n, a);
                }
                return Expr::func(e.name(), arg);
            }
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
                    Expr nb = expand_angles(b);
                    if (nb == b)
                        kept.emplace_back(b, x);
                    else
                        changed.emplace_back(nb, x);
                }
                Expr r = product(e.coefficient(), std::move(kept));
                for (const auto& [b, x] : changed) r = r * pow(b, x);
                return r;
            }
            case Kind::Add: {
                SumBuilder sb;
                sb.add(Expr(e.coefficient()));
                for (const auto& [t, c] : e.operands()) sb.add(expand_angles(t), c);
                return sb.build();
            }
            default: return e;
        }
    }

    /// sin^k a -> sin^(k mod 2) a * (1 - cos^2 a)^(k div 2) in every term.
    static Expr reduce_powers(const Expr& e) {
        if (!has_trig(e)) return e;
        SumBuilder sb;
        bool changed = false;
        for (const Expr& t : terms_of(e)) {
            if (t.kind() != Kind::Mul) {
                sb.add(t);
                continue;
            }
            std::vector<std::pair<Expr, Rational>> kept;
            std::vector<std::pair<Expr, long>> sines;
            for (const auto& [b, x] : t.operands()) {
                if (b.kind() == Kind::Func && b.name() == "sin" && x.get_den() == 1 && x >= 2) {
                    const long k = x.get_num().get_si();
                    sines.emplace_back(b, k);
                    if (k % 2) kept.emplace_back(b, Rational(1));
                } else {
                    kept.emplace_back(b, x);
                }
            }
            if (sines.empty()) {
                sb.add(t);
                continue;
            }
            changed = true;
            Expr r = product(t.coefficient(), std::move(kept));
            for (const auto& [s, k] : sines) {
                const Expr c2 = pow(cos(s.args()[0]), 2);
                r = r * pow(Expr(1) - c2, static_cast<int>(k / 2));
            }
            sb.add(r);
        }
        return changed ? sb.build() : e;
    }
};

bool simple_arg(const Expr& a) { return a.kind() == Kind::Symbol || a.kind() == Kind::Jet; }

bool decidable(const Expr& e);

bool decidable_factor(const Expr& b, const Rational& x) {
    switch (b.kind()) {
        case Kind::Symbol:
        case Kind::Jet: return true;
        case Kind::Func:
            if (b.name() == "sin" || b.name() == "cos") return x > 0 && x.get_den() == 1 && simple_arg(b.args()[0]);
            return false;
        case Kind::Fn:
            for (const auto& a : b.args())
                if (!decidable(a)) return false;
            return true;
        case Kind::Integral: return decidable(b.args()[0]);
        default: return false;  // numeric radicals, sums as bases
    }
}

bool decidable(const Expr& e) {
    for (const Expr& t : terms_of(e)) {
        if (t.is_number()) continue;
        for (const auto& [b, x] : factors_of(t))
            if (!decidable_factor(b, x)) return false;
    }
    return true;
}

bool has_sum_base(const Expr& e) {
    for (const Expr& t : terms_of(e))
        for (const auto& [b, x] : factors_of(t))
            if (b.kind() == Kind::Add) return true;
    return false;
}

}  // namespace

Expr trig_reduce(const Expr& e) { return TrigReducer().run(e); }

Expr clear_sum_powers(const Expr& e) {
    // Lowest exponent of each sum base over all terms (absent counts as 0).
    std::map<Expr, Rational, ExprLess> low;
    const auto terms = terms_of(e);
    for (const Expr& t : terms)
        for (const auto& [b, x] : factors_of(t))
            if (b.kind() == Kind::Add) {
                auto [it, fresh] = low.emplace(b, x);
                if (!fresh && x < it->second) it->second = x;
            }
    if (low.empty()) return e;
    for (auto& [b, m] : low)
        if (m > 0) m = 0;
    SumBuilder sb;
    for (const Expr& t : terms) {
        auto [c, mono] = split_coefficient(t);
        std::vector<std::pair<Expr, Rational>> kept;
        std::map<Expr, Rational, ExprLess> sums;
        for (const auto& [b, x] : factors_of(mono)) {
            if (b.kind() == Kind::Add)
                sums[b] = x;
            else
                kept.emplace_back(b, x);
        }
        Expr r = product(c, std::move(kept));
        for (const auto& [b, m] : low) {
            auto it = sums.find(b);
            const Rational x = (it == sums.end() ? Rational(0) : it->second) - m;
            mpz_class whole;
            mpz_fdiv_q(whole.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
            const Rational frac = x - Rational(whole);
            if (frac != 0) r = r * product(Rational(1), {{b, frac}});
            if (whole > 0) r = r * pow(b, static_cast<int>(whole.get_si()));
        }
        sb.add(r);
    }
    return sb.build();
}

ZeroVerdict is_zero(const Expr& e) {
    if (e.is_zero()) return ZeroVerdict::True;
    Expr r = trig_reduce(e);
    if (r.is_zero()) return ZeroVerdict::True;
    if (has_sum_base(r)) {
        Expr c = trig_reduce(clear_sum_powers(r));
        if (c.is_zero()) return ZeroVerdict::True;
        if (decidable(c)) return ZeroVerdict::False;
        return ZeroVerdict::Unknown;
    }
    return decidable(r) ? ZeroVerdict::False : ZeroVerdict::Unknown;
}

MonomialMap collect(const Expr& e, const std::vector<Expr>& generators) {
    std::uint64_t mask = 0;
    for (const auto& g : generators) {
        if (!g.is_atom()) throw Error("collect generators must be atoms");
        mask |= g.signature();
    }
    auto is_gen = [&](const Expr& b) {
        for (const auto& g : generators)
            if (b == g) return true;
        return false;
    };
    std::map<Expr, SumBuilder, ExprLess> acc;
    for (const Expr& t : terms_of(e)) {
        auto [c, mono] = split_coefficient(t);
        std::vector<std::pair<Expr, Rational>> gen, rest;
        for (const auto& [b, x] : factors_of(mono)) {
            if (is_gen(b)) {
                if (x < 0 || x.get_den() != 1)
                    throw NotPolynomial("non-polynomial power of a generator in collect");
                gen.emplace_back(b, x);
            } else {
                if ((b.signature() & mask) != 0)
                    for (const auto& g : generators)
                        if (depends_on(b, g)) throw NotPolynomial("generator occurs inside a non-polynomial factor");
                rest.emplace_back(b, x);
            }
        }
        acc[product(Rational(1), std::move(gen))].add(product(c, std::move(rest)));
    }
    MonomialMap out;
    for (auto& [m, sb] : acc) {
        Expr v = sb.build();
        if (!v.is_zero()) out.emplace(m, v);
    }
    return out;
}

MonomialMap separate(const Expr& e, const std::function<bool(const Expr&)>& is_coefficient) {
    std::map<Expr, SumBuilder, ExprLess> acc;
    for (const Expr& t : terms_of(e)) {
        auto [c, mono] = split_coefficient(t);
        std::vector<std::pair<Expr, Rational>> coef, fun;
        for (const auto& [b, x] : factors_of(mono)) {
            if (b.is_atom() && is_coefficient(b))
                coef.emplace_back(b, x);
            else
                fun.emplace_back(b, x);
        }
        acc[product(Rational(1), std::move(fun))].add(product(c, std::move(coef)));
    }
    MonomialMap out;
    for (auto& [m, sb] : acc) {
        Expr v = sb.build();
        if (!v.is_zero()) out.emplace(m, v);
    }
    return out;
}

}  // namespace approxsym
