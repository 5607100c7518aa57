#include "approxsym/perturb.hpp"

#include <functional>
#include <unordered_map>

#include "approxsym/calculus.hpp"
#include "approxsym/errors.hpp"
#include "approxsym/print.hpp"
#include "approxsym/simplify.hpp"

namespace approxsym {

bool EpsSeries::is_zero() const {
    for (const auto& x : c)
        if (!is_identically_zero(x)) return false;
    return true;
}

namespace {

void check_orders(const EpsSeries& a, const EpsSeries& b) {
    if (a.order() != b.order())
        throw OrderMismatch("series orders differ: " + std::to_string(a.order()) + " vs " + std::to_string(b.order()));
}

Rational factorial(int n) {
    mpz_class f;
    mpz_fac_ui(f.get_mpz_t(), static_cast<unsigned long>(n));
    return Rational(f);
}

}  // namespace

EpsSeries series_add(const EpsSeries& a, const EpsSeries& b) {
    check_orders(a, b);
    EpsSeries r(a.order());
    for (std::size_t k = 0; k < a.c.size(); ++k) r.c[k] = a.c[k] + b.c[k];
    return r;
}

EpsSeries series_sub(const EpsSeries& a, const EpsSeries& b) {
    check_orders(a, b);
    EpsSeries r(a.order());
    for (std::size_t k = 0; k < a.c.size(); ++k) r.c[k] = a.c[k] - b.c[k];
    return r;
}

EpsSeries series_mul(const EpsSeries& a, const EpsSeries& b) {
    check_orders(a, b);
    EpsSeries r(a.order());
    for (std::size_t k = 0; k < a.c.size(); ++k) {
        SumBuilder sb;
        for (std::size_t l = 0; l <= k; ++l) {
            if (a.c[l].is_zero() || b.c[k - l].is_zero()) continue;
            sb.add(a.c[l] * b.c[k - l]);
        }
        r.c[k] = sb.build();
    }
    return r;
}

EpsSeries series_scale(const EpsSeries& a, const Expr& factor) {
    EpsSeries r(a.order());
    for (std::size_t k = 0; k < a.c.size(); ++k) r.c[k] = a.c[k] * factor;
    return r;
}

EpsSeries series_shift(const EpsSeries& a) {
    EpsSeries r(a.order());
    for (std::size_t k = 1; k < a.c.size(); ++k) r.c[k] = a.c[k - 1];
    return r;
}

EpsSeries series_pow(const EpsSeries& a, const Rational& q) {
    const int p = a.order();
    if (q == 0) return EpsSeries::constant(Expr(1), p);
    if (q > 0 && q.get_den() == 1) {
        unsigned long n = q.get_num().get_ui();
        EpsSeries result = EpsSeries::constant(Expr(1), p);
        EpsSeries b = a;
        while (n) {
            if (n & 1) result = series_mul(result, b);
            n >>= 1;
            if (n) b = series_mul(b, b);
        }
        return result;
    }
    const Expr& b0 = a.c[0];
    if (b0.is_zero() || is_identically_zero(b0)) {
        bool all_zero = true;
        for (const auto& x : a.c) all_zero = all_zero && is_identically_zero(x);
        if (all_zero && q > 0) return EpsSeries(p);
        throw SingularAtEpsZero("power " + q.get_str() + " of a series vanishing at eps = 0");
    }
    // Power-series recurrence: w_n = 1/(n b0) Σ_{k=1}^n ((q+1)k - n) b_k w_{n-k}.
    EpsSeries w(p);
    w.c[0] = pow(b0, q);
    const Expr inv_b0 = pow(b0, -1);
    for (int n = 1; n <= p; ++n) {
        SumBuilder sb;
        for (int k = 1; k <= n; ++k) {
            if (a.c[k].is_zero()) continue;
            const Rational f = (q + 1) * k - n;
            if (f == 0) continue;
            sb.add(a.c[k] * w.c[n - k], f);
        }
        w.c[n] = sb.build() * inv_b0 * Expr(Rational(1, n));
    }
    return w;
}

namespace {

class Expander {
public:
    explicit Expander(const JetSpace& s) : space_(s), p_(s.order_p) {}

    EpsSeries run(const Expr& e) {
        if (auto it = cache_.find(e.node()); it != cache_.end()) return it->second;
        EpsSeries r = compute(e);
        cache_.emplace(e.node(), r);
        return r;
    }

private:
    const JetSpace& space_;
    int p_;
    std::unordered_map<const Node*, EpsSeries> cache_;

    /// δ = a - a_0 and its powers δ^0..δ^p.
    std::vector<EpsSeries> delta_powers(const EpsSeries& a) const {
        EpsSeries d = a;
        d.c[0] = Expr(0);
        std::vector<EpsSeries> pw{EpsSeries::constant(Expr(1), p_)};
        for (int n = 1; n <= p_; ++n) pw.push_back(series_mul(pw.back(), d));
        return pw;
    }

    static bool vanishes_beyond_zero(const EpsSeries& a) {
        for (std::size_t k = 1; k < a.c.size(); ++k)
            if (!a.c[k].is_zero()) return false;
        return true;
    }

    EpsSeries compute(const Expr& e) {
        switch (e.kind()) {
            case Kind::Number: return EpsSeries::constant(e, p_);
            case Kind::Symbol: {
                if (e.name() == kEps) {
                    EpsSeries s(p_);
                    if (p_ >= 1) s.c[1] = Expr(1);
                    return s;
                }
                return EpsSeries::constant(e, p_);
            }
            case Kind::Jet: {
                if (e.eps_order() != kBaseOrder) return EpsSeries::constant(e, p_);
                if (space_.dependent_index(e.name()) < 0)
                    throw Error("'" + e.name() + "' is not a dependent variable of the jet space");
                EpsSeries s(p_);
                for (int k = 0; k <= p_; ++k) s.c[k] = Expr::jet(e.name(), k, e.jet_derivative());
                return s;
            }
            case Kind::Func: {
                EpsSeries a = run(e.args()[0]);
                if (vanishes_beyond_zero(a)) return EpsSeries::constant(Expr::func(e.name(), a.c[0]), p_);
                const Expr& a0 = a.c[0];
                auto dp = delta_powers(a);
                std::function<Expr(int)> nth;  // n-th derivative at a0
                const std::string& f = e.name();
                if (f == "sin" || f == "cos") {
                    const int shift = f == "cos" ? 1 : 0;
                    nth = [&, shift](int n) {
                        switch ((n + shift) % 4) {
                            case 0: return sin(a0);
                            case 1: return cos(a0);
                            case 2: return -sin(a0);
                            default: return -cos(a0);
                        }
                    };
                } else if (f == "exp") {
                    nth = [&](int) { return exp(a0); };
                } else if (f == "log") {
                    if (is_identically_zero(a0)) throw SingularAtEpsZero("log of a series vanishing at eps = 0");
                    nth = [&](int n) {
                        if (n == 0) return log(a0);
                        return Expr(factorial(n - 1) * (n % 2 ? 1 : -1)) * pow(a0, -n);
                    };
                } else {
                    throw Error("cannot expand function " + f);
                }
                EpsSeries r(p_);
                for (int n = 0; n <= p_; ++n)
                    r = series_add(r, series_scale(dp[n], nth(n) * Expr(Rational(1) / factorial(n))));
                return r;
            }
            case Kind::Integral: {
                EpsSeries a = run(e.args()[0]);
                const Expr& a0 = a.c[0];
                EpsSeries r = EpsSeries::constant(Expr::integral(e.name(), a0), p_);
                if (vanishes_beyond_zero(a)) return r;
                auto dp = delta_powers(a);
                for (int n = 1; n <= p_; ++n) {
                    Expr d = Expr::fn(e.name(), {a0}, {n - 1});
                    r = series_add(r, series_scale(dp[n], d * Expr(Rational(1) / factorial(n))));
                }
                return r;
            }
            case Kind::Fn: {
                const std::size_t na = e.args().size();
                std::vector<EpsSeries> args;
                std::vector<Expr> a0;
                for (const auto& x : e.args()) {
                    args.push_back(run(x));
                    a0.push_back(args.back().c[0]);
                }
                std::vector<std::vector<EpsSeries>> dps;
                std::vector<std::size_t> moving;
                for (std::size_t s = 0; s < na; ++s) {
                    if (!vanishes_beyond_zero(args[s])) moving.push_back(s);
                    dps.push_back(moving.size() && moving.back() == s ? delta_powers(args[s]) : std::vector<EpsSeries>{});
                }
                EpsSeries r(p_);
                std::vector<int> tau(na, 0);
                // Multivariate Taylor over moving slots with |τ| <= p.
                std::function<void(std::size_t, int)> rec = [&](std::size_t mi, int left) {
                    if (mi == moving.size()) {
                        auto deriv = e.fn_derivative();
                        Rational denom(1);
                        EpsSeries term = EpsSeries::constant(Expr(1), p_);
                        for (std::size_t s : moving) {
                            deriv[s] += tau[s];
                            denom *= factorial(tau[s]);
                            if (tau[s]) term = series_mul(term, dps[s][tau[s]]);
                        }
                        Expr coeff = Expr::fn(e.name(), a0, deriv, e.family()) * Expr(Rational(1) / denom);
                        r = series_add(r, series_scale(term, coeff));
                        return;
                    }
                    for (int t = 0; t <= left; ++t) {
                        tau[moving[mi]] = t;
                        rec(mi + 1, left - t);
                    }
                    tau[moving[mi]] = 0;
                };
                rec(0, p_);
                return r;
            }
            case Kind::Mul: {
                EpsSeries r = EpsSeries::constant(Expr(e.coefficient()), p_);
                for (const auto& [b, x] : e.operands()) {
                    EpsSeries bs = run(b);
                    if (vanishes_beyond_zero(bs)) {
                        r = series_scale(r, pow(bs.c[0], x));
                        continue;
                    }
                    r = series_mul(r, series_pow(bs, x));
                }
                return r;
            }
            case Kind::Add: {
                std::vector<SumBuilder> acc(static_cast<std::size_t>(p_ + 1));
                acc[0].add(Expr(e.coefficient()));
                for (const auto& [t, c] : e.operands()) {
                    EpsSeries ts = run(t);
                    for (int k = 0; k <= p_; ++k) acc[k].add(ts.c[k], c);
                }
                EpsSeries r(p_);
                for (int k = 0; k <= p_; ++k) r.c[k] = acc[k].build();
                return r;
            }
        }
        return EpsSeries(p_);
    }
};

}  // namespace

EpsSeries expand(const Expr& e, const JetSpace& space) { return Expander(space).run(e); }

int max_jet_order(const Expr& e) {
    int best = -1;
    bool any = false;
    visit(e, [&](const Expr& x) {
        if ((x.signature() & kJetSignatureBit) == 0) return false;
        if (x.kind() == Kind::Jet) {
            best = any ? std::max(best, x.eps_order()) : x.eps_order();
            any = true;
        }
        return true;
    });
    return best;
}

bool respects_order(const EpsSeries& s) {
    for (int k = 0; k <= s.order(); ++k)
        if (max_jet_order(s.c[k]) > k) return false;
    return true;
}

Expr recursion_R(const Expr& e, const JetSpace& space) {
    (void)space;
    Derivation d;
    d.mask = kJetSignatureBit | kFnSignatureBit;
    d.leaf = [](const Expr& leaf) -> Expr {
        if (leaf.kind() == Kind::Symbol) return Expr(0);
        if (leaf.eps_order() == kBaseOrder)
            throw Error("recursion operator applied to unexpanded variable " + leaf.name());
        const int k = leaf.eps_order();
        return Expr(k + 1) * Expr::jet(leaf.name(), k + 1, leaf.jet_derivative());
    };
    d.fn_extra = [](const Expr& fn) -> Expr {
        if (fn.family() == kNoFamily)
            throw MissingFamilyIndex("function '" + fn.name() + "' has no family index");
        return Expr::fn(fn.name(), fn.args(), fn.fn_derivative(), fn.family() + 1);
    };
    return derive(e, d);
}

EpsSeries build_infinitesimals(const Expr& seed, const JetSpace& space) {
    EpsSeries s(space.order_p);
    s.c[0] = seed;
    for (int k = 0; k < space.order_p; ++k) s.c[k + 1] = recursion_R(s.c[k], space) * Expr(Rational(1, k + 1));
    return s;
}

Expr family_function(const std::string& name, int k, const JetSpace& space) {
    std::vector<Expr> args;
    for (std::size_t i = 0; i < space.n(); ++i) args.push_back(space.x(i));
    for (std::size_t a = 0; a < space.m(); ++a) args.push_back(space.u(a, 0));
    return Expr::fn(name, std::move(args), {}, k);
}

}  // namespace approxsym
