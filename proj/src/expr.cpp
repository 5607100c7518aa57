#include "approxsym/expr.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>

#include "approxsym/errors.hpp"

namespace approxsym {

namespace {

inline std::size_t mix(std::size_t seed, std::size_t v) {
    return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

std::size_t hash_rational(const Rational& q) {
    const mpz_srcptr n = q.get_num_mpz_t();
    const mpz_srcptr d = q.get_den_mpz_t();
    std::size_t h = static_cast<std::size_t>(mpz_sgn(n)) + 7;
    h = mix(h, mpz_size(n) ? mpz_getlimbn(n, 0) : 0);
    h = mix(h, mpz_size(d) ? mpz_getlimbn(d, 0) : 0);
    h = mix(h, mpz_size(n));
    return h;
}

bool is_integer(const Rational& q) { return q.get_den() == 1; }

}  // namespace

std::uint64_t signature_bit(const std::string& leaf_name) {
    // Bits 0 and 1 are reserved for jets and arbitrary functions.
    const std::size_t h = std::hash<std::string>{}(leaf_name);
    return std::uint64_t{1} << (2 + h % 62);
}

struct NodeFactory {
    static Expr make(Node&& n) { return Expr(std::make_shared<const Node>(std::move(n))); }

    static const Expr& zero() {
        static const Expr z = [] {
            Node n;
            n.kind = Kind::Number;
            n.num = 0;
            n.hash = hash_rational(n.num);
            return make(std::move(n));
        }();
        return z;
    }
    static const Expr& one() {
        static const Expr o = [] {
            Node n;
            n.kind = Kind::Number;
            n.num = 1;
            n.hash = hash_rational(n.num);
            return make(std::move(n));
        }();
        return o;
    }
    static Expr number(const Rational& q) {
        if (q == 0) return zero();
        if (q == 1) return one();
        Node n;
        n.kind = Kind::Number;
        n.num = q;
        n.hash = hash_rational(q);
        return make(std::move(n));
    }
    static Expr raw_mul(const Rational& coeff, std::vector<std::pair<Expr, Rational>>&& factors) {
        Node n;
        n.kind = Kind::Mul;
        n.num = coeff;
        std::size_t h = 0x4d55;
        std::uint64_t sig = 0;
        for (const auto& [b, e] : factors) {
            h = mix(h, b.hash());
            h = mix(h, hash_rational(e));
            sig |= b.signature();
        }
        n.hash = mix(h, hash_rational(coeff));
        n.signature = sig;
        n.ops = std::move(factors);
        return make(std::move(n));
    }
    static Expr raw_add(const Rational& constant, std::vector<std::pair<Expr, Rational>>&& terms) {
        Node n;
        n.kind = Kind::Add;
        n.num = constant;
        std::size_t h = 0x4144;
        std::uint64_t sig = 0;
        for (const auto& [t, c] : terms) {
            h = mix(h, t.hash());
            h = mix(h, hash_rational(c));
            sig |= t.signature();
        }
        n.hash = mix(h, hash_rational(constant));
        n.signature = sig;
        n.ops = std::move(terms);
        return make(std::move(n));
    }
};

// ---------------------------------------------------------------------------
// Construction

Expr::Expr() : Expr(NodeFactory::zero()) {}
Expr::Expr(int v) : Expr(NodeFactory::number(Rational(v))) {}
Expr::Expr(long v) : Expr(NodeFactory::number(Rational(v))) {}
Expr::Expr(const Rational& q) {
    Rational c = q;
    c.canonicalize();
    *this = NodeFactory::number(c);
}

Expr Expr::symbol(std::string name) {
    Node n;
    n.kind = Kind::Symbol;
    n.hash = mix(0x5359, std::hash<std::string>{}(name));
    n.signature = signature_bit(name);
    n.name = std::move(name);
    return NodeFactory::make(std::move(n));
}

Expr Expr::jet(std::string base, int eps_order, JetDerivative deriv) {
    std::sort(deriv.begin(), deriv.end());
    JetDerivative merged;
    for (auto& [v, c] : deriv) {
        if (c <= 0) continue;
        if (!merged.empty() && merged.back().first == v)
            merged.back().second += c;
        else
            merged.emplace_back(v, c);
    }
    Node n;
    n.kind = Kind::Jet;
    std::size_t h = mix(0x4a45, std::hash<std::string>{}(base));
    h = mix(h, static_cast<std::size_t>(eps_order + 2));
    for (const auto& [v, c] : merged) {
        h = mix(h, std::hash<std::string>{}(v));
        h = mix(h, static_cast<std::size_t>(c));
    }
    n.hash = h;
    n.signature = kJetSignatureBit | signature_bit(base + "#" + std::to_string(eps_order));
    n.name = std::move(base);
    n.order = eps_order;
    n.jet_deriv = std::move(merged);
    return NodeFactory::make(std::move(n));
}

namespace {

Expr make_func(const std::string& name, const Expr& arg) {
    Node n;
    n.kind = Kind::Func;
    n.hash = mix(mix(0x4655, std::hash<std::string>{}(name)), arg.hash());
    n.signature = arg.signature();
    n.name = name;
    n.args = {arg};
    return NodeFactory::make(std::move(n));
}

/// Canonical sign of an expression: true when its leading coefficient is negative.
bool looks_negative(const Expr& e) {
    switch (e.kind()) {
        case Kind::Number: return e.number() < 0;
        case Kind::Mul: return e.coefficient() < 0;
        case Kind::Add: return e.operands().front().second < 0;
        default: return false;
    }
}

}  // namespace

Expr Expr::func(std::string name, const Expr& arg) {
    if (name == "sin") return approxsym::sin(arg);
    if (name == "cos") return approxsym::cos(arg);
    if (name == "exp") return approxsym::exp(arg);
    if (name == "log") return approxsym::log(arg);
    if (name == "sqrt") return approxsym::sqrt(arg);
    throw Error("unknown elementary function '" + name + "'");
}

Expr Expr::fn(std::string name, std::vector<Expr> args, std::vector<int> deriv, int family) {
    deriv.resize(args.size(), 0);
    Node n;
    n.kind = Kind::Fn;
    std::size_t h = mix(0x464e, std::hash<std::string>{}(name));
    h = mix(h, static_cast<std::size_t>(family + 2));
    std::uint64_t sig = kFnSignatureBit | signature_bit(name);
    for (std::size_t i = 0; i < args.size(); ++i) {
        h = mix(h, args[i].hash());
        h = mix(h, static_cast<std::size_t>(deriv[i]));
        sig |= args[i].signature();
    }
    n.hash = h;
    n.signature = sig;
    n.name = std::move(name);
    n.order = family;
    n.fn_deriv = std::move(deriv);
    n.args = std::move(args);
    return NodeFactory::make(std::move(n));
}

Expr Expr::integral(std::string name, const Expr& arg) {
    Node n;
    n.kind = Kind::Integral;
    n.hash = mix(mix(0x494e, std::hash<std::string>{}(name)), arg.hash());
    n.signature = kFnSignatureBit | signature_bit(name) | arg.signature();
    n.name = std::move(name);
    n.args = {arg};
    return NodeFactory::make(std::move(n));
}

Expr sin(const Expr& e) {
    if (e.is_zero()) return Expr(0);
    if (looks_negative(e)) return -make_func("sin", -e);
    return make_func("sin", e);
}

Expr cos(const Expr& e) {
    if (e.is_zero()) return Expr(1);
    if (looks_negative(e)) return make_func("cos", -e);
    return make_func("cos", e);
}

Expr exp(const Expr& e) {
    if (e.is_zero()) return Expr(1);
    return make_func("exp", e);
}

Expr log(const Expr& e) {
    if (e.is_one()) return Expr(0);
    if (e.is_zero()) throw Error("log(0)");
    return make_func("log", e);
}

Expr sqrt(const Expr& e) { return pow(e, Rational(1, 2)); }

// ---------------------------------------------------------------------------
// Accessors

Kind Expr::kind() const { return node_->kind; }
std::size_t Expr::hash() const { return node_->hash; }
std::uint64_t Expr::signature() const { return node_->signature; }
bool Expr::is_zero() const { return node_->kind == Kind::Number && node_->num == 0; }
bool Expr::is_one() const { return node_->kind == Kind::Number && node_->num == 1; }
bool Expr::is_atom() const {
    const Kind k = node_->kind;
    return k != Kind::Number && k != Kind::Add && k != Kind::Mul;
}
const Rational& Expr::number() const { return node_->num; }
const std::string& Expr::name() const { return node_->name; }
int Expr::eps_order() const { return node_->order; }
const JetDerivative& Expr::jet_derivative() const { return node_->jet_deriv; }
int Expr::jet_derivative_order() const {
    int total = 0;
    for (const auto& [v, c] : node_->jet_deriv) total += c;
    return total;
}
int Expr::family() const { return node_->order; }
const std::vector<int>& Expr::fn_derivative() const { return node_->fn_deriv; }
const std::vector<Expr>& Expr::args() const { return node_->args; }
const Rational& Expr::coefficient() const { return node_->num; }
const std::vector<std::pair<Expr, Rational>>& Expr::operands() const { return node_->ops; }

// ---------------------------------------------------------------------------
// Total order

namespace {

int cmp_rational(const Rational& a, const Rational& b) {
    const int c = cmp(a, b);
    return c < 0 ? -1 : (c > 0 ? 1 : 0);
}

int cmp_string(const std::string& a, const std::string& b) {
    const int c = a.compare(b);
    return c < 0 ? -1 : (c > 0 ? 1 : 0);
}

int cmp_pairs(const std::vector<std::pair<Expr, Rational>>& a,
              const std::vector<std::pair<Expr, Rational>>& b) {
    const std::size_t n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i) {
        if (int c = compare(a[i].first, b[i].first)) return c;
        if (int c = cmp_rational(a[i].second, b[i].second)) return c;
    }
    if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
    return 0;
}

}  // namespace

int compare(const Expr& a, const Expr& b) {
    if (a.node() == b.node()) return 0;
    if (a.kind() != b.kind()) return a.kind() < b.kind() ? -1 : 1;
    switch (a.kind()) {
        case Kind::Number: return cmp_rational(a.number(), b.number());
        case Kind::Symbol: return cmp_string(a.name(), b.name());
        case Kind::Jet: {
            if (int c = cmp_string(a.name(), b.name())) return c;
            if (a.eps_order() != b.eps_order()) return a.eps_order() < b.eps_order() ? -1 : 1;
            const auto& da = a.jet_derivative();
            const auto& db = b.jet_derivative();
            const int oa = a.jet_derivative_order(), ob = b.jet_derivative_order();
            if (oa != ob) return oa < ob ? -1 : 1;
            if (da < db) return -1;
            if (db < da) return 1;
            return 0;
        }
        case Kind::Func:
        case Kind::Integral: {
            if (int c = cmp_string(a.name(), b.name())) return c;
            return compare(a.args()[0], b.args()[0]);
        }
        case Kind::Fn: {
            if (int c = cmp_string(a.name(), b.name())) return c;
            if (a.family() != b.family()) return a.family() < b.family() ? -1 : 1;
            if (a.args().size() != b.args().size()) return a.args().size() < b.args().size() ? -1 : 1;
            const auto& da = a.fn_derivative();
            const auto& db = b.fn_derivative();
            int sa = 0, sb = 0;
            for (int d : da) sa += d;
            for (int d : db) sb += d;
            if (sa != sb) return sa < sb ? -1 : 1;
            if (da != db) return da < db ? -1 : 1;
            for (std::size_t i = 0; i < a.args().size(); ++i)
                if (int c = compare(a.args()[i], b.args()[i])) return c;
            return 0;
        }
        case Kind::Mul: {
            if (int c = cmp_pairs(a.operands(), b.operands())) return c;
            return cmp_rational(a.coefficient(), b.coefficient());
        }
        case Kind::Add: {
            if (int c = cmp_pairs(a.operands(), b.operands())) return c;
            return cmp_rational(a.coefficient(), b.coefficient());
        }
    }
    return 0;
}

bool operator==(const Expr& a, const Expr& b) {
    if (a.node() == b.node()) return true;
    if (a.hash() != b.hash()) return false;
    return compare(a, b) == 0;
}

// ---------------------------------------------------------------------------
// Sums

std::pair<Rational, Expr> split_coefficient(const Expr& term) {
    if (term.kind() == Kind::Number) return {term.number(), Expr(1)};
    if (term.kind() == Kind::Mul && term.coefficient() != 1) {
        auto ops = term.operands();
        if (ops.size() == 1 && ops[0].second == 1) return {term.coefficient(), ops[0].first};
        return {term.coefficient(), NodeFactory::raw_mul(Rational(1), std::move(ops))};
    }
    return {Rational(1), term};
}

void SumBuilder::add(const Expr& e, const Rational& coeff) {
    if (coeff == 0) return;
    switch (e.kind()) {
        case Kind::Number: constant_ += coeff * e.number(); return;
        case Kind::Add:
            constant_ += coeff * e.coefficient();
            for (const auto& [t, c] : e.operands()) terms_.emplace_back(t, coeff * c);
            return;
        default: {
            auto [c, m] = split_coefficient(e);
            terms_.emplace_back(std::move(m), coeff * c);
        }
    }
}

Expr SumBuilder::build() {
    std::sort(terms_.begin(), terms_.end(),
              [](const auto& a, const auto& b) { return compare(a.first, b.first) < 0; });
    std::vector<std::pair<Expr, Rational>> merged;
    merged.reserve(terms_.size());
    for (auto& tc : terms_) {
        if (!merged.empty() && merged.back().first == tc.first)
            merged.back().second += tc.second;
        else
            merged.push_back(std::move(tc));
    }
    std::erase_if(merged, [](const auto& tc) { return tc.second == 0; });
    terms_.clear();
    if (merged.empty()) return Expr(constant_);
    if (merged.size() == 1 && constant_ == 0) {
        const auto& [t, c] = merged[0];
        if (c == 1) return t;
        if (t.kind() == Kind::Mul) {
            auto ops = t.operands();
            return NodeFactory::raw_mul(c, std::move(ops));
        }
        return NodeFactory::raw_mul(c, {{t, Rational(1)}});
    }
    return NodeFactory::raw_add(constant_, std::move(merged));
}

std::vector<Expr> terms_of(const Expr& e) {
    if (e.kind() != Kind::Add) {
        if (e.is_zero()) return {};
        return {e};
    }
    std::vector<Expr> out;
    if (e.coefficient() != 0) out.emplace_back(e.coefficient());
    for (const auto& [t, c] : e.operands()) out.push_back(c == 1 ? t : t * Expr(c));
    return out;
}

std::vector<std::pair<Expr, Rational>> factors_of(const Expr& monomial) {
    switch (monomial.kind()) {
        case Kind::Number:
        case Kind::Add: return {};
        case Kind::Mul: return monomial.operands();
        default: return {{monomial, Rational(1)}};
    }
}

// ---------------------------------------------------------------------------
// Products

namespace {

Expr scale(const Expr& e, const Rational& q) {
    if (q == 0) return Expr(0);
    if (q == 1) return e;
    switch (e.kind()) {
        case Kind::Number: return Expr(e.number() * q);
        case Kind::Add: {
            auto ops = e.operands();
            for (auto& tc : ops) tc.second *= q;
            return NodeFactory::raw_add(e.coefficient() * q, std::move(ops));
        }
        case Kind::Mul: {
            Rational c = e.coefficient() * q;
            const auto& ops = e.operands();
            if (c == 1 && ops.size() == 1 && ops[0].second == 1) return ops[0].first;
            auto copy = ops;
            return NodeFactory::raw_mul(c, std::move(copy));
        }
        default: return NodeFactory::raw_mul(q, {{e, Rational(1)}});
    }
}

/// Exact integer power of a rational.
Rational rational_pow(const Rational& base, long e) {
    Rational r(1);
    Rational b = base;
    bool invert = e < 0;
    unsigned long n = static_cast<unsigned long>(invert ? -e : e);
    while (n) {
        if (n & 1) r *= b;
        b *= b;
        n >>= 1;
    }
    if (invert) {
        if (r == 0) throw Error("division by zero");
        r = 1 / r;
    }
    r.canonicalize();
    return r;
}

/// Exact k-th root of a nonnegative integer, if it exists.
std::optional<mpz_class> exact_root(const mpz_class& v, unsigned long k) {
    if (v < 0) return std::nullopt;
    mpz_class r;
    if (mpz_root(r.get_mpz_t(), v.get_mpz_t(), k) != 0) return r;
    return std::nullopt;
}

Expr mul_impl(const Expr& a, const Expr& b);

Expr expand_integer_power(const Expr& sum, unsigned long n) {
    Expr result(1);
    Expr b = sum;
    while (n) {
        if (n & 1) result = mul_impl(result, b);
        n >>= 1;
        if (n) b = mul_impl(b, b);
    }
    return result;
}

/// Normalizes a sum so its first term has coefficient 1: sum = c * normalized.
/// Splits sum = c * base with base's leading coefficient 1, or +-1 when
/// `positive` (fractional powers of a negative content are not real).
std::pair<Rational, Expr> normalize_sum(const Expr& sum, bool positive = false) {
    Rational c = sum.operands().front().second;
    if (positive && c < 0) c = -c;
    if (c == 1) return {c, sum};
    return {c, scale(sum, Rational(1) / c)};
}

/// Canonical product of coefficient and (base, exponent) factors. Bases must be
/// atoms, normalized sums or numbers.
Expr build_product(Rational coeff, std::vector<std::pair<Expr, Rational>> factors) {
    if (coeff == 0) return Expr(0);
    // Integer powers of S join a fractional power of -S: S^n = (-1)^n (-S)^n.
    std::vector<const Expr*> signed_bases;
    for (const auto& [b, e] : factors)
        if (b.kind() == Kind::Add && !is_integer(e) && b.operands().front().second == -1) signed_bases.push_back(&b);
    if (!signed_bases.empty()) {
        for (auto& [b, e] : factors) {
            if (b.kind() != Kind::Add || !is_integer(e) || b.operands().front().second != 1) continue;
            const Expr neg = scale(b, Rational(-1));
            for (const Expr* sb : signed_bases)
                if (*sb == neg) {
                    if (e.get_num().get_si() % 2 != 0) coeff = -coeff;
                    b = neg;
                    break;
                }
        }
    }
    std::sort(factors.begin(), factors.end(),
              [](const auto& a, const auto& b) { return compare(a.first, b.first) < 0; });
    std::vector<std::pair<Expr, Rational>> merged;
    merged.reserve(factors.size());
    for (auto& f : factors) {
        if (!merged.empty() && merged.back().first == f.first)
            merged.back().second += f.second;
        else
            merged.push_back(std::move(f));
    }
    // A sign-carrying sum base whose exponent became an integer goes back to monic form.
    bool renormalize = false;
    for (auto& [b, e] : merged)
        if (b.kind() == Kind::Add && is_integer(e) && e != 0 && b.operands().front().second != 1) {
            auto [c, nb] = normalize_sum(b);
            coeff *= rational_pow(c, e.get_num().get_si());
            b = nb;
            renormalize = true;
        }
    if (renormalize) return build_product(coeff, std::move(merged));
    std::vector<std::pair<Expr, Rational>> kept;
    kept.reserve(merged.size());
    std::vector<std::pair<Expr, unsigned long>> pending;
    for (auto& [b, e] : merged) {
        if (e == 0) continue;
        if (b.kind() == Kind::Number) {
            if (is_integer(e)) {
                coeff *= rational_pow(b.number(), e.get_num().get_si());
                continue;
            }
            // Peel off the integer part of the exponent.
            mpz_class fl;
            mpz_fdiv_q(fl.get_mpz_t(), e.get_num_mpz_t(), e.get_den_mpz_t());
            Rational frac = e - Rational(fl);
            coeff *= rational_pow(b.number(), fl.get_si());
            kept.emplace_back(b, frac);
            continue;
        }
        if (b.kind() == Kind::Add && is_integer(e) && e > 0) {
            pending.emplace_back(b, e.get_num().get_ui());
            continue;
        }
        kept.emplace_back(std::move(b), std::move(e));
    }
    if (coeff == 0) return Expr(0);
    Expr result;
    if (kept.empty())
        result = Expr(coeff);
    else if (coeff == 1 && kept.size() == 1 && kept[0].second == 1)
        result = kept[0].first;
    else
        result = NodeFactory::raw_mul(coeff, std::move(kept));
    for (const auto& [b, n] : pending) result = mul_impl(result, expand_integer_power(b, n));
    return result;
}

Expr mul_monomials(const Expr& a, const Expr& b) {
    Rational coeff(1);
    std::vector<std::pair<Expr, Rational>> f;
    for (const Expr* x : {&a, &b}) {
        if (x->kind() == Kind::Mul) {
            coeff *= x->coefficient();
            f.insert(f.end(), x->operands().begin(), x->operands().end());
        } else {
            f.emplace_back(*x, Rational(1));
        }
    }
    return build_product(coeff, std::move(f));
}

bool has_base(const Expr& monomial, const Expr& base) {
    if (monomial.kind() != Kind::Mul) return false;
    for (const auto& [b, e] : monomial.operands())
        if (b == base) return true;
    return false;
}

bool has_signed_sum_base(const Expr& monomial) {
    if (monomial.kind() != Kind::Mul) return false;
    for (const auto& [b, e] : monomial.operands())
        if (b.kind() == Kind::Add && b.operands().front().second == -1) return true;
    return false;
}

Expr mul_impl(const Expr& a, const Expr& b) {
    if (a.is_number()) return scale(b, a.number());
    if (b.is_number()) return scale(a, b.number());
    const bool a_sum = a.kind() == Kind::Add;
    const bool b_sum = b.kind() == Kind::Add;
    if (!a_sum && !b_sum) return mul_monomials(a, b);
    // A sum that already appears as a power base in the other factor merges
    // exponents instead of distributing.
    if (a_sum && !b_sum) {
        auto [c, na] = normalize_sum(a);
        Expr base = na;
        if (!has_base(b, base) && has_signed_sum_base(b)) {
            base = scale(na, Rational(-1));
            c = -c;
        }
        if (has_base(b, base)) return scale(build_product(b.coefficient(), [&] {
                                                auto f = b.operands();
                                                f.emplace_back(base, Rational(1));
                                                return f;
                                            }()),
                                            c);
    }
    if (b_sum && !a_sum) return mul_impl(b, a);
    SumBuilder sb;
    const auto ta = terms_of(a);
    const auto tb = terms_of(b);
    for (const auto& x : ta)
        for (const auto& y : tb) {
            if (x.is_number() || y.is_number())
                sb.add(mul_impl(x, y));
            else
                sb.add(mul_monomials(x, y));
        }
    return sb.build();
}

}  // namespace

Expr product(Rational coeff, std::vector<std::pair<Expr, Rational>> factors) {
    for (auto& f : factors) {
        const Rational lead = f.first.kind() == Kind::Add ? f.first.operands().front().second : Rational(1);
        if (f.first.kind() == Kind::Mul || (lead != 1 && !(lead == -1 && !is_integer(f.second)))) {
            // Route non-canonical bases through pow.
            Expr rest = build_product(coeff, {});
            for (const auto& [b, e] : factors) rest = mul_impl(rest, pow(b, e));
            return rest;
        }
    }
    return build_product(std::move(coeff), std::move(factors));
}

Expr pow(const Expr& base, const Rational& exponent) {
    if (exponent == 0) return Expr(1);
    if (exponent == 1) return base;
    switch (base.kind()) {
        case Kind::Number: {
            const Rational& v = base.number();
            if (is_integer(exponent)) {
                if (v == 0 && exponent < 0) throw Error("division by zero");
                return Expr(rational_pow(v, exponent.get_num().get_si()));
            }
            if (v == 0) {
                if (exponent < 0) throw Error("division by zero");
                return Expr(0);
            }
            // Exact roots where they exist.
            const unsigned long k = exponent.get_den().get_ui();
            if (v > 0) {
                auto rn = exact_root(v.get_num(), k);
                auto rd = exact_root(v.get_den(), k);
                if (rn && rd) {
                    Rational root(*rn, *rd);
                    root.canonicalize();
                    return Expr(rational_pow(root, exponent.get_num().get_si()));
                }
            }
            return build_product(Rational(1), {{base, exponent}});
        }
        case Kind::Mul: {
            Rational coeff(1);
            std::vector<std::pair<Expr, Rational>> f;
            const Rational& c = base.coefficient();
            if (is_integer(exponent)) {
                coeff = rational_pow(c, exponent.get_num().get_si());
            } else if (c != 1) {
                const Expr cp = pow(Expr(c), exponent);
                if (cp.is_number())
                    coeff = cp.number();
                else
                    f.emplace_back(Expr(c), exponent);
            }
            for (const auto& [b, e] : base.operands()) f.emplace_back(b, e * exponent);
            return build_product(coeff, std::move(f));
        }
        case Kind::Add: {
            if (is_integer(exponent) && exponent > 0)
                return expand_integer_power(base, exponent.get_num().get_ui());
            auto [c, nb] = normalize_sum(base, !is_integer(exponent));
            Expr factor = build_product(Rational(1), {{nb, exponent}});
            if (c == 1) return factor;
            return mul_impl(pow(Expr(c), exponent), factor);
        }
        default: return build_product(Rational(1), {{base, exponent}});
    }
}

Expr operator+(const Expr& a, const Expr& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    SumBuilder sb;
    sb.add(a);
    sb.add(b);
    return sb.build();
}

Expr operator-(const Expr& a, const Expr& b) {
    if (b.is_zero()) return a;
    SumBuilder sb;
    sb.add(a);
    sb.add(b, Rational(-1));
    return sb.build();
}

Expr operator-(const Expr& a) { return scale(a, Rational(-1)); }

Expr operator*(const Expr& a, const Expr& b) { return mul_impl(a, b); }

Expr operator/(const Expr& a, const Expr& b) {
    if (b.is_zero()) throw Error("division by zero");
    return mul_impl(a, pow(b, Rational(-1)));
}

}  // namespace approxsym
