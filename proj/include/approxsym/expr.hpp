#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

namespace approxsym {

using Rational = mpq_class;

/// Node kinds in their canonical sort order.
enum class Kind : std::uint8_t {
    Number,
    Symbol,
    Jet,
    Func,      // elementary: sin, cos, exp, log
    Fn,        // arbitrary function application, possibly a family member
    Integral,  // antiderivative of a unary arbitrary function
    Mul,
    Add,
};

/// Derivative multi-index of a jet coordinate: (independent variable, count),
/// sorted by variable name, counts positive.
using JetDerivative = std::vector<std::pair<std::string, int>>;

/// eps_order value of an unexpanded (base) dependent variable `u`.
inline constexpr int kBaseOrder = -1;
/// family value of an arbitrary function that is not a family member.
inline constexpr int kNoFamily = -1;

class Expr;
struct Node;

/// Immutable symbolic expression in canonical expanded form.
///
/// Sums and products are flattened and sorted by the total order of
/// `compare`; rational constants are folded; products of sums are distributed
/// and positive integer powers of sums are expanded. A sum survives inside a
/// product only as the base of a non-positive-integer power, e.g.
/// (x^2 + y^2)^(-1/2).
class Expr {
public:
    Expr();  // zero
    Expr(int v);
    Expr(long v);
    Expr(const Rational& q);

    static Expr symbol(std::string name);
    static Expr jet(std::string base, int eps_order, JetDerivative deriv = {});
    static Expr func(std::string name, const Expr& arg);
    static Expr fn(std::string name, std::vector<Expr> args, std::vector<int> deriv = {},
                   int family = kNoFamily);
    static Expr integral(std::string name, const Expr& arg);

    Kind kind() const;
    std::size_t hash() const;
    std::uint64_t signature() const;

    bool is_number() const { return kind() == Kind::Number; }
    bool is_zero() const;
    bool is_one() const;
    bool is_atom() const;
    const Rational& number() const;

    // Symbol / Jet / Func / Fn / Integral
    const std::string& name() const;
    // Jet
    int eps_order() const;
    const JetDerivative& jet_derivative() const;
    int jet_derivative_order() const;
    // Fn
    int family() const;
    const std::vector<int>& fn_derivative() const;
    // Func / Fn / Integral
    const std::vector<Expr>& args() const;
    // Add: constant term; Mul: numeric coefficient
    const Rational& coefficient() const;
    // Add: (term, coefficient); Mul: (base, exponent)
    const std::vector<std::pair<Expr, Rational>>& operands() const;

    const Node* node() const { return node_.get(); }

    friend Expr operator+(const Expr& a, const Expr& b);
    friend Expr operator-(const Expr& a, const Expr& b);
    friend Expr operator*(const Expr& a, const Expr& b);
    friend Expr operator/(const Expr& a, const Expr& b);
    friend Expr operator-(const Expr& a);
    Expr& operator+=(const Expr& o) { return *this = *this + o; }
    Expr& operator-=(const Expr& o) { return *this = *this - o; }
    Expr& operator*=(const Expr& o) { return *this = *this * o; }

    friend bool operator==(const Expr& a, const Expr& b);
    friend bool operator!=(const Expr& a, const Expr& b) { return !(a == b); }

private:
    explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
    std::shared_ptr<const Node> node_;

    friend struct NodeFactory;
};

struct Node {
    Kind kind = Kind::Number;
    std::size_t hash = 0;
    std::uint64_t signature = 0;
    Rational num;
    std::string name;
    int order = 0;  // Jet eps order, Fn family
    JetDerivative jet_deriv;
    std::vector<int> fn_deriv;
    std::vector<Expr> args;
    std::vector<std::pair<Expr, Rational>> ops;
};

/// Total order: kind tag, then names, then children recursively.
int compare(const Expr& a, const Expr& b);

struct ExprLess {
    bool operator()(const Expr& a, const Expr& b) const { return compare(a, b) < 0; }
};
struct ExprHash {
    std::size_t operator()(const Expr& e) const { return e.hash(); }
};

Expr pow(const Expr& base, const Rational& exponent);
inline Expr pow(const Expr& base, int exponent) { return pow(base, Rational(exponent)); }
Expr sqrt(const Expr& e);
Expr sin(const Expr& e);
Expr cos(const Expr& e);
Expr exp(const Expr& e);
Expr log(const Expr& e);

/// Builds the canonical sum of (coefficient, term) contributions in one pass.
class SumBuilder {
public:
    void add(const Expr& e, const Rational& coeff = Rational(1));
    Expr build();

private:
    Rational constant_;
    std::vector<std::pair<Expr, Rational>> terms_;
};

/// Splits a term into numeric coefficient and coefficient-free monomial.
std::pair<Rational, Expr> split_coefficient(const Expr& term);

/// Terms of a sum (a non-sum is a single term); the constant comes first if nonzero.
std::vector<Expr> terms_of(const Expr& e);

/// (base, exponent) factors of a monomial; the numeric coefficient is dropped.
std::vector<std::pair<Expr, Rational>> factors_of(const Expr& monomial);

/// Bit used in signatures for a leaf atom (symbol, jet base, function name).
std::uint64_t signature_bit(const std::string& leaf_name);
/// Signature bit shared by every jet coordinate.
inline constexpr std::uint64_t kJetSignatureBit = 1;
/// Signature bit shared by every arbitrary-function application and antiderivative.
inline constexpr std::uint64_t kFnSignatureBit = 2;

/// Canonical product coeff * prod(base^exponent). Bases must be atoms, sums or numbers.
Expr product(Rational coeff, std::vector<std::pair<Expr, Rational>> factors);

}  // namespace approxsym
