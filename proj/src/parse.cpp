#include "approxsym/parse.hpp"

#include <algorithm>
#include <cctype>
#include <optional>

#include "approxsym/errors.hpp"

namespace approxsym {

namespace {

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool all_digits(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

bool contains(const std::vector<std::string>& v, std::string_view s) {
    return std::find(v.begin(), v.end(), s) != v.end();
}

class Parser {
public:
    Parser(std::string_view text, const ParseContext& ctx) : text_(text), ctx_(ctx) {}

    Expr run() {
        skip_ws();
        if (at_end()) fail("empty expression");
        Expr e = parse_sum();
        skip_ws();
        if (!at_end()) fail(std::string("unexpected '") + peek() + "'");
        return e;
    }

private:
    std::string_view text_;
    const ParseContext& ctx_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& msg) const { fail_at(msg, pos_); }
    [[noreturn]] void fail_at(const std::string& msg, std::size_t at) const {
        int line = 1, col = 1;
        for (std::size_t i = 0; i < at && i < text_.size(); ++i) {
            if (text_[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw ParseError(msg, line, col);
    }

    bool at_end() const { return pos_ >= text_.size(); }
    char peek(std::size_t ahead = 0) const {
        return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
    }
    void skip_ws() {
        while (!at_end() && std::isspace(static_cast<unsigned char>(peek()))) ++pos_;
    }
    bool accept(char c) {
        skip_ws();
        if (peek() == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    void expect(char c) {
        if (!accept(c)) fail(std::string("expected '") + c + "'");
    }

    Expr parse_sum() {
        Expr acc = parse_product();
        SumBuilder sb;
        sb.add(acc);
        for (;;) {
            skip_ws();
            if (peek() == '+') {
                ++pos_;
                sb.add(parse_product());
            } else if (peek() == '-') {
                ++pos_;
                sb.add(parse_product(), Rational(-1));
            } else {
                break;
            }
        }
        return sb.build();
    }

    Expr parse_product() {
        Expr acc = parse_unary();
        for (;;) {
            skip_ws();
            if (peek() == '*') {
                ++pos_;
                acc = acc * parse_unary();
            } else if (peek() == '/') {
                ++pos_;
                const std::size_t at = pos_;
                Expr d = parse_unary();
                if (d.is_zero()) fail_at("division by zero", at);
                acc = acc / d;
            } else {
                break;
            }
        }
        return acc;
    }

    Expr parse_unary() {
        skip_ws();
        if (peek() == '-') {
            ++pos_;
            return -parse_unary();
        }
        if (peek() == '+') {
            ++pos_;
            return parse_unary();
        }
        return parse_power();
    }

    Expr parse_power() {
        Expr base = parse_primary();
        skip_ws();
        if (peek() == '^') {
            ++pos_;
            const std::size_t at = pos_;
            Expr ex = parse_unary();
            if (!ex.is_number()) fail_at("exponent must be a rational number", at);
            if (base.is_zero() && ex.number() < 0) fail_at("division by zero", at);
            return pow(base, ex.number());
        }
        return base;
    }

    Expr parse_number() {
        const std::size_t start = pos_;
        while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
        std::string digits(text_.substr(start, pos_ - start));
        Rational value(mpz_class(digits, 10));
        if (peek() == '.' && std::isdigit(static_cast<unsigned char>(peek(1)))) {
            ++pos_;
            const std::size_t fs = pos_;
            while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
            std::string frac(text_.substr(fs, pos_ - fs));
            mpz_class scale;
            mpz_ui_pow_ui(scale.get_mpz_t(), 10, frac.size());
            value += Rational(mpz_class(frac, 10), scale);
            value.canonicalize();
        }
        if (peek() == 'e' || peek() == 'E') {
            std::size_t k = 1;
            bool neg = false;
            if (peek(k) == '-' || peek(k) == '+') {
                neg = peek(k) == '-';
                ++k;
            }
            if (std::isdigit(static_cast<unsigned char>(peek(k)))) {
                pos_ += k;
                const std::size_t es = pos_;
                while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
                const unsigned long n = std::stoul(std::string(text_.substr(es, pos_ - es)));
                mpz_class scale;
                mpz_ui_pow_ui(scale.get_mpz_t(), 10, n);
                if (neg)
                    value /= Rational(scale);
                else
                    value *= Rational(scale);
                value.canonicalize();
            }
        }
        return Expr(value);
    }

    std::string read_identifier() {
        const std::size_t start = pos_;
        if (!is_ident_start(peek())) fail("expected identifier");
        while (is_ident_char(peek())) {
            if (peek() == '_' && peek(1) == '{') break;
            ++pos_;
        }
        return std::string(text_.substr(start, pos_ - start));
    }

    int read_int() {
        skip_ws();
        const std::size_t start = pos_;
        if (peek() == '-') ++pos_;
        while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
        const std::string s(text_.substr(start, pos_ - start));
        if (s.empty() || s == "-") fail("expected integer");
        return std::stoi(s);
    }

    /// Resolves `u`, `u0`, `x1_0` against the declared dependents.
    std::optional<std::pair<std::string, int>> resolve_jet(std::string_view s) const {
        std::optional<std::pair<std::string, int>> best;
        std::size_t best_len = 0;
        for (const auto& d : ctx_.dependents) {
            if (s.size() < d.size() || s.substr(0, d.size()) != d) continue;
            std::string_view rest = s.substr(d.size());
            std::optional<int> order;
            if (rest.empty()) {
                order = kBaseOrder;
            } else if (rest[0] == '_' && all_digits(rest.substr(1))) {
                order = std::stoi(std::string(rest.substr(1)));
            } else if (all_digits(rest) && !std::isdigit(static_cast<unsigned char>(d.back()))) {
                order = std::stoi(std::string(rest));
            }
            if (order && d.size() >= best_len) {
                best = {{d, *order}};
                best_len = d.size();
            }
        }
        return best;
    }

    Expr parse_derivative_jet(const std::string& ident, std::size_t at) {
        // Forms: d<N>name#v<k>..., or d...dname#v#v...
        std::optional<std::pair<std::string, int>> jet;
        int declared = 0;
        if (ident.size() > 1 && ident[0] == 'd' && std::isdigit(static_cast<unsigned char>(ident[1]))) {
            std::size_t i = 1;
            while (i < ident.size() && std::isdigit(static_cast<unsigned char>(ident[i]))) ++i;
            declared = std::stoi(ident.substr(1, i - 1));
            jet = resolve_jet(std::string_view(ident).substr(i));
        } else {
            std::size_t nd = 0;
            while (nd < ident.size() && ident[nd] == 'd') ++nd;
            for (std::size_t n = nd; n >= 1 && !jet; --n) {
                jet = resolve_jet(std::string_view(ident).substr(n));
                if (jet) declared = static_cast<int>(n);
            }
        }
        if (!jet || declared <= 0) fail_at("'" + ident + "' is not a derivative of a dependent variable", at);
        JetDerivative deriv;
        int total = 0;
        while (peek() == '#') {
            ++pos_;
            const std::size_t vat = pos_;
            std::string v = read_identifier();
            int count = 1;
            if (!contains(ctx_.independents, v)) {
                std::size_t k = v.size();
                while (k > 0 && std::isdigit(static_cast<unsigned char>(v[k - 1]))) --k;
                if (k == v.size() || !contains(ctx_.independents, std::string_view(v).substr(0, k)))
                    fail_at("'" + v + "' is not an independent variable", vat);
                count = std::stoi(v.substr(k));
                v = v.substr(0, k);
            }
            deriv.emplace_back(v, count);
            total += count;
        }
        if (total != declared) fail_at("derivative order of '" + ident + "' does not match its variables", at);
        return Expr::jet(jet->first, jet->second, std::move(deriv));
    }

    Expr parse_function_call(const std::string& name, std::size_t at) {
        int primes = 0;
        while (peek() == '\'') {
            ++pos_;
            ++primes;
        }
        int family = kNoFamily;
        if (peek() == '[') {
            ++pos_;
            family = read_int();
            if (family < 0) fail("family index must be nonnegative");
            expect(']');
        }
        std::vector<int> deriv;
        if (peek() == '_' && peek(1) == '{') {
            pos_ += 2;
            do {
                const int d = read_int();
                if (d < 0) fail("derivative index must be nonnegative");
                deriv.push_back(d);
            } while (accept(','));
            expect('}');
        }
        skip_ws();
        if (peek() != '(') fail("expected '(' after function name");
        ++pos_;
        const bool decorated = primes > 0 || family != kNoFamily || !deriv.empty();
        if (!decorated) {
            if (name == "sin" || name == "cos" || name == "exp" || name == "log" || name == "sqrt") {
                Expr arg = parse_sum();
                expect(')');
                if (name == "log" && arg.is_zero()) fail_at("log(0)", at);
                return Expr::func(name, arg);
            }
            if (name == "Int") {
                skip_ws();
                std::string f = read_identifier();
                expect(',');
                Expr arg = parse_sum();
                expect(')');
                return Expr::integral(f, arg);
            }
        }
        std::vector<Expr> args;
        skip_ws();
        if (peek() != ')') {
            do {
                args.push_back(parse_sum());
            } while (accept(','));
        }
        expect(')');
        if (args.empty()) fail_at("function '" + name + "' needs arguments", at);
        if (primes > 0) {
            if (!deriv.empty()) fail_at("primes and derivative indices cannot be combined", at);
            if (args.size() != 1) fail_at("primes are only allowed on unary functions", at);
            deriv = {primes};
        }
        if (!deriv.empty() && deriv.size() != args.size())
            fail_at("derivative index count does not match argument count", at);
        return Expr::fn(name, std::move(args), std::move(deriv), family);
    }

    Expr parse_primary() {
        skip_ws();
        const char c = peek();
        if (c == '(') {
            ++pos_;
            Expr e = parse_sum();
            expect(')');
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) return parse_number();
        if (!is_ident_start(c)) {
            if (at_end()) fail("unexpected end of input");
            fail(std::string("unexpected '") + c + "'");
        }
        const std::size_t at = pos_;
        std::string ident = read_identifier();
        const char n = peek();
        if (n == '(' || n == '\'' || n == '[' || (n == '_' && peek(1) == '{')) return parse_function_call(ident, at);
        if (n == '#') return parse_derivative_jet(ident, at);
        skip_ws();
        if (peek() == '(') return parse_function_call(ident, at);
        if (auto jet = resolve_jet(ident)) return Expr::jet(jet->first, jet->second);
        if (ctx_.strict && ident != "eps" && !contains(ctx_.symbols, ident) && !contains(ctx_.independents, ident))
            fail_at("unknown symbol '" + ident + "'", at);
        return Expr::symbol(ident);
    }
};

}  // namespace

Expr parse(std::string_view text, const ParseContext& ctx) { return Parser(text, ctx).run(); }

}  // namespace approxsym
