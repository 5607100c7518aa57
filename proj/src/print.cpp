#include "approxsym/print.hpp"

#include <cctype>
#include <map>
#include <ostream>
#include <sstream>

namespace approxsym {

namespace {

bool negative_term(const Expr& e) {
    switch (e.kind()) {
        case Kind::Number: return e.number() < 0;
        case Kind::Mul: return e.coefficient() < 0;
        default: return false;
    }
}

}  // namespace

std::string to_string(const Rational& q) { return q.get_str(); }

std::string jet_name(const std::string& base, int eps_order) {
    if (eps_order == kBaseOrder) return base;
    const bool digit_end = !base.empty() && std::isdigit(static_cast<unsigned char>(base.back()));
    return base + (digit_end ? "_" : "") + std::to_string(eps_order);
}

// ---------------------------------------------------------------------------
// Text

namespace {

void print_text(std::ostream& os, const Expr& e);

void print_factor_base(std::ostream& os, const Expr& b) {
    const bool paren = b.kind() == Kind::Add || b.kind() == Kind::Mul ||
                       (b.kind() == Kind::Number && (b.number() < 0 || b.number().get_den() != 1));
    if (paren) os << '(';
    print_text(os, b);
    if (paren) os << ')';
}

void print_exponent(std::ostream& os, const Rational& q) {
    if (q == 1) return;
    if (q > 0 && q.get_den() == 1)
        os << '^' << q.get_str();
    else
        os << "^(" << q.get_str() << ')';
}

void print_text(std::ostream& os, const Expr& e) {
    switch (e.kind()) {
        case Kind::Number: os << e.number().get_str(); return;
        case Kind::Symbol: os << e.name(); return;
        case Kind::Jet: {
            const int n = e.jet_derivative_order();
            for (int i = 0; i < n; ++i) os << 'd';
            os << jet_name(e.name(), e.eps_order());
            for (const auto& [v, c] : e.jet_derivative())
                for (int i = 0; i < c; ++i) os << '#' << v;
            return;
        }
        case Kind::Func:
            os << e.name() << '(';
            print_text(os, e.args()[0]);
            os << ')';
            return;
        case Kind::Integral:
            os << "Int(" << e.name() << ',';
            print_text(os, e.args()[0]);
            os << ')';
            return;
        case Kind::Fn: {
            os << e.name();
            const auto& d = e.fn_derivative();
            if (e.family() != kNoFamily) os << '[' << e.family() << ']';
            bool any = false;
            for (int x : d) any = any || x != 0;
            if (any) {
                if (d.size() == 1) {
                    for (int i = 0; i < d[0]; ++i) os << '\'';
                } else {
                    os << "_{";
                    for (std::size_t i = 0; i < d.size(); ++i) os << (i ? "," : "") << d[i];
                    os << '}';
                }
            }
            os << '(';
            for (std::size_t i = 0; i < e.args().size(); ++i) {
                if (i) os << ',';
                print_text(os, e.args()[i]);
            }
            os << ')';
            return;
        }
        case Kind::Mul: {
            const Rational& c = e.coefficient();
            bool first = true;
            if (c == -1) {
                os << '-';
            } else if (c != 1) {
                os << c.get_str();
                first = false;
            }
            for (const auto& [b, x] : e.operands()) {
                if (!first) os << '*';
                first = false;
                print_factor_base(os, b);
                print_exponent(os, x);
            }
            return;
        }
        case Kind::Add: {
            bool first = true;
            auto emit = [&](const Expr& t) {
                if (first) {
                    print_text(os, t);
                    first = false;
                } else if (negative_term(t)) {
                    os << " - ";
                    print_text(os, -t);
                } else {
                    os << " + ";
                    print_text(os, t);
                }
            };
            for (const auto& [t, c] : e.operands()) emit(c == 1 ? t : t * Expr(c));
            if (e.coefficient() != 0) emit(Expr(e.coefficient()));
            return;
        }
    }
}

}  // namespace

std::string to_string(const Expr& e) {
    std::ostringstream os;
    print_text(os, e);
    return os.str();
}

std::ostream& operator<<(std::ostream& os, const Expr& e) {
    print_text(os, e);
    return os;
}

// ---------------------------------------------------------------------------
// LaTeX

namespace {

const std::map<std::string, std::string>& greek() {
    static const std::map<std::string, std::string> g = {
        {"alpha", "\\alpha"}, {"beta", "\\beta"},   {"gamma", "\\gamma"}, {"delta", "\\delta"},
        {"eps", "\\varepsilon"}, {"kappa", "\\kappa"}, {"lambda", "\\lambda"}, {"mu", "\\mu"},
        {"omega", "\\omega"}, {"phi", "\\phi"},     {"xi", "\\xi"},       {"eta", "\\eta"},
        {"sigma", "\\sigma"}, {"tau", "\\tau"},     {"theta", "\\theta"}, {"pi", "\\pi"},
    };
    return g;
}

std::string latex_name(const std::string& name) {
    // Split trailing digits or an underscore suffix into a subscript.
    std::string head = name, sub;
    if (auto u = name.find('_'); u != std::string::npos && u > 0) {
        head = name.substr(0, u);
        sub = name.substr(u + 1);
    } else {
        std::size_t k = name.size();
        while (k > 1 && std::isdigit(static_cast<unsigned char>(name[k - 1]))) --k;
        if (k < name.size()) {
            head = name.substr(0, k);
            sub = name.substr(k);
        }
    }
    auto it = greek().find(head);
    std::string out = it != greek().end() ? it->second : head;
    if (!sub.empty()) out += "_{" + sub + "}";
    return out;
}

std::string latex_rational(const Rational& q) {
    if (q.get_den() == 1) return q.get_num().get_str();
    std::string s = q < 0 ? "-" : "";
    mpz_class n = abs(q.get_num());
    return s + "\\frac{" + n.get_str() + "}{" + q.get_den().get_str() + "}";
}

std::string latex(const Expr& e);

std::string latex_power(const Expr& b, const Rational& x) {
    std::string base = latex(b);
    const bool paren = b.kind() == Kind::Add || b.kind() == Kind::Mul ||
                       (b.kind() == Kind::Number && (b.number() < 0 || b.number().get_den() != 1));
    if (x == Rational(1, 2)) return "\\sqrt{" + base + "}";
    if (paren) base = "\\left(" + base + "\\right)";
    if (x == 1) return base;
    if (b.kind() == Kind::Func && x.get_den() == 1 && x > 0 && b.name() != "exp") {
        // sin^2(t) style
        const std::string& a = base;
        const auto open = a.find("\\left(");
        return a.substr(0, open) + "^{" + x.get_str() + "}" + a.substr(open);
    }
    return "{" + base + "}^{" + latex_rational(x) + "}";
}

std::string latex(const Expr& e) {
    switch (e.kind()) {
        case Kind::Number: return latex_rational(e.number());
        case Kind::Symbol: return latex_name(e.name());
        case Kind::Jet: {
            std::string base = latex_name(e.name());
            std::string sub = e.eps_order() == kBaseOrder ? "" : "(" + std::to_string(e.eps_order()) + ")";
            const auto& d = e.jet_derivative();
            if (d.size() == 1 && d[0].first == "t" && d[0].second <= 3) {
                static const char* dots[] = {"", "\\dot", "\\ddot", "\\dddot"};
                base = std::string(dots[d[0].second]) + "{" + base + "}";
            } else {
                for (const auto& [v, c] : d) {
                    for (int i = 0; i < c; ++i) sub += (sub.empty() ? "" : ",") + latex_name(v);
                }
            }
            if (sub.empty()) return base;
            return base + "_{" + sub + "}";
        }
        case Kind::Func: {
            const std::string a = latex(e.args()[0]);
            if (e.name() == "exp") return "e^{" + a + "}";
            const std::string fname = e.name() == "log" ? "\\ln" : "\\" + e.name();
            return fname + "\\left(" + a + "\\right)";
        }
        case Kind::Integral: {
            const std::string a = latex(e.args()[0]);
            return "\\int " + latex_name(e.name()) + "\\left(" + a + "\\right)\\,\\mathrm{d}" + a;
        }
        case Kind::Fn: {
            std::string out = latex_name(e.name());
            if (e.family() != kNoFamily) out += "_{(" + std::to_string(e.family()) + ")}";
            const auto& d = e.fn_derivative();
            bool any = false;
            for (int x : d) any = any || x != 0;
            if (any) {
                if (d.size() == 1 && d[0] <= 3) {
                    out += "^{" + std::string(static_cast<std::size_t>(d[0]), '\'') + "}";
                } else {
                    out = "\\partial^{";
                    std::string idx;
                    for (std::size_t i = 0; i < d.size(); ++i) idx += (i ? "," : "") + std::to_string(d[i]);
                    out += "(" + idx + ")}" + latex_name(e.name());
                    if (e.family() != kNoFamily) out += "_{(" + std::to_string(e.family()) + ")}";
                }
            }
            out += "\\left(";
            for (std::size_t i = 0; i < e.args().size(); ++i) out += (i ? ", " : "") + latex(e.args()[i]);
            return out + "\\right)";
        }
        case Kind::Mul: {
            std::string num, den;
            for (const auto& [b, x] : e.operands()) {
                std::string& target = x < 0 ? den : num;
                if (!target.empty()) target += " ";
                target += latex_power(b, x < 0 ? Rational(-x) : x);
            }
            Rational c = e.coefficient();
            const bool neg = c < 0;
            if (neg) c = -c;
            std::string cnum = c.get_num() == 1 ? "" : c.get_num().get_str();
            std::string cden = c.get_den() == 1 ? "" : c.get_den().get_str();
            std::string top = cnum.empty() ? num : (num.empty() ? cnum : cnum + " " + num);
            std::string bottom = cden.empty() ? den : (den.empty() ? cden : cden + " " + den);
            if (top.empty()) top = "1";
            std::string out = bottom.empty() ? top : "\\frac{" + top + "}{" + bottom + "}";
            return (neg ? "-" : "") + out;
        }
        case Kind::Add: {
            std::string out;
            auto emit = [&](const Expr& t) {
                if (out.empty()) {
                    out = latex(t);
                } else if (negative_term(t)) {
                    out += " - " + latex(-t);
                } else {
                    out += " + " + latex(t);
                }
            };
            for (const auto& [t, c] : e.operands()) emit(c == 1 ? t : t * Expr(c));
            if (e.coefficient() != 0) emit(Expr(e.coefficient()));
            return out;
        }
    }
    return {};
}

}  // namespace

std::string to_latex(const Expr& e) { return latex(e); }

}  // namespace approxsym
