#include "approxsym/json_tree.hpp"

#include "approxsym/errors.hpp"

namespace approxsym {

using nlohmann::json;

json to_json_tree(const Expr& e) {
    switch (e.kind()) {
        case Kind::Number: return {{"op", "num"}, {"value", e.number().get_str()}};
        case Kind::Symbol: return {{"op", "sym"}, {"name", e.name()}};
        case Kind::Jet: {
            json d = json::object();
            for (const auto& [v, c] : e.jet_derivative()) d[v] = c;
            json j = {{"op", "jet"}, {"base", e.name()}, {"deriv", d}};
            if (e.eps_order() != kBaseOrder) j["order"] = e.eps_order();
            return j;
        }
        case Kind::Func: return {{"op", e.name()}, {"args", json::array({to_json_tree(e.args()[0])})}};
        case Kind::Integral:
            return {{"op", "int"}, {"name", e.name()}, {"args", json::array({to_json_tree(e.args()[0])})}};
        case Kind::Fn: {
            json args = json::array();
            for (const auto& a : e.args()) args.push_back(to_json_tree(a));
            json j = {{"op", "fn"}, {"name", e.name()}, {"deriv", e.fn_derivative()}, {"args", args}};
            if (e.family() != kNoFamily) j["family"] = e.family();
            return j;
        }
        case Kind::Mul: {
            json args = json::array();
            if (e.coefficient() != 1) args.push_back(to_json_tree(Expr(e.coefficient())));
            for (const auto& [b, x] : e.operands()) {
                if (x == 1)
                    args.push_back(to_json_tree(b));
                else
                    args.push_back({{"op", "pow"}, {"args", json::array({to_json_tree(b), to_json_tree(Expr(x))})}});
            }
            return {{"op", "mul"}, {"args", args}};
        }
        case Kind::Add: {
            json args = json::array();
            for (const auto& [t, c] : e.operands()) args.push_back(to_json_tree(c == 1 ? t : t * Expr(c)));
            if (e.coefficient() != 0) args.push_back(to_json_tree(Expr(e.coefficient())));
            return {{"op", "add"}, {"args", args}};
        }
    }
    return {};
}

Expr from_json_tree(const json& j) {
    if (!j.is_object() || !j.contains("op")) throw ModelError("expression tree node needs an \"op\" field");
    const std::string op = j.at("op").get<std::string>();
    auto args = [&] {
        std::vector<Expr> out;
        for (const auto& a : j.at("args")) out.push_back(from_json_tree(a));
        return out;
    };
    if (op == "num") return Expr(Rational(j.at("value").get<std::string>()));
    if (op == "sym") return Expr::symbol(j.at("name").get<std::string>());
    if (op == "jet") {
        JetDerivative d;
        if (j.contains("deriv"))
            for (const auto& [v, c] : j.at("deriv").items()) d.emplace_back(v, c.get<int>());
        return Expr::jet(j.at("base").get<std::string>(), j.value("order", kBaseOrder), d);
    }
    if (op == "sin" || op == "cos" || op == "exp" || op == "log" || op == "sqrt") return Expr::func(op, args().at(0));
    if (op == "int") return Expr::integral(j.at("name").get<std::string>(), args().at(0));
    if (op == "fn")
        return Expr::fn(j.at("name").get<std::string>(), args(), j.value("deriv", std::vector<int>{}),
                        j.value("family", kNoFamily));
    if (op == "pow") {
        auto a = args();
        if (a.size() != 2 || !a[1].is_number()) throw ModelError("pow node needs a base and a rational exponent");
        return pow(a[0], a[1].number());
    }
    if (op == "mul") {
        Expr acc(1);
        for (const auto& a : args()) acc = acc * a;
        return acc;
    }
    if (op == "add") {
        SumBuilder sb;
        for (const auto& a : args()) sb.add(a);
        return sb.build();
    }
    throw ModelError("unknown expression op '" + op + "'");
}

}  // namespace approxsym
