#include "approxsym/numverify.hpp"

#include <cmath>
#include <ostream>

#include "approxsym/errors.hpp"
#include "approxsym/perturb.hpp"
#include "approxsym/print.hpp"

namespace approxsym {

namespace {

constexpr const char* kSweepEps = "#eps";

double to_double(const Rational& q) { return q.get_d(); }

}  // namespace

Program Program::compile(const Expr& e, const Slots& slots, const std::map<std::string, double>& bindings) {
    Program p;
    std::size_t depth = 0;
    p.emit(e, slots, bindings, depth);
    return p;
}

void Program::emit(const Expr& e, const Slots& slots, const std::map<std::string, double>& bindings,
                   std::size_t& depth) {
    auto push = [&](Instr in) {
        code_.push_back(in);
        if (in.op == Op::Const || in.op == Op::Var) depth_ = std::max(depth_, ++depth);
    };
    switch (e.kind()) {
        case Kind::Number: push({Op::Const, 0, to_double(e.number())}); return;
        case Kind::Symbol:
        case Kind::Jet: {
            if (auto it = slots.find(e); it != slots.end()) {
                push({Op::Var, it->second});
                return;
            }
            if (e.kind() == Kind::Symbol)
                if (auto it = bindings.find(e.name()); it != bindings.end()) {
                    push({Op::Const, 0, it->second});
                    return;
                }
            throw UnboundSymbol("no numeric value for " + to_string(e));
        }
        case Kind::Func: {
            emit(e.args()[0], slots, bindings, depth);
            const std::string& f = e.name();
            Op op = f == "sin" ? Op::Sin : f == "cos" ? Op::Cos : f == "exp" ? Op::Exp : Op::Log;
            push({op});
            return;
        }
        case Kind::Fn:
        case Kind::Integral: throw UnboundSymbol("arbitrary function " + e.name() + " has no concrete definition");
        case Kind::Mul: {
            std::size_t n = 0;
            for (const auto& [b, x] : e.operands()) {
                emit(b, slots, bindings, depth);
                if (x == 1) {
                } else if (x.get_den() == 1) {
                    push({Op::IPow, 0, 0.0, x.get_num().get_si()});
                } else if (x == Rational(1, 2)) {
                    push({Op::Sqrt});
                } else {
                    push({Op::Pow, 0, to_double(x)});
                }
                ++n;
            }
            if (n > 1) {
                push({Op::Prod, n});
                depth -= n - 1;
            }
            if (e.coefficient() != 1) push({Op::Scale, 0, to_double(e.coefficient())});
            return;
        }
        case Kind::Add: {
            std::size_t n = 0;
            if (e.coefficient() != 0) {
                push({Op::Const, 0, to_double(e.coefficient())});
                ++n;
            }
            for (const auto& [t, c] : e.operands()) {
                emit(t, slots, bindings, depth);
                if (c != 1) push({Op::Scale, 0, to_double(c)});
                ++n;
            }
            if (n > 1) {
                push({Op::Sum, n});
                depth -= n - 1;
            }
            return;
        }
    }
}

double Program::eval(const double* vars) const {
    double stack[64] = {};
    std::vector<double> heap;
    double* s = stack;
    if (depth_ > 64) {
        heap.resize(depth_);
        s = heap.data();
    }
    std::size_t top = 0;
    for (const auto& in : code_) {
        switch (in.op) {
            case Op::Const: s[top++] = in.value; break;
            case Op::Var: s[top++] = vars[in.n]; break;
            case Op::Sum: {
                double acc = 0.0;
                for (std::size_t i = top - in.n; i < top; ++i) acc += s[i];
                top -= in.n;
                s[top++] = acc;
                break;
            }
            case Op::Prod: {
                double acc = 1.0;
                for (std::size_t i = top - in.n; i < top; ++i) acc *= s[i];
                top -= in.n;
                s[top++] = acc;
                break;
            }
            case Op::Scale: s[top - 1] *= in.value; break;
            case Op::IPow: {
                const double b = s[top - 1];
                long k = in.power < 0 ? -in.power : in.power;
                double r = 1.0, base = b;
                while (k) {
                    if (k & 1) r *= base;
                    base *= base;
                    k >>= 1;
                }
                s[top - 1] = in.power < 0 ? 1.0 / r : r;
                break;
            }
            case Op::Pow: s[top - 1] = std::pow(s[top - 1], in.value); break;
            case Op::Sqrt: s[top - 1] = std::sqrt(s[top - 1]); break;
            case Op::Sin: s[top - 1] = std::sin(s[top - 1]); break;
            case Op::Cos: s[top - 1] = std::cos(s[top - 1]); break;
            case Op::Exp: s[top - 1] = std::exp(s[top - 1]); break;
            case Op::Log: s[top - 1] = std::log(s[top - 1]); break;
        }
    }
    return s[0];
}

std::size_t Grid::steps() const {
    if (!(h > 0.0) || !std::isfinite(t0) || !std::isfinite(t1) || t1 < t0)
        throw ModelError("invalid time grid");
    return static_cast<std::size_t>(std::llround((t1 - t0) / h));
}

Program NumericModel::compile(const Expr& e) const { return Program::compile(e, slots, bindings); }

std::vector<double> NumericModel::initial_state(const std::map<Expr, double, ExprLess>& values) const {
    std::vector<double> y(dim(), 0.0);
    for (std::size_t i = 0; i < dim(); ++i)
        if (auto it = values.find(coordinates[i]); it != values.end()) y[i] = it->second;
    return y;
}

NumericModel compile_numeric(const PerturbedLagrangian& L, const std::map<std::string, double>& bindings) {
    const JetSpace& sp = L.space;
    if (sp.n() != 1) throw ModelError("numeric integration needs exactly one independent variable");
    const OnShell on = solve_on_shell(L);
    std::map<std::pair<int, std::size_t>, Expr> accel;
    for (const auto& [lhs, rhs] : on.rules) {
        if (lhs.kind() != Kind::Jet || lhs.jet_derivative_order() != 2) continue;
        accel.emplace(std::make_pair(lhs.eps_order(), static_cast<std::size_t>(sp.dependent_index(lhs.name()))), rhs);
    }
    NumericModel m;
    m.space = sp;
    m.bindings = bindings;
    for (const auto& [key, rhs] : accel) m.coordinates.push_back(sp.u(key.second, key.first));
    for (const auto& [key, rhs] : accel) m.coordinates.push_back(sp.du(key.second, key.first, 0));
    for (std::size_t i = 0; i < m.coordinates.size(); ++i) m.slots.emplace(m.coordinates[i], i);
    m.slots.emplace(sp.x(0), m.coordinates.size());
    const std::size_t half = accel.size();
    for (std::size_t i = 0; i < half; ++i) m.rhs.push_back(m.compile(m.coordinates[half + i]));
    for (const auto& [key, rhs] : accel) m.rhs.push_back(m.compile(rhs));
    return m;
}

Trajectory integrate(const NumericModel& model, const std::vector<double>& y0, const Grid& grid) {
    const std::size_t n = model.dim();
    const std::size_t steps = grid.steps();
    if (y0.size() != n) throw ModelError("initial state has wrong dimension");
    Trajectory tr;
    tr.t.reserve(steps + 1);
    tr.states.reserve(steps + 1);
    std::vector<double> y = y0, arg(n + 1), k1(n), k2(n), k3(n), k4(n);
    auto f = [&](double t, const std::vector<double>& state, const std::vector<double>* dk, double a,
                 std::vector<double>& out) {
        for (std::size_t i = 0; i < n; ++i) arg[i] = state[i] + (dk ? a * (*dk)[i] : 0.0);
        arg[n] = t;
        for (std::size_t i = 0; i < n; ++i) out[i] = model.rhs[i].eval(arg);
    };
    const double h = grid.h;
    tr.t.push_back(grid.t0);
    tr.states.push_back(y);
    for (std::size_t s = 0; s < steps; ++s) {
        const double t = grid.t0 + static_cast<double>(s) * h;
        f(t, y, nullptr, 0.0, k1);
        f(t + h / 2, y, &k1, h / 2, k2);
        f(t + h / 2, y, &k2, h / 2, k3);
        f(t + h, y, &k3, h, k4);
        for (std::size_t i = 0; i < n; ++i) {
            y[i] += h / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
            if (!std::isfinite(y[i]))
                throw NonFiniteState("state " + to_string(model.coordinates[i]) + " became non-finite at t = " +
                                     std::to_string(t + h));
        }
        tr.t.push_back(grid.t0 + static_cast<double>(s + 1) * h);
        tr.states.push_back(y);
    }
    return tr;
}

std::vector<std::vector<double>> evaluate_law(const NumericModel& model, const Trajectory& tr,
                                              const ConservationLaw& law) {
    std::vector<std::vector<double>> out;
    std::vector<double> arg(model.dim() + 1);
    for (const auto& order : law.fluxes) {
        const Program prog = model.compile(order.at(0));
        std::vector<double> vals;
        vals.reserve(tr.t.size());
        for (std::size_t s = 0; s < tr.t.size(); ++s) {
            std::copy(tr.states[s].begin(), tr.states[s].end(), arg.begin());
            arg.back() = tr.t[s];
            vals.push_back(prog.eval(arg));
        }
        out.push_back(std::move(vals));
    }
    return out;
}

DriftReport drift(const NumericModel& model, const Trajectory& tr, const ConservationLaw& law) {
    DriftReport r;
    for (const auto& vals : evaluate_law(model, tr, law)) {
        double d = 0.0;
        for (double v : vals) d = std::max(d, std::abs(v - vals.front()));
        r.drift.push_back(d);
    }
    return r;
}

double richardson_error(const NumericModel& model, const std::vector<double>& y0, const Grid& grid) {
    Grid coarse = grid;
    coarse.h = 2 * grid.h;
    const auto fine = integrate(model, y0, grid);
    const auto rough = integrate(model, y0, coarse);
    double e = 0.0;
    for (std::size_t i = 0; i < model.dim(); ++i)
        e = std::max(e, std::abs(fine.states.back()[i] - rough.states.back()[i]));
    return e / 15.0;
}

SweepReport eps_sweep(const Expr& lagrangian, const JetSpace& space, const ConservationLaw& law,
                      const std::map<std::string, double>& bindings, const std::map<Expr, double, ExprLess>& initial,
                      const Grid& grid, const std::vector<double>& eps_values) {
    if (space.order_p != 1) throw ModelError("the ε-sweep needs order p = 1");
    if (space.n() != 1) throw ModelError("numeric integration needs exactly one independent variable");
    JetSpace full_space = space;
    full_space.order_p = 0;
    const Expr full = substitute(lagrangian, {{Expr::symbol(kEps), Expr::symbol(kSweepEps)}});
    const auto full_L = PerturbedLagrangian::from_source(full, full_space);

    // The law is evaluated on hierarchy coordinates rebuilt from the two runs.
    Slots law_slots;
    std::vector<Expr> hier;
    for (int k = 0; k <= 1; ++k)
        for (std::size_t a = 0; a < space.m(); ++a) {
            hier.push_back(space.u(a, k));
            hier.push_back(space.du(a, k, 0));
        }
    for (std::size_t i = 0; i < hier.size(); ++i) law_slots.emplace(hier[i], i);
    law_slots.emplace(space.x(0), hier.size());
    std::vector<Program> I;
    for (const auto& order : law.fluxes) I.push_back(Program::compile(order.at(0), law_slots, bindings));

    auto value = [&](const Expr& a) {
        auto it = initial.find(a);
        return it == initial.end() ? 0.0 : it->second;
    };
    // Initial data always uses eps_ic; the dynamics use eps.
    auto run = [&](double eps, double eps_ic) {
        auto b = bindings;
        b[kSweepEps] = eps;
        NumericModel nm = compile_numeric(full_L, b);
        std::map<Expr, double, ExprLess> y0;
        for (std::size_t a = 0; a < space.m(); ++a) {
            y0[full_space.u(a, 0)] = value(space.u(a, 0)) + eps_ic * value(space.u(a, 1));
            y0[full_space.du(a, 0, 0)] = value(space.du(a, 0, 0)) + eps_ic * value(space.du(a, 1, 0));
        }
        return std::make_pair(nm, integrate(nm, nm.initial_state(y0), grid));
    };

    SweepReport rep;
    std::vector<double> lx, ly;
    for (double eps : eps_values) {
        const auto [nm, tr] = run(eps, eps);
        const auto [nm0, tr0] = run(0.0, eps);
        std::vector<std::size_t> col_u(space.m(), SIZE_MAX), col_du(space.m(), SIZE_MAX);
        for (std::size_t a = 0; a < space.m(); ++a) {
            if (auto it = nm.slots.find(full_space.u(a, 0)); it != nm.slots.end()) col_u[a] = it->second;
            if (auto it = nm.slots.find(full_space.du(a, 0, 0)); it != nm.slots.end()) col_du[a] = it->second;
        }
        std::vector<double> arg(hier.size() + 1, 0.0);
        double first = 0.0, worst = 0.0;
        for (std::size_t s = 0; s < tr.t.size(); ++s) {
            for (std::size_t a = 0; a < space.m(); ++a) {
                const double u = col_u[a] == SIZE_MAX ? 0.0 : tr.states[s][col_u[a]];
                const double v = col_du[a] == SIZE_MAX ? 0.0 : tr.states[s][col_du[a]];
                const double u0 = col_u[a] == SIZE_MAX ? 0.0 : tr0.states[s][col_u[a]];
                const double v0 = col_du[a] == SIZE_MAX ? 0.0 : tr0.states[s][col_du[a]];
                arg[2 * a] = u0;
                arg[2 * a + 1] = v0;
                arg[2 * (space.m() + a)] = eps != 0.0 ? (u - u0) / eps : 0.0;
                arg[2 * (space.m() + a) + 1] = eps != 0.0 ? (v - v0) / eps : 0.0;
            }
            arg.back() = tr.t[s];
            double total = 0.0, pw = 1.0;
            for (const auto& prog : I) {
                total += pw * prog.eval(arg);
                pw *= eps;
            }
            if (s == 0) first = total;
            worst = std::max(worst, std::abs(total - first));
        }
        rep.points.push_back({eps, worst});
        if (eps > 0.0 && worst > 0.0) {
            lx.push_back(std::log(eps));
            ly.push_back(std::log(worst));
        }
    }
    if (lx.size() >= 2) {
        double mx = 0, my = 0;
        for (std::size_t i = 0; i < lx.size(); ++i) {
            mx += lx[i];
            my += ly[i];
        }
        mx /= static_cast<double>(lx.size());
        my /= static_cast<double>(lx.size());
        double sxy = 0, sxx = 0;
        for (std::size_t i = 0; i < lx.size(); ++i) {
            sxy += (lx[i] - mx) * (ly[i] - my);
            sxx += (lx[i] - mx) * (lx[i] - mx);
        }
        rep.slope = sxx > 0 ? sxy / sxx : 0.0;
    }
    return rep;
}

void write_csv(std::ostream& os, const NumericModel& model, const Trajectory& tr, const ConservationLaw* law) {
    os << model.space.independent.at(0);
    for (const auto& c : model.coordinates) os << ',' << to_string(c);
    std::vector<std::vector<double>> vals;
    if (law) {
        vals = evaluate_law(model, tr, *law);
        for (std::size_t k = 0; k < vals.size(); ++k) os << ",I" << k;
    }
    os << '\n';
    os.precision(17);
    for (std::size_t s = 0; s < tr.t.size(); ++s) {
        os << tr.t[s];
        for (double v : tr.states[s]) os << ',' << v;
        for (const auto& col : vals) os << ',' << col[s];
        os << '\n';
    }
}

}  // namespace approxsym
