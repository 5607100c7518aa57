#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "approxsym/calculus.hpp"
#include "approxsym/noether.hpp"

namespace approxsym {

using Slots = std::unordered_map<Expr, std::size_t, ExprHash>;

/// Flat postfix program evaluating an expression at a point.
class Program {
public:
    /// Atoms in `slots` read from the argument vector; other symbols take their
    /// binding. Throws UnboundSymbol for anything left over, including
    /// arbitrary functions.
    static Program compile(const Expr& e, const Slots& slots, const std::map<std::string, double>& bindings);
    double eval(const double* vars) const;
    double eval(const std::vector<double>& vars) const { return eval(vars.data()); }

private:
    enum class Op : std::uint8_t { Const, Var, Sum, Prod, Scale, IPow, Pow, Sqrt, Sin, Cos, Exp, Log };
    struct Instr {
        Op op;
        std::size_t n = 0;
        double value = 0.0;
        long power = 0;
    };
    std::vector<Instr> code_;
    std::size_t depth_ = 0;
    void emit(const Expr& e, const Slots& slots, const std::map<std::string, double>& bindings, std::size_t& depth);
};

struct Grid {
    double t0 = 0.0;
    double t1 = 10.0;
    double h = 1e-3;
    std::size_t steps() const;
};

/// First-order system for the state (u_(k)α ..., u_(k)α,t ...) of every
/// coordinate whose second derivative the hierarchy determines, ordered by
/// (k, α). Only one independent variable is supported.
struct NumericModel {
    JetSpace space;
    std::map<std::string, double> bindings;
    /// State atoms; the last slot of the evaluation vector is the independent variable.
    std::vector<Expr> coordinates;
    Slots slots;
    std::vector<Program> rhs;

    std::size_t dim() const { return coordinates.size(); }
    /// Compiles an expression over the state and the independent variable.
    Program compile(const Expr& e) const;
    /// Initial state from coordinate values; absent coordinates are 0.
    std::vector<double> initial_state(const std::map<Expr, double, ExprLess>& values) const;
};

/// Throws UnboundSymbol, CannotSolveForLeadingDerivative, ModelError.
NumericModel compile_numeric(const PerturbedLagrangian& L, const std::map<std::string, double>& bindings);

struct Trajectory {
    std::vector<double> t;
    std::vector<std::vector<double>> states;
};

/// Classical fixed-step RK4. Throws NonFiniteState.
Trajectory integrate(const NumericModel& model, const std::vector<double>& y0, const Grid& grid);

struct DriftReport {
    /// max |I_k(t) - I_k(t0)| per ε-order.
    std::vector<double> drift;
    /// Richardson estimate |y_h - y_2h|/15 at the final time; negative when not computed.
    double error_estimate = -1.0;
};

/// The law's ε-coefficients (component 0 of the fluxes) along the trajectory, [k][step].
std::vector<std::vector<double>> evaluate_law(const NumericModel& model, const Trajectory& tr,
                                              const ConservationLaw& law);
DriftReport drift(const NumericModel& model, const Trajectory& tr, const ConservationLaw& law);
/// Max-norm difference of the final states at steps h and 2h, divided by 15.
double richardson_error(const NumericModel& model, const std::vector<double>& y0, const Grid& grid);

struct SweepPoint {
    double eps = 0.0;
    double drift = 0.0;
};
struct SweepReport {
    std::vector<SweepPoint> points;
    /// Least-squares slope of log(drift) against log(eps).
    double slope = 0.0;
};

/// Integrates the full perturbed equation at each ε (u = u_(0) + εu_(1) at t0)
/// and the unperturbed one from the same data, sets u_(0) to the unperturbed
/// solution and u_(1) = (u - u_(0))/ε, and measures the drift of I_0 + εI_1.
/// Requires p = 1 and `lagrangian` in base variables with `eps`.
SweepReport eps_sweep(const Expr& lagrangian, const JetSpace& space, const ConservationLaw& law,
                      const std::map<std::string, double>& bindings, const std::map<Expr, double, ExprLess>& initial,
                      const Grid& grid, const std::vector<double>& eps_values);

/// Header `t,<coordinates>,I0,...,Ip` followed by one row per step.
void write_csv(std::ostream& os, const NumericModel& model, const Trajectory& tr, const ConservationLaw* law);

}  // namespace approxsym
