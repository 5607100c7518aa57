#include "approxsym/symmetry.hpp"

#include <functional>

#include "approxsym/calculus.hpp"
#include "approxsym/errors.hpp"
#include "approxsym/simplify.hpp"

namespace approxsym {

namespace {

JetDerivative to_jet_derivative(const JetSpace& space, const MultiIndex& J) {
    JetDerivative d;
    for (int i : J) d.emplace_back(space.independent.at(static_cast<std::size_t>(i)), 1);
    return d;
}

MultiIndex to_multi_index(const JetSpace& space, const JetDerivative& d) {
    MultiIndex J;
    for (const auto& [v, c] : d) {
        const int i = space.independent_index(v);
        if (i < 0) throw Error("unknown independent variable " + v);
        for (int n = 0; n < c; ++n) J.push_back(i);
    }
    std::sort(J.begin(), J.end());
    return J;
}

/// All sorted multi-indices of length q over n variables.
std::vector<MultiIndex> multi_indices(std::size_t n, int q) {
    std::vector<MultiIndex> out;
    MultiIndex cur;
    std::function<void(int, int)> rec = [&](int start, int left) {
        if (left == 0) {
            out.push_back(cur);
            return;
        }
        for (int i = start; i < static_cast<int>(n); ++i) {
            cur.push_back(i);
            rec(i, left - 1);
            cur.pop_back();
        }
    };
    rec(0, q);
    return out;
}

}  // namespace

ApproximateGenerator::ApproximateGenerator(JetSpace space, std::vector<std::vector<Expr>> xi,
                                           std::vector<std::vector<Expr>> eta)
    : space_(std::move(space)), xi_(std::move(xi)), eta_(std::move(eta)) {
    const std::size_t orders = static_cast<std::size_t>(space_.order_p + 1);
    if (xi_.size() != orders || eta_.size() != orders)
        throw OrderMismatch("generator needs p + 1 = " + std::to_string(orders) + " ε-orders");
    for (const auto& row : xi_)
        if (row.size() != space_.n()) throw ModelError("xi row length differs from the number of independent variables");
    for (const auto& row : eta_)
        if (row.size() != space_.m()) throw ModelError("eta row length differs from the number of dependent variables");
}

ApproximateGenerator ApproximateGenerator::zero(const JetSpace& space) {
    const std::size_t orders = static_cast<std::size_t>(space.order_p + 1);
    return ApproximateGenerator(space, std::vector<std::vector<Expr>>(orders, std::vector<Expr>(space.n())),
                                std::vector<std::vector<Expr>>(orders, std::vector<Expr>(space.m())));
}

ApproximateGenerator ApproximateGenerator::from_series(const JetSpace& space, const std::vector<EpsSeries>& xi,
                                                       const std::vector<EpsSeries>& eta) {
    ApproximateGenerator g = zero(space);
    for (int k = 0; k <= space.order_p; ++k) {
        for (std::size_t i = 0; i < space.n(); ++i) g.xi_[k][i] = xi.at(i).c.at(k);
        for (std::size_t a = 0; a < space.m(); ++a) g.eta_[k][a] = eta.at(a).c.at(k);
    }
    return g;
}

EpsSeries ApproximateGenerator::xi_series(std::size_t i) const {
    EpsSeries s(space_.order_p);
    for (int k = 0; k <= space_.order_p; ++k) s.c[k] = xi_[k].at(i);
    return s;
}

EpsSeries ApproximateGenerator::eta_series(std::size_t alpha) const {
    EpsSeries s(space_.order_p);
    for (int k = 0; k <= space_.order_p; ++k) s.c[k] = eta_[k].at(alpha);
    return s;
}

void ApproximateGenerator::prolong(int order) {
    if (order <= prolonged_) return;
    if (order > space_.max_derivative)
        throw DerivativeOverflow("prolongation order " + std::to_string(order) + " exceeds r = " +
                                 std::to_string(space_.max_derivative));
    const int p = space_.order_p;
    const std::size_t n = space_.n();
    // D_i ξ̃_(b)j
    std::vector<std::vector<std::vector<Expr>>> dxi(n, std::vector<std::vector<Expr>>(p + 1, std::vector<Expr>(n)));
    for (std::size_t i = 0; i < n; ++i)
        for (int b = 0; b <= p; ++b)
            for (std::size_t j = 0; j < n; ++j) dxi[i][b][j] = total_derivative(xi_[b][j], i, space_);

    for (int q = prolonged_ + 1; q <= order; ++q) {
        for (std::size_t a = 0; a < space_.m(); ++a) {
            for (const MultiIndex& J : multi_indices(n, q)) {
                // J = J' + {i} with i the last (largest) index.
                MultiIndex Jp(J.begin(), J.end() - 1);
                const std::size_t i = static_cast<std::size_t>(J.back());
                for (int k = 0; k <= p; ++k) {
                    Expr prev = Jp.empty() ? eta_[k][a] : cache_.at({k, a, Jp});
                    SumBuilder sb;
                    sb.add(total_derivative(prev, i, space_));
                    for (std::size_t j = 0; j < n; ++j) {
                        MultiIndex Jj = Jp;
                        Jj.push_back(static_cast<int>(j));
                        std::sort(Jj.begin(), Jj.end());
                        const JetDerivative jd = to_jet_derivative(space_, Jj);
                        for (int ai = 0; ai <= k; ++ai) {
                            const Expr& d = dxi[i][k - ai][j];
                            if (d.is_zero()) continue;
                            sb.add(Expr::jet(space_.dependent[a], ai, jd) * d, Rational(-1));
                        }
                    }
                    cache_[{k, a, J}] = sb.build();
                }
            }
        }
    }
    prolonged_ = order;
}

const Expr& ApproximateGenerator::prolongation(int k, std::size_t alpha, const MultiIndex& J) const {
    auto it = cache_.find({k, alpha, J});
    if (it == cache_.end())
        throw CacheMissing("prolongation of order " + std::to_string(J.size()) + " not computed (prolonged to " +
                           std::to_string(prolonged_) + ")");
    return it->second;
}

bool ApproximateGenerator::respects_order() const {
    for (int k = 0; k <= space_.order_p; ++k) {
        for (const auto& x : xi_[k])
            if (max_jet_order(x) > k) return false;
        for (const auto& x : eta_[k])
            if (max_jet_order(x) > k) return false;
    }
    return true;
}

bool ApproximateGenerator::is_zero() const {
    for (const auto& row : xi_)
        for (const auto& x : row)
            if (!is_identically_zero(x)) return false;
    for (const auto& row : eta_)
        for (const auto& x : row)
            if (!is_identically_zero(x)) return false;
    return true;
}

Expr act(const ApproximateGenerator& g, int ell, const Expr& f, int order) {
    const JetSpace& space = g.space();
    SumBuilder sb;
    for (std::size_t i = 0; i < space.n(); ++i) {
        const Expr& xi = g.xi(ell, i);
        if (xi.is_zero()) continue;
        Expr d = differentiate(f, space.x(i));
        if (!d.is_zero()) sb.add(xi * d);
    }
    for (std::size_t a = 0; a < space.m(); ++a) {
        const Expr& eta = g.eta(ell, a);
        if (eta.is_zero()) continue;
        Expr d = differentiate(f, space.u(a, 0));
        if (!d.is_zero()) sb.add(eta * d);
    }
    if (order > 0) {
        const auto jets = atoms_of(f, [](const Expr& x) {
            return x.kind() == Kind::Jet && x.eps_order() == 0 && x.jet_derivative_order() > 0;
        });
        for (const Expr& jet : jets) {
            if (jet.jet_derivative_order() > order) continue;
            const int a = space.dependent_index(jet.name());
            if (a < 0) continue;
            const Expr& coeff = g.prolongation(ell, static_cast<std::size_t>(a), to_multi_index(space, jet.jet_derivative()));
            if (coeff.is_zero()) continue;
            sb.add(coeff * differentiate(f, jet));
        }
    }
    return sb.build();
}

EpsSeries apply(const ApproximateGenerator& g, const EpsSeries& s, int order) {
    if (g.prolonged_order() < order)
        throw CacheMissing("generator not prolonged to order " + std::to_string(order));
    const int p = g.space().order_p;
    if (s.order() != p) throw OrderMismatch("series order differs from the generator's");
    EpsSeries r(p);
    for (int k = 0; k <= p; ++k) {
        SumBuilder sb;
        for (int l = 0; l <= k; ++l) sb.add(act(g, l, s.c[k - l], order));
        r.c[k] = sb.build();
    }
    return r;
}

ApproximateGenerator commutator(const ApproximateGenerator& g1, const ApproximateGenerator& g2) {
    const JetSpace& space = g1.space();
    const int p = space.order_p;
    ApproximateGenerator out = ApproximateGenerator::zero(space);
    std::vector<std::vector<Expr>> xi(p + 1, std::vector<Expr>(space.n()));
    std::vector<std::vector<Expr>> eta(p + 1, std::vector<Expr>(space.m()));
    for (int k = 0; k <= p; ++k) {
        for (std::size_t i = 0; i < space.n(); ++i) {
            SumBuilder sb;
            for (int l = 0; l <= k; ++l) {
                sb.add(act(g1, l, g2.xi(k - l, i), 0));
                sb.add(act(g2, l, g1.xi(k - l, i), 0), Rational(-1));
            }
            xi[k][i] = trig_reduce(sb.build());
        }
        for (std::size_t a = 0; a < space.m(); ++a) {
            SumBuilder sb;
            for (int l = 0; l <= k; ++l) {
                sb.add(act(g1, l, g2.eta(k - l, a), 0));
                sb.add(act(g2, l, g1.eta(k - l, a), 0), Rational(-1));
            }
            eta[k][a] = trig_reduce(sb.build());
        }
    }
    return ApproximateGenerator(space, std::move(xi), std::move(eta));
}

ApproximateGenerator eps_shift(const ApproximateGenerator& g) {
    const JetSpace& space = g.space();
    std::vector<EpsSeries> xi, eta;
    for (std::size_t i = 0; i < space.n(); ++i) xi.push_back(series_shift(g.xi_series(i)));
    for (std::size_t a = 0; a < space.m(); ++a) eta.push_back(series_shift(g.eta_series(a)));
    return ApproximateGenerator::from_series(space, xi, eta);
}

ApproximateGenerator combine(const Expr& a, const ApproximateGenerator& g1, const Expr& b,
                             const ApproximateGenerator& g2) {
    const JetSpace& space = g1.space();
    auto xi = g1.xi();
    auto eta = g1.eta();
    for (int k = 0; k <= space.order_p; ++k) {
        for (std::size_t i = 0; i < space.n(); ++i) xi[k][i] = a * g1.xi(k, i) + b * g2.xi(k, i);
        for (std::size_t al = 0; al < space.m(); ++al) eta[k][al] = a * g1.eta(k, al) + b * g2.eta(k, al);
    }
    return ApproximateGenerator(space, std::move(xi), std::move(eta));
}

ApproximateGenerator expand_generator(const JetSpace& space, const std::vector<Expr>& xi,
                                      const std::vector<Expr>& eta) {
    if (xi.size() != space.n() || eta.size() != space.m()) throw ModelError("generator component count mismatch");
    std::vector<EpsSeries> xs, es;
    for (const auto& x : xi) xs.push_back(expand(x, space));
    for (const auto& e : eta) es.push_back(expand(e, space));
    return ApproximateGenerator::from_series(space, xs, es);
}

bool prolongation_routes_agree(const JetSpace& space, const std::vector<Expr>& xi, const std::vector<Expr>& eta,
                               int order) {
    ApproximateGenerator g = expand_generator(space, xi, eta);
    g.prolong(order);
    const std::size_t n = space.n();
    // Exact prolongation on base variables, then expansion.
    std::map<std::pair<std::size_t, MultiIndex>, Expr> exact;
    std::vector<std::vector<Expr>> dxi(n, std::vector<Expr>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) dxi[i][j] = total_derivative(xi[j], i, space);
    for (int q = 1; q <= order; ++q) {
        for (std::size_t a = 0; a < space.m(); ++a) {
            for (const MultiIndex& J : multi_indices(n, q)) {
                MultiIndex Jp(J.begin(), J.end() - 1);
                const std::size_t i = static_cast<std::size_t>(J.back());
                Expr prev = Jp.empty() ? eta[a] : exact.at({a, Jp});
                Expr r = total_derivative(prev, i, space);
                for (std::size_t j = 0; j < n; ++j) {
                    MultiIndex Jj = Jp;
                    Jj.push_back(static_cast<int>(j));
                    std::sort(Jj.begin(), Jj.end());
                    r = r - Expr::jet(space.dependent[a], kBaseOrder, to_jet_derivative(space, Jj)) * dxi[i][j];
                }
                exact[{a, J}] = r;
                const EpsSeries s = expand(r, space);
                for (int k = 0; k <= space.order_p; ++k)
                    if (!is_identically_zero(s.c[k] - g.prolongation(k, a, J))) return false;
            }
        }
    }
    return true;
}

}  // namespace approxsym
