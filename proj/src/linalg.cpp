#include "approxsym/linalg.hpp"

#include <algorithm>

#include "approxsym/errors.hpp"
#include "approxsym/print.hpp"
#include "approxsym/simplify.hpp"

namespace approxsym {

namespace {

Assume lookup(const Assumptions& a, const std::string& name) {
    auto it = a.find(name);
    return it == a.end() ? Assume::None : it->second;
}

bool positive_factor(const Expr& b, const Rational& x, const Assumptions& a) {
    switch (b.kind()) {
        case Kind::Number: return b.number() > 0;
        case Kind::Symbol: {
            const Assume s = lookup(a, b.name());
            if (s == Assume::Positive) return true;
            // Even integer powers of a nonzero constant are positive.
            return s == Assume::Nonzero && x.get_den() == 1 && x.get_num() % 2 == 0;
        }
        case Kind::Add: return provably_positive(b, a);
        default: return false;
    }
}

bool nonzero_factor(const Expr& b, const Assumptions& a) {
    switch (b.kind()) {
        case Kind::Number: return b.number() != 0;
        case Kind::Symbol: return lookup(a, b.name()) != Assume::None;
        case Kind::Add: return provably_nonzero(b, a);
        default: return false;
    }
}

std::size_t weight(const Expr& e) {
    if (e.is_number()) return 0;
    if (e.kind() == Kind::Add) return 1 + e.operands().size();
    return 1;
}

}  // namespace

bool provably_positive(const Expr& e, const Assumptions& assumptions) {
    switch (e.kind()) {
        case Kind::Number: return e.number() > 0;
        case Kind::Mul: {
            if (e.coefficient() < 0) return false;
            for (const auto& [b, x] : e.operands())
                if (!positive_factor(b, x, assumptions)) return false;
            return true;
        }
        case Kind::Add: {
            if (e.coefficient() < 0) return false;
            for (const auto& [t, c] : e.operands())
                if (c < 0 || !provably_positive(t, assumptions)) return false;
            return true;
        }
        default: return positive_factor(e, Rational(1), assumptions);
    }
}

bool provably_nonzero(const Expr& e, const Assumptions& assumptions) {
    switch (e.kind()) {
        case Kind::Number: return e.number() != 0;
        case Kind::Mul:
            for (const auto& [b, x] : e.operands())
                if (!nonzero_factor(b, assumptions)) return false;
            return true;
        case Kind::Add: return provably_positive(e, assumptions) || provably_positive(-e, assumptions);
        default: return nonzero_factor(e, assumptions);
    }
}

std::vector<std::size_t> RowEchelon::free_columns() const {
    std::vector<std::size_t> out;
    std::size_t pi = 0;
    std::vector<std::size_t> sorted = pivots;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t c = 0; c < cols; ++c) {
        if (pi < sorted.size() && sorted[pi] == c) {
            ++pi;
            continue;
        }
        out.push_back(c);
    }
    return out;
}

RowEchelon row_reduce(std::vector<SparseRow> rows, std::size_t cols, PivotPolicy policy,
                      const Assumptions& assumptions) {
    auto is_zero_entry = [&](const Expr& e) {
        if (e.is_number()) return e.is_zero();
        return is_identically_zero(e);
    };
    // Drop zero entries up front.
    for (auto& r : rows)
        std::erase_if(r, [&](const auto& kv) { return is_zero_entry(kv.second); });
    std::erase_if(rows, [](const SparseRow& r) { return r.empty(); });

    RowEchelon out;
    out.cols = cols;
    std::vector<bool> used(rows.size(), false);
    std::vector<std::size_t> pivot_rows;
    for (std::size_t c = 0; c < cols; ++c) {
        // Choose a pivot row among unused rows with an entry in column c.
        std::size_t best = rows.size();
        std::size_t best_w = 0, best_len = 0;
        const Expr* ambiguous = nullptr;
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (used[r]) continue;
            auto it = rows[r].find(c);
            if (it == rows[r].end()) continue;
            const Expr& v = it->second;
            bool admissible = v.is_number() || provably_nonzero(v, assumptions) ||
                              (policy == PivotPolicy::Transcendental && is_zero(v) == ZeroVerdict::False);
            if (!admissible) {
                if (!ambiguous) ambiguous = &v;
                continue;
            }
            const std::size_t w = weight(v);
            if (best == rows.size() || w < best_w || (w == best_w && rows[r].size() < best_len)) {
                best = r;
                best_w = w;
                best_len = rows[r].size();
            }
        }
        if (best == rows.size()) {
            if (ambiguous) throw SymbolicPivotAmbiguity(to_string(*ambiguous));
            continue;
        }
        used[best] = true;
        // Normalize the pivot row.
        const Expr inv = pow(rows[best].at(c), -1);
        for (auto& [col, v] : rows[best]) v = (col == c) ? Expr(1) : v * inv;
        const SparseRow& prow = rows[best];
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (r == best) continue;
            auto it = rows[r].find(c);
            if (it == rows[r].end()) continue;
            const Expr f = it->second;
            for (const auto& [col, v] : prow) {
                Expr nv = rows[r][col] - f * v;
                if (col == c || is_zero_entry(nv))
                    rows[r].erase(col);
                else
                    rows[r][col] = nv;
            }
        }
        out.pivots.push_back(c);
        pivot_rows.push_back(best);
    }
    for (std::size_t r : pivot_rows) out.rows.push_back(std::move(rows[r]));
    return out;
}

std::vector<std::vector<Expr>> nullspace(const RowEchelon& ech) {
    std::vector<std::vector<Expr>> basis;
    for (std::size_t f : ech.free_columns()) {
        std::vector<Expr> v(ech.cols, Expr(0));
        v[f] = Expr(1);
        for (std::size_t r = 0; r < ech.rows.size(); ++r) {
            auto it = ech.rows[r].find(f);
            if (it != ech.rows[r].end()) v[ech.pivots[r]] = -it->second;
        }
        basis.push_back(std::move(v));
    }
    return basis;
}

std::size_t rank(const std::vector<std::vector<Expr>>& matrix) {
    std::vector<SparseRow> rows;
    std::size_t cols = 0;
    for (const auto& r : matrix) {
        SparseRow s;
        for (std::size_t c = 0; c < r.size(); ++c)
            if (!r[c].is_zero()) s[c] = r[c];
        cols = std::max(cols, r.size());
        rows.push_back(std::move(s));
    }
    return row_reduce(std::move(rows), cols, PivotPolicy::Transcendental).rank();
}

}  // namespace approxsym
