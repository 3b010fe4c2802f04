#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include <gmpxx.h>

namespace phikit {

// Dense two-phase tableau simplex for
//     min c·x  subject to  A x >= b,  x >= 0.
// Works over double (with tolerances) or mpq_class (exact).
enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

const char* lp_status_name(LpStatus s);

template <class T>
struct LpResult {
    LpStatus status = LpStatus::Infeasible;
    T objective{};
    std::vector<T> x;  // primal, size n
    std::vector<T> y;  // duals of the >= rows, size m
    std::uint64_t pivots = 0;
};

namespace detail {

inline bool lp_neg(double v) { return v < -1e-9; }
inline bool lp_pos(double v) { return v > 1e-9; }
inline bool lp_pivot_ok(double v) { return v > 1e-9; }
inline bool lp_neg(const mpq_class& v) { return sgn(v) < 0; }
inline bool lp_pos(const mpq_class& v) { return sgn(v) > 0; }
inline bool lp_pivot_ok(const mpq_class& v) { return sgn(v) > 0; }
inline bool lp_nonzero(double v) { return std::fabs(v) > 1e-12; }
inline bool lp_nonzero(const mpq_class& v) { return sgn(v) != 0; }

}  // namespace detail

template <class T>
class DenseSimplex {
public:
    DenseSimplex(int n) : n_(n) {}

    void add_row(const std::vector<std::pair<int, T>>& coeffs, const T& rhs) {
        rows_.push_back(coeffs);
        rhs_.push_back(rhs);
    }
    void set_objective(std::vector<T> c) { c_ = std::move(c); }
    int num_rows() const { return static_cast<int>(rows_.size()); }
    int num_cols() const { return n_; }

    LpResult<T> solve(std::uint64_t max_pivots = 2000000) {
        using namespace detail;
        const int m = num_rows();
        const int n = n_;
        N_ = n + 2 * m;  // structural, one aux per row, one artificial per row
        W_ = N_ + 1;     // last column is the rhs
        tab_.assign(static_cast<std::size_t>(m + 1) * W_, T(0));
        basis_.assign(m, -1);
        flipped_.assign(m, false);
        has_art_.assign(m, false);
        for (int i = 0; i < m; ++i) {
            bool flip = !lp_pos(rhs_[i]);  // rhs <= 0: negate, aux slack is basic
            flipped_[i] = flip;
            T sign = flip ? T(-1) : T(1);
            for (auto& [j, v] : rows_[i]) at(i, j) += sign * v;
            at(i, N_) = sign * rhs_[i];
            if (flip) {
                at(i, n + i) = T(1);
                basis_[i] = n + i;
            } else {
                at(i, n + i) = T(-1);
                at(i, n + m + i) = T(1);
                basis_[i] = n + m + i;
                has_art_[i] = true;
            }
        }
        LpResult<T> res;
        // phase 1
        for (int j = 0; j <= N_; ++j) at(m, j) = T(0);
        for (int i = 0; i < m; ++i)
            if (has_art_[i]) {
                for (int j = 0; j <= N_; ++j) at(m, j) -= at(i, j);
                at(m, n + m + i) += T(1);
            }
        allow_art_ = false;
        LpStatus st = run(res.pivots, max_pivots);
        if (st == LpStatus::IterationLimit) {
            res.status = st;
            return res;
        }
        if (lp_pos(-at(m, N_))) {
            res.status = LpStatus::Infeasible;
            return res;
        }
        // drive artificials out of the basis where possible
        for (int i = 0; i < m; ++i) {
            if (basis_[i] < n + m) continue;
            for (int j = 0; j < n + m; ++j)
                if (lp_nonzero(at(i, j))) {
                    pivot(i, j);
                    ++res.pivots;
                    break;
                }
        }
        // phase 2
        for (int j = 0; j <= N_; ++j) at(m, j) = T(0);
        for (int j = 0; j < n; ++j) at(m, j) = c_.size() > static_cast<std::size_t>(j) ? c_[j] : T(0);
        for (int i = 0; i < m; ++i) {
            int bj = basis_[i];
            T cb = bj < n && c_.size() > static_cast<std::size_t>(bj) ? c_[bj] : T(0);
            if (!lp_nonzero(cb)) continue;
            for (int j = 0; j <= N_; ++j) at(m, j) -= cb * at(i, j);
        }
        st = run(res.pivots, max_pivots);
        res.status = st;
        if (st != LpStatus::Optimal) return res;
        res.objective = -at(m, N_);
        res.x.assign(n, T(0));
        for (int i = 0; i < m; ++i)
            if (basis_[i] < n) res.x[basis_[i]] = at(i, N_);
        res.y.assign(m, T(0));
        for (int i = 0; i < m; ++i) {
            // reduced cost of the identity column e_i of row i
            T r = flipped_[i] ? at(m, n + i) : at(m, n + m + i);
            res.y[i] = flipped_[i] ? r : T(-r);
        }
        return res;
    }

private:
    T& at(int i, int j) { return tab_[static_cast<std::size_t>(i) * W_ + j]; }

    void pivot(int r, int c) {
        const int m = num_rows();
        T inv = T(1) / at(r, c);
        for (int j = 0; j <= N_; ++j) at(r, j) *= inv;
        at(r, c) = T(1);
        std::vector<int> nz;
        for (int j = 0; j <= N_; ++j)
            if (detail::lp_nonzero(at(r, j))) nz.push_back(j);
        for (int i = 0; i <= m; ++i) {
            if (i == r) continue;
            T f = at(i, c);
            if (!detail::lp_nonzero(f)) continue;
            for (int j : nz) at(i, j) -= f * at(r, j);
            at(i, c) = T(0);
        }
        basis_[r] = c;
    }

    LpStatus run(std::uint64_t& pivots, std::uint64_t max_pivots) {
        using namespace detail;
        const int m = num_rows();
        const int limit = allow_art_ ? N_ : n_ + m;
        int degenerate = 0;
        for (;;) {
            if (pivots >= max_pivots) return LpStatus::IterationLimit;
            bool bland = degenerate > 50;
            int c = -1;
            T best = T(0);
            for (int j = 0; j < limit; ++j) {
                const T& r = at(m, j);
                if (!lp_neg(r)) continue;
                if (bland) {
                    c = j;
                    break;
                }
                if (c < 0 || r < best) {
                    best = r;
                    c = j;
                }
            }
            if (c < 0) return LpStatus::Optimal;
            int r = -1;
            T ratio = T(0);
            for (int i = 0; i < m; ++i) {
                const T& a = at(i, c);
                if (!lp_pivot_ok(a)) continue;
                T q = at(i, N_) / a;
                if (r < 0 || q < ratio || (!(ratio < q) && basis_[i] < basis_[r])) {
                    r = i;
                    ratio = q;
                }
            }
            if (r < 0) return LpStatus::Unbounded;
            degenerate = lp_pos(ratio) ? 0 : degenerate + 1;
            pivot(r, c);
            ++pivots;
        }
    }

    int n_;
    int N_ = 0, W_ = 0;
    std::vector<std::vector<std::pair<int, T>>> rows_;
    std::vector<T> rhs_;
    std::vector<T> c_;
    std::vector<T> tab_;
    std::vector<int> basis_;
    std::vector<bool> flipped_, has_art_;
    bool allow_art_ = false;
};

}  // namespace phikit
