#include "bell/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bell::lp {

namespace {

template <class T>
struct Num;

template <>
struct Num<Rat> {
    static constexpr bool exact = true;
    static bool pos(const Rat& v, double) { return v > 0; }
    static bool neg(const Rat& v, double) { return v < 0; }
    static bool nonzero(const Rat& v, double) { return v != 0; }
};

template <>
struct Num<double> {
    static constexpr bool exact = false;
    static bool pos(double v, double tol) { return v > tol; }
    static bool neg(double v, double tol) { return v < -tol; }
    static bool nonzero(double v, double tol) { return std::abs(v) > tol; }
};

// Gaussian elimination on a copy of (A|b) with multiplier tracking. Fills
// `kept` with a maximal independent subset of row indices. Returns false on
// an inconsistent dependent row, with `farkas` the eliminating combination
// over original rows (farkas.A = 0, farkas.b != 0, sign-fixed positive).
template <class T>
bool select_rows(const LpProblem<T>& prob, double tol, std::vector<int>& kept, std::vector<T>& farkas) {
    int m = prob.rows, n = prob.cols;
    std::vector<std::vector<T>> w(m);
    std::vector<std::vector<T>> mult(m);
    for (int i = 0; i < m; ++i) {
        w[i].assign(prob.a.begin() + static_cast<std::size_t>(i) * n, prob.a.begin() + static_cast<std::size_t>(i + 1) * n);
        w[i].push_back(prob.b[i]);
        mult[i].assign(m, T(0));
        mult[i][i] = T(1);
    }
    std::vector<bool> used(m, false);
    kept.clear();
    for (int col = 0; col < n; ++col) {
        int pivot = -1;
        if constexpr (Num<T>::exact) {
            for (int i = 0; i < m; ++i)
                if (!used[i] && w[i][col] != 0) {
                    pivot = i;
                    break;
                }
        } else {
            double best = tol;
            for (int i = 0; i < m; ++i)
                if (!used[i] && std::abs(w[i][col]) > best) {
                    best = std::abs(w[i][col]);
                    pivot = i;
                }
        }
        if (pivot < 0) continue;
        used[pivot] = true;
        kept.push_back(pivot);
        for (int i = 0; i < m; ++i) {
            if (used[i] || !Num<T>::nonzero(w[i][col], tol)) continue;
            T f = w[i][col] / w[pivot][col];
            for (int j = col; j <= n; ++j) w[i][j] -= f * w[pivot][j];
            w[i][col] = T(0);
            for (int j = 0; j < m; ++j) mult[i][j] -= f * mult[pivot][j];
        }
    }
    for (int i = 0; i < m; ++i) {
        if (used[i]) continue;
        if (Num<T>::nonzero(w[i][n], tol)) {
            farkas = mult[i];
            if (Num<T>::neg(w[i][n], tol))
                for (auto& v : farkas) v = -v;
            return false;
        }
    }
    std::sort(kept.begin(), kept.end());
    return true;
}

template <class T>
class Simplex {
  public:
    Simplex(const LpProblem<T>& prob, std::vector<int> rows, const LpOptions& opts)
        : prob_(prob), rows_(std::move(rows)), opts_(opts), r_(static_cast<int>(rows_.size())), n_(prob.cols) {
        sign_.assign(r_, T(1));
        xb_.assign(r_, T(0));
        for (int i = 0; i < r_; ++i) {
            T bi = prob_.b[rows_[i]];
            if (Num<T>::neg(bi, 0)) {
                sign_[i] = T(-1);
                bi = -bi;
            }
            xb_[i] = bi;
        }
        binv_.assign(static_cast<std::size_t>(r_) * r_, T(0));
        for (int i = 0; i < r_; ++i) binv_[static_cast<std::size_t>(i) * r_ + i] = T(1);
        basis_.resize(r_);
        for (int i = 0; i < r_; ++i) basis_[i] = n_ + i;  // artificials
    }

    LpSolution<T> run() {
        LpSolution<T> sol;
        phase_ = 1;
        LpStatus st = iterate();
        if (st != LpStatus::Optimal) return finish_limit(sol, st);
        T ph1 = phase1_objective();
        if (Num<T>::neg(ph1, opts_.tol)) {
            sol.status = LpStatus::Infeasible;
            std::vector<T> y = dual();
            sol.y.assign(prob_.rows, T(0));
            for (int i = 0; i < r_; ++i) sol.y[rows_[i]] = -y[i] * sign_[i];
            sol.iterations = iters_;
            return sol;
        }
        drive_out_artificials();
        phase_ = 2;
        st = iterate();
        if (st != LpStatus::Optimal) return finish_limit(sol, st);
        sol.status = LpStatus::Optimal;
        sol.x.assign(n_, T(0));
        for (int i = 0; i < r_; ++i)
            if (basis_[i] < n_) sol.x[basis_[i]] = xb_[i];
        sol.objective = T(0);
        for (int j = 0; j < n_; ++j)
            if (Num<T>::nonzero(sol.x[j], 0)) sol.objective += prob_.c[j] * sol.x[j];
        std::vector<T> y = dual();
        sol.y.assign(prob_.rows, T(0));
        for (int i = 0; i < r_; ++i) sol.y[rows_[i]] = y[i] * sign_[i];
        sol.iterations = iters_;
        return sol;
    }

  private:
    const LpProblem<T>& prob_;
    std::vector<int> rows_;
    LpOptions opts_;
    int r_, n_;
    int phase_ = 1;
    std::vector<T> sign_, xb_, binv_;
    std::vector<int> basis_;
    long iters_ = 0;
    int block_start_ = 0;
    long stall_ = 0;
    bool bland_mode_ = false;

    T cost_of(int var) const {
        if (var >= n_) return phase_ == 1 ? T(-1) : T(0);
        return phase_ == 1 ? T(0) : prob_.c[var];
    }

    // Column `var` of the (sign-fixed) constraint matrix at row position i.
    T a_at(int i, int var) const {
        if (var >= n_) return var - n_ == i ? T(1) : T(0);
        return sign_[i] * prob_.at(rows_[i], var);
    }

    std::vector<T> dual() const {
        std::vector<T> y(r_, T(0));
        for (int i = 0; i < r_; ++i) {
            T cb = cost_of(basis_[i]);
            if (!Num<T>::nonzero(cb, 0)) continue;
            const T* row = &binv_[static_cast<std::size_t>(i) * r_];
            for (int k = 0; k < r_; ++k) y[k] += cb * row[k];
        }
        return y;
    }

    T phase1_objective() const {
        T obj(0);
        for (int i = 0; i < r_; ++i)
            if (basis_[i] >= n_) obj -= xb_[i];
        return obj;
    }

    T reduced_cost(const std::vector<T>& y, int j) const {
        T rc = cost_of(j);
        for (int i = 0; i < r_; ++i) {
            const T& aij = prob_.at(rows_[i], j);
            if (Num<T>::nonzero(aij, 0)) rc -= y[i] * sign_[i] * aij;
        }
        return rc;
    }

    int price(const std::vector<T>& y) {
        if constexpr (Num<T>::exact) {
            for (int j = 0; j < n_; ++j)
                if (Num<T>::pos(reduced_cost(y, j), 0)) return j;
            return -1;
        } else {
            if (bland_mode_) {
                for (int j = 0; j < n_; ++j)
                    if (Num<T>::pos(reduced_cost(y, j), opts_.tol)) return j;
                return -1;
            }
            int block = std::max(1, opts_.pricing_block);
            int scanned = 0;
            int start = block_start_;
            while (scanned < n_) {
                int best = -1;
                T best_rc{};
                int end = std::min(n_, start + block);
                for (int j = start; j < end; ++j) {
                    T rc = reduced_cost(y, j);
                    if (Num<T>::pos(rc, opts_.tol) && (best < 0 || rc > best_rc)) {
                        best = j;
                        best_rc = rc;
                    }
                }
                if (best >= 0) {
                    block_start_ = start;
                    return best;
                }
                scanned += end - start;
                start = end < n_ ? end : 0;
            }
            return -1;
        }
    }

    // Rebuilds binv_ and xb_ from the current basis columns, shedding the
    // error accumulated by the rank-one pivot updates. Float backend only.
    // Returns false (state untouched) if the basis matrix is numerically
    // singular.
    bool refactor() {
        if constexpr (Num<T>::exact) {
            return true;
        } else {
            std::vector<T> m(static_cast<std::size_t>(r_) * r_), inv(static_cast<std::size_t>(r_) * r_, T(0)),
                rhs(r_);
            for (int i = 0; i < r_; ++i) {
                for (int k = 0; k < r_; ++k) m[static_cast<std::size_t>(i) * r_ + k] = a_at(i, basis_[k]);
                inv[static_cast<std::size_t>(i) * r_ + i] = T(1);
                T bi = prob_.b[rows_[i]];
                rhs[i] = sign_[i] < 0 ? -bi : bi;
            }
            auto swap_rows = [&](int a, int b) {
                if (a == b) return;
                for (int k = 0; k < r_; ++k) {
                    std::swap(m[static_cast<std::size_t>(a) * r_ + k], m[static_cast<std::size_t>(b) * r_ + k]);
                    std::swap(inv[static_cast<std::size_t>(a) * r_ + k], inv[static_cast<std::size_t>(b) * r_ + k]);
                }
                std::swap(rhs[a], rhs[b]);
            };
            for (int col = 0; col < r_; ++col) {
                int piv = -1;
                double best = 1e-11;
                for (int i = col; i < r_; ++i) {
                    double v = std::abs(m[static_cast<std::size_t>(i) * r_ + col]);
                    if (v > best) {
                        best = v;
                        piv = i;
                    }
                }
                if (piv < 0) return false;
                swap_rows(piv, col);
                T p = m[static_cast<std::size_t>(col) * r_ + col];
                for (int k = 0; k < r_; ++k) {
                    m[static_cast<std::size_t>(col) * r_ + k] /= p;
                    inv[static_cast<std::size_t>(col) * r_ + k] /= p;
                }
                rhs[col] /= p;
                for (int i = 0; i < r_; ++i) {
                    T f = m[static_cast<std::size_t>(i) * r_ + col];
                    if (i == col || !Num<T>::nonzero(f, 0)) continue;
                    for (int k = 0; k < r_; ++k) {
                        m[static_cast<std::size_t>(i) * r_ + k] -= f * m[static_cast<std::size_t>(col) * r_ + k];
                        inv[static_cast<std::size_t>(i) * r_ + k] -= f * inv[static_cast<std::size_t>(col) * r_ + k];
                    }
                    rhs[i] -= f * rhs[col];
                }
            }
            binv_ = std::move(inv);
            for (int i = 0; i < r_; ++i) xb_[i] = rhs[i] < 0 ? T(0) : rhs[i];
            return true;
        }
    }

    LpStatus iterate() {
        long since_refactor = 0;
        bool refreshed = false;
        while (true) {
            if (++iters_ > opts_.max_iters) return LpStatus::IterationLimit;
            if constexpr (!Num<T>::exact) {
                if (!refreshed && since_refactor >= 500) {
                    refactor();
                    since_refactor = 0;
                    refreshed = true;
                }
            }
            std::vector<T> y = dual();
            int enter = price(y);
            if (enter < 0) {
                // Reprice with freshly computed factors before accepting
                // optimality; stale ones can hide or invent reduced costs.
                if constexpr (!Num<T>::exact) {
                    if (!refreshed && refactor()) {
                        since_refactor = 0;
                        refreshed = true;
                        continue;
                    }
                }
                return LpStatus::Optimal;
            }
            // direction d = Binv * A_enter
            std::vector<T> d(r_, T(0));
            for (int k = 0; k < r_; ++k) {
                T ak = a_at(k, enter);
                if (!Num<T>::nonzero(ak, 0)) continue;
                for (int i = 0; i < r_; ++i) d[i] += binv_[static_cast<std::size_t>(i) * r_ + k] * ak;
            }
            int leave = -1;
            T best_ratio{};
            if constexpr (Num<T>::exact) {
                for (int i = 0; i < r_; ++i) {
                    if (!(d[i] > 0)) continue;
                    T ratio = xb_[i] / d[i];
                    if (leave < 0 || ratio < best_ratio || (ratio == best_ratio && basis_[i] < basis_[leave])) {
                        leave = i;
                        best_ratio = ratio;
                    }
                }
            } else {
                // Two-pass ratio test: find the minimum ratio over safely
                // nonzero pivots, then take the largest pivot element within
                // an absolute window of it (lowest basis label in Bland mode).
                double piv_tol = std::max(opts_.tol, 1e-7);
                for (int attempt = 0; attempt < 2 && leave < 0; ++attempt) {
                    double min_ratio = 0;
                    bool any = false;
                    for (int i = 0; i < r_; ++i) {
                        if (!(static_cast<double>(d[i]) > piv_tol)) continue;
                        double ratio = static_cast<double>(xb_[i]) / static_cast<double>(d[i]);
                        if (!any || ratio < min_ratio) {
                            min_ratio = ratio;
                            any = true;
                        }
                    }
                    if (!any) {
                        piv_tol = opts_.tol;
                        continue;
                    }
                    double window = min_ratio + 1e-9;
                    double best_piv = 0;
                    for (int i = 0; i < r_; ++i) {
                        if (!(static_cast<double>(d[i]) > piv_tol)) continue;
                        double ratio = static_cast<double>(xb_[i]) / static_cast<double>(d[i]);
                        if (ratio > window) continue;
                        bool better = bland_mode_ ? (leave < 0 || basis_[i] < basis_[leave])
                                                  : (static_cast<double>(d[i]) > best_piv ||
                                                     (static_cast<double>(d[i]) == best_piv && leave >= 0 &&
                                                      basis_[i] < basis_[leave]));
                        if (better) {
                            leave = i;
                            best_piv = static_cast<double>(d[i]);
                        }
                    }
                    if (leave >= 0) best_ratio = xb_[leave] / d[leave];
                }
                if (leave < 0 && !refreshed && refactor()) {
                    since_refactor = 0;
                    refreshed = true;
                    continue;
                }
            }
            if (leave < 0) return LpStatus::Unbounded;
            if constexpr (!Num<T>::exact) {
                if (std::abs(static_cast<double>(best_ratio)) < 1e-13) {
                    if (++stall_ > 200 && !bland_mode_) {
                        bland_mode_ = true;
                        if (refactor()) {
                            since_refactor = 0;
                            refreshed = true;
                            continue;
                        }
                    }
                } else {
                    stall_ = 0;
                    bland_mode_ = false;
                }
            }
            pivot(leave, enter, d);
            refreshed = false;
            ++since_refactor;
        }
    }

    void pivot(int leave, int enter, const std::vector<T>& d) {
        T piv = d[leave];
        T* prow = &binv_[static_cast<std::size_t>(leave) * r_];
        for (int k = 0; k < r_; ++k) prow[k] /= piv;
        xb_[leave] /= piv;
        for (int i = 0; i < r_; ++i) {
            if (i == leave || !Num<T>::nonzero(d[i], 0)) continue;
            T* row = &binv_[static_cast<std::size_t>(i) * r_];
            const T& f = d[i];
            for (int k = 0; k < r_; ++k) row[k] -= f * prow[k];
            xb_[i] -= f * xb_[leave];
            if (Num<T>::neg(xb_[i], 0) && !Num<T>::exact) xb_[i] = T(0);
        }
        basis_[leave] = enter;
    }

    void drive_out_artificials() {
        for (int p = 0; p < r_; ++p) {
            if (basis_[p] < n_) continue;
            int enter = -1;
            T piv_val{};
            for (int j = 0; j < n_ && enter < 0; ++j) {
                // (Binv * A_j) at row p
                T v(0);
                for (int k = 0; k < r_; ++k) {
                    T ak = a_at(k, j);
                    if (Num<T>::nonzero(ak, 0)) v += binv_[static_cast<std::size_t>(p) * r_ + k] * ak;
                }
                if (Num<T>::nonzero(v, opts_.tol)) {
                    enter = j;
                    piv_val = v;
                }
            }
            if (enter < 0) {
                if constexpr (Num<T>::exact)
                    throw std::logic_error("simplex: undrivable artificial on independent rows");
                continue;  // numerically null row; artificial stays basic at zero
            }
            std::vector<T> d(r_, T(0));
            for (int k = 0; k < r_; ++k) {
                T ak = a_at(k, enter);
                if (!Num<T>::nonzero(ak, 0)) continue;
                for (int i = 0; i < r_; ++i) d[i] += binv_[static_cast<std::size_t>(i) * r_ + k] * ak;
            }
            pivot(p, enter, d);
        }
    }

    LpSolution<T> finish_limit(LpSolution<T>& sol, LpStatus st) {
        sol.status = st;
        sol.iterations = iters_;
        return sol;
    }
};

}  // namespace

template <class T>
LpSolution<T> solve_lp(const LpProblem<T>& prob, const LpOptions& opts) {
    if (prob.rows <= 0 || prob.cols <= 0) throw std::invalid_argument("solve_lp: empty problem");
    std::vector<int> kept;
    std::vector<T> farkas;
    if (!select_rows(prob, opts.tol, kept, farkas)) {
        LpSolution<T> sol;
        sol.status = LpStatus::Infeasible;
        sol.y = std::move(farkas);
        return sol;
    }
    Simplex<T> engine(prob, std::move(kept), opts);
    return engine.run();
}

template LpSolution<Rat> solve_lp<Rat>(const LpProblem<Rat>&, const LpOptions&);
template LpSolution<double> solve_lp<double>(const LpProblem<double>&, const LpOptions&);

}  // namespace bell::lp
