#pragma once

#include <vector>

#include "bell/rational.hpp"

namespace bell::lp {

// maximize c.x subject to A x = b, x >= 0 (dense, row-major A).
template <class T>
struct LpProblem {
    int rows = 0, cols = 0;
    std::vector<T> a;
    std::vector<T> b;
    std::vector<T> c;

    T& at(int r, int col) { return a[static_cast<std::size_t>(r) * cols + col]; }
    const T& at(int r, int col) const { return a[static_cast<std::size_t>(r) * cols + col]; }
};

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

template <class T>
struct LpSolution {
    LpStatus status = LpStatus::IterationLimit;
    T objective{};
    std::vector<T> x;  // primal values (cols)
    // Row multipliers. At an optimum these are the duals; on infeasibility
    // they form a Farkas certificate: y.A <= 0 componentwise and y.b > 0.
    std::vector<T> y;
    long iterations = 0;
};

struct LpOptions {
    double tol = 1e-9;         // float backend only; rational arithmetic is exact
    long max_iters = 1000000;
    int pricing_block = 256;   // float partial-pricing window
};

// Two-phase revised primal simplex. Redundant equality rows are detected and
// dropped by exact (or thresholded) Gaussian elimination first; inconsistent
// rows short-circuit to Infeasible with the eliminating combination as the
// certificate. Rational backend prices with Bland's rule (termination
// guarantee); float backend uses partial pricing with a Bland fallback after
// degenerate stalls. Ties in the ratio test go to the lowest variable index.
template <class T>
LpSolution<T> solve_lp(const LpProblem<T>& prob, const LpOptions& opts = {});

extern template LpSolution<Rat> solve_lp<Rat>(const LpProblem<Rat>&, const LpOptions&);
extern template LpSolution<double> solve_lp<double>(const LpProblem<double>&, const LpOptions&);

}  // namespace bell::lp
