#include "xval/lp.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "xval/common.hpp"

namespace xval {

namespace {

// Revised dense simplex over an explicit tableau.  Bland's rule throughout,
// so it terminates on degenerate transport polytopes.
struct Tableau {
    int m, n;                 // constraints, total variables
    Eigen::MatrixXd t;        // m x (n+1), last column = rhs
    Eigen::VectorXd obj;      // length n+1, reduced objective row (maximize)
    std::vector<int> basis;   // basic variable per row

    void pivot(int row, int col) {
        t.row(row) /= t(row, col);
        for (int r = 0; r < m; ++r)
            if (r != row && t(r, col) != 0.0) t.row(r) -= t(r, col) * t.row(row);
        if (obj[col] != 0.0) obj -= obj[col] * t.row(row).transpose();
        basis[row] = col;
    }

    // true when optimal, false when a pivot was made
    bool step(double eps, bool* unbounded) {
        int col = -1;
        for (int j = 0; j < n; ++j)
            if (obj[j] > eps) { col = j; break; }  // Bland: lowest index
        if (col < 0) return true;
        int row = -1;
        double best = std::numeric_limits<double>::infinity();
        for (int r = 0; r < m; ++r) {
            if (t(r, col) > eps) {
                double ratio = t(r, n) / t(r, col);
                if (ratio < best - eps || (ratio < best + eps &&
                                           (row < 0 || basis[r] < basis[row]))) {
                    best = ratio;
                    row = r;
                }
            }
        }
        if (row < 0) { *unbounded = true; return true; }
        pivot(row, col);
        return false;
    }
};

}  // namespace

LpResult solve_lp_max(const Eigen::VectorXd& c, const Eigen::MatrixXd& A,
                      const Eigen::VectorXd& b, double eps) {
    const int m = static_cast<int>(A.rows());
    const int n = static_cast<int>(A.cols());
    LpResult res;

    Tableau tab;
    tab.m = m;
    tab.n = n + m;  // artificials appended
    tab.t = Eigen::MatrixXd::Zero(m, tab.n + 1);
    tab.basis.resize(m);
    for (int r = 0; r < m; ++r) {
        double sign = b[r] < 0 ? -1.0 : 1.0;
        tab.t.row(r).head(n) = sign * A.row(r);
        tab.t(r, n + r) = 1.0;
        tab.t(r, tab.n) = sign * b[r];
        tab.basis[r] = n + r;
    }

    // phase 1: maximize -sum(artificials).  With rows summed into the
    // objective, f = sum_j obj_j x_j - obj_rhs, so optimality at obj_rhs > 0
    // means some artificial stayed positive.
    tab.obj = Eigen::VectorXd::Zero(tab.n + 1);
    for (int r = 0; r < m; ++r) tab.obj += tab.t.row(r).transpose();
    for (int r = 0; r < m; ++r) tab.obj[n + r] = 0.0;
    bool unbounded = false;
    int iters = 0;
    while (!tab.step(eps, &unbounded)) {
        if (++iters > 100000) throw Error("SolverStall", "simplex phase 1 iteration cap");
    }
    if (tab.obj[tab.n] > 1e-7)
        throw Error("InfeasibleProgram", "linear program has no feasible point");

    // drive lingering artificials out of the basis, or drop redundant rows
    for (int r = 0; r < m; ++r) {
        if (tab.basis[r] < n) continue;
        int col = -1;
        for (int j = 0; j < n; ++j)
            if (std::abs(tab.t(r, j)) > 1e-9) { col = j; break; }
        if (col >= 0)
            tab.pivot(r, col);
        else
            tab.t.row(r).setZero();  // redundant constraint
    }

    // phase 2 on the real objective, artificials frozen
    tab.obj = Eigen::VectorXd::Zero(tab.n + 1);
    tab.obj.head(n) = c;
    for (int r = 0; r < m; ++r)
        if (tab.basis[r] < n && tab.obj[tab.basis[r]] != 0.0)
            tab.obj -= tab.obj[tab.basis[r]] * tab.t.row(r).transpose();
    // forbid re-entering artificials
    auto phase2_step = [&]() -> bool {
        int col = -1;
        for (int j = 0; j < n; ++j)
            if (tab.obj[j] > eps) { col = j; break; }
        if (col < 0) return true;
        int row = -1;
        double best = std::numeric_limits<double>::infinity();
        for (int r = 0; r < m; ++r) {
            if (tab.t(r, col) > eps) {
                double ratio = tab.t(r, tab.n) / tab.t(r, col);
                if (ratio < best - eps || (ratio < best + eps &&
                                           (row < 0 || tab.basis[r] < tab.basis[row]))) {
                    best = ratio;
                    row = r;
                }
            }
        }
        if (row < 0) { unbounded = true; return true; }
        tab.pivot(row, col);
        return false;
    };
    while (!phase2_step()) {
        if (++iters > 100000) throw Error("SolverStall", "simplex phase 2 iteration cap");
    }
    if (unbounded) throw Error("UnboundedProgram", "objective unbounded over the polytope");

    res.x = Eigen::VectorXd::Zero(n);
    for (int r = 0; r < m; ++r)
        if (tab.basis[r] < n) res.x[tab.basis[r]] = tab.t(r, tab.n);
    res.value = c.dot(res.x);
    res.optimal = true;
    res.iterations = iters;
    return res;
}

}  // namespace xval
