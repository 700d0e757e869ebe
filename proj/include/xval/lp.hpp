#pragma once

#include <Eigen/Dense>

namespace xval {

struct LpResult {
    bool optimal = false;
    double value = 0;
    Eigen::VectorXd x;
    int iterations = 0;
};

/// Dense two-phase simplex with Bland's rule for
///   max c'x  s.t.  A x = b,  x >= 0.
/// The feasible region is assumed bounded (as it is for transport plans).
LpResult solve_lp_max(const Eigen::VectorXd& c, const Eigen::MatrixXd& A,
                      const Eigen::VectorXd& b, double eps = 1e-11);

}  // namespace xval
