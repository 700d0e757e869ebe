#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "xval/common.hpp"
#include "xval/transport_graph.hpp"

namespace xval {

/// k x l nonnegative matrix with prescribed marginals.
using TransportPlan = Eigen::MatrixXd;

/// Linear system defining the compatibility polytope K(qbar, G): zero
/// constraints on absent routes, one edge equation per edge over the present
/// route variables, nonnegativity, plus optional utility floors.
struct ConstraintSystem {
    int k = 0, l = 0;
    RouteMatrix routes;
    std::vector<int> present;          // flattened (i*l+j) indices of present routes
    std::vector<std::pair<int, int>> zero_routes;
    Eigen::MatrixXd A;                 // edges x present-route incidence (0/1)
    Eigen::VectorXd b;                 // w(e) recomputed from qbar
    TransportPlan qbar;
    std::vector<double> floors;        // empty when floors are not imposed

    /// Present-route entries of a plan, in `present` order.
    Eigen::VectorXd pack(const TransportPlan& q) const;
    TransportPlan unpack(const Eigen::VectorXd& x) const;
};

struct CompatibilityReport {
    bool compatible = false;
    double max_edge_residual = 0;
    double max_zero_violation = 0;
};

/// True iff q vanishes on absent routes and every edge equation holds.
CompatibilityReport compatibility_check(const TransportPath& g, const TransportPlan& q,
                                        double eps = default_tolerances().balance);

/// Builds the constraint system with right-hand sides recomputed from qbar.
/// Throws IncompatiblePair when qbar violates an edge equation.
ConstraintSystem build_constraints(const TransportPath& g, const TransportPlan& qbar,
                                   std::optional<std::vector<double>> floors = std::nullopt);

/// Affine dimension of K(qbar, G): #variables minus rank of the edge
/// equations (zero-route variables are already eliminated).
int polytope_dimension_rank(const ConstraintSystem& cs);

/// N(G) + chi(G) - (k + l).
int polytope_dimension_formula(const TransportPath& g);

/// True iff qbar lies in the relative interior of K(qbar, G) within the
/// nonnegative orthant.
bool interior_point_test(const ConstraintSystem& cs);

/// Orthonormal basis of the affine hull directions (kernel of A), columns.
Eigen::MatrixXd affine_hull_basis(const ConstraintSystem& cs);

/// Vertex enumeration of K(qbar, G) within the nonnegative orthant by basis
/// enumeration.  Throws DimensionTooLarge when the affine dimension exceeds
/// dmax.
std::vector<TransportPlan> vertices(const ConstraintSystem& cs, int dmax = 6);

/// Basic feasible solutions of { A x = b, x >= 0 }, deduplicated.
std::vector<Eigen::VectorXd> basic_feasible_points(const Eigen::MatrixXd& A,
                                                   const Eigen::VectorXd& b);

}  // namespace xval
