#include "xval/plan_polytope.hpp"

#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <limits>

namespace xval {

Eigen::VectorXd ConstraintSystem::pack(const TransportPlan& q) const {
    Eigen::VectorXd x(present.size());
    for (size_t t = 0; t < present.size(); ++t)
        x[t] = q(present[t] / l, present[t] % l);
    return x;
}

TransportPlan ConstraintSystem::unpack(const Eigen::VectorXd& x) const {
    TransportPlan q = TransportPlan::Zero(k, l);
    for (size_t t = 0; t < present.size(); ++t)
        q(present[t] / l, present[t] % l) = x[t];
    return q;
}

CompatibilityReport compatibility_check(const TransportPath& g, const TransportPlan& q,
                                        double eps) {
    RouteMatrix rm = route_matrix(g);
    if (q.rows() != rm.k || q.cols() != rm.l)
        throw Error("DimensionMismatch", "plan shape does not match boundary data");

    CompatibilityReport rep;
    for (int i = 0; i < rm.k; ++i)
        for (int j = 0; j < rm.l; ++j)
            if (!rm.at(i, j).present)
                rep.max_zero_violation = std::max(rep.max_zero_violation, std::abs(q(i, j)));

    for (size_t e = 0; e < g.edges.size(); ++e) {
        double flow = 0;
        for (int i = 0; i < rm.k; ++i)
            for (int j = 0; j < rm.l; ++j) {
                const Route& r = rm.at(i, j);
                if (r.present && std::find(r.edge_ids.begin(), r.edge_ids.end(),
                                           static_cast<int>(e)) != r.edge_ids.end())
                    flow += q(i, j);
            }
        rep.max_edge_residual = std::max(rep.max_edge_residual,
                                         std::abs(flow - g.edges[e].weight));
    }
    rep.compatible = rep.max_edge_residual <= eps && rep.max_zero_violation <= eps;
    return rep;
}

ConstraintSystem build_constraints(const TransportPath& g, const TransportPlan& qbar,
                                   std::optional<std::vector<double>> floors) {
    ConstraintSystem cs;
    cs.routes = route_matrix(g);
    cs.k = cs.routes.k;
    cs.l = cs.routes.l;
    if (qbar.rows() != cs.k || qbar.cols() != cs.l)
        throw Error("DimensionMismatch", "plan shape does not match boundary data");
    cs.qbar = qbar;

    for (int i = 0; i < cs.k; ++i)
        for (int j = 0; j < cs.l; ++j) {
            if (cs.routes.at(i, j).present)
                cs.present.push_back(i * cs.l + j);
            else {
                cs.zero_routes.push_back({i, j});
                if (std::abs(qbar(i, j)) > default_tolerances().balance)
                    throw Error("IncompatiblePair",
                                "reference plan has mass on an absent route");
            }
        }

    const int n = static_cast<int>(cs.present.size());
    const int m = static_cast<int>(g.edges.size());
    cs.A = Eigen::MatrixXd::Zero(m, n);
    cs.b = Eigen::VectorXd::Zero(m);
    for (int t = 0; t < n; ++t) {
        const Route& r = cs.routes.routes[cs.present[t]];
        for (int e : r.edge_ids) cs.A(e, t) = 1.0;
    }
    // right-hand sides recomputed from qbar, one equation per edge
    cs.b = cs.A * cs.pack(qbar);
    for (int e = 0; e < m; ++e)
        if (std::abs(cs.b[e] - g.edges[e].weight) > default_tolerances().balance)
            throw Error("IncompatiblePair", "edge equation fails at the reference plan");

    if (floors) cs.floors = *floors;
    return cs;
}

namespace {

int matrix_rank(const Eigen::MatrixXd& a, double eps_rel) {
    if (a.rows() == 0 || a.cols() == 0) return 0;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    lu.setThreshold(eps_rel);
    return static_cast<int>(lu.rank());
}

}  // namespace

int polytope_dimension_rank(const ConstraintSystem& cs) {
    return static_cast<int>(cs.present.size()) - matrix_rank(cs.A, default_tolerances().rank);
}

int polytope_dimension_formula(const TransportPath& g) {
    RouteMatrix rm = route_matrix(g);
    return rm.present_count() + euler_characteristic(g) - (rm.k + rm.l);
}

Eigen::MatrixXd affine_hull_basis(const ConstraintSystem& cs) {
    const int n = static_cast<int>(cs.present.size());
    if (n == 0) return Eigen::MatrixXd::Zero(0, 0);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(cs.A);
    lu.setThreshold(default_tolerances().rank);
    Eigen::MatrixXd kernel = lu.kernel();
    if (lu.dimensionOfKernel() == 0) return Eigen::MatrixXd::Zero(n, 0);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(kernel);
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, kernel.cols());
    return q;
}

bool interior_point_test(const ConstraintSystem& cs) {
    Eigen::MatrixXd z = affine_hull_basis(cs);
    if (z.cols() == 0) return true;  // zero-dimensional hull, vacuously interior
    const double eps = default_tolerances().interior;
    Eigen::VectorXd x = cs.pack(cs.qbar);
    if (x.size() > 0 && x.minCoeff() <= eps) return false;
    // two-sided slack along every basis direction
    for (int c = 0; c < z.cols(); ++c) {
        double step_pos = std::numeric_limits<double>::infinity();
        double step_neg = std::numeric_limits<double>::infinity();
        for (int t = 0; t < x.size(); ++t) {
            double d = z(t, c);
            if (d < -eps) step_pos = std::min(step_pos, -x[t] / d);
            if (d > eps) step_neg = std::min(step_neg, x[t] / d);
        }
        if (step_pos <= eps || step_neg <= eps) return false;
    }
    return true;
}

std::vector<Eigen::VectorXd> basic_feasible_points(const Eigen::MatrixXd& A,
                                                   const Eigen::VectorXd& b) {
    const int n = static_cast<int>(A.cols());
    const int r = matrix_rank(A, default_tolerances().rank);
    std::vector<Eigen::VectorXd> out;
    if (r == 0) {
        if (b.lpNorm<Eigen::Infinity>() <= 1e-8) out.push_back(Eigen::VectorXd::Zero(n));
        return out;
    }
    if (r > n) return out;

    std::vector<int> comb(r);
    for (int i = 0; i < r; ++i) comb[i] = i;
    auto advance = [&]() -> bool {
        int i = r - 1;
        while (i >= 0 && comb[i] == n - r + i) --i;
        if (i < 0) return false;
        ++comb[i];
        for (int m = i + 1; m < r; ++m) comb[m] = comb[m - 1] + 1;
        return true;
    };
    do {
        Eigen::MatrixXd basis(A.rows(), r);
        for (int i = 0; i < r; ++i) basis.col(i) = A.col(comb[i]);
        Eigen::VectorXd sol = basis.colPivHouseholderQr().solve(b);
        if ((basis * sol - b).lpNorm<Eigen::Infinity>() > 1e-8) continue;
        if (sol.size() > 0 && sol.minCoeff() < -1e-9) continue;
        Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
        for (int i = 0; i < r; ++i) x[comb[i]] = std::max(0.0, sol[i]);
        bool dup = false;
        for (const auto& v : out)
            if ((v - x).lpNorm<Eigen::Infinity>() <= 1e-8) { dup = true; break; }
        if (!dup) out.push_back(x);
    } while (advance());
    return out;
}

std::vector<TransportPlan> vertices(const ConstraintSystem& cs, int dmax) {
    const int n = static_cast<int>(cs.present.size());
    const int r = matrix_rank(cs.A, default_tolerances().rank);
    if (n - r > dmax)
        throw Error("DimensionTooLarge", "affine dimension exceeds the enumeration cap");

    std::vector<TransportPlan> out;
    for (const auto& x : basic_feasible_points(cs.A, cs.b)) out.push_back(cs.unpack(x));
    return out;
}

}  // namespace xval
