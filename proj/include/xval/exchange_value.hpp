#pragma once

#include <string>
#include <vector>

#include "xval/economy.hpp"
#include "xval/plan_polytope.hpp"

namespace xval {

enum class Uniqueness { Unique, NonUnique, Unknown };

struct ValuationResult {
    double value = 0;            // V(G), clamped to [0, inf)
    TransportPlan maximizer;     // q*
    int iterations = 0;
    double residual = 0;         // stationarity / duality-gap estimate
    Uniqueness uniqueness = Uniqueness::Unknown;
    std::string backend;         // "lp", "barrier" or "fixed"
    bool clamped = false;        // true when a tiny negative was clamped to 0
};

struct CriterionReport {
    enum class Conclusion { ZeroForced, PositiveGuaranteed, Inconclusive };
    std::string name;
    bool applies = false;
    Conclusion conclusion = Conclusion::Inconclusive;
    std::string detail;
};

/// S(q): sum over consumers of the least expenditure reaching u_j(q_j).
double total_expenditure(const Economy& economy, const TransportPlan& q);

/// Maximizes S over the feasible plans of G and returns V = max S - S(qbar).
/// Piecewise-linear utilities go through an LP; concave families through a
/// log-barrier interior-point method on the affine hull.
ValuationResult exchange_value(const Economy& economy, const TransportPath& g,
                               const TransportPlan& qbar,
                               const Tolerances& tol = default_tolerances());

/// Resolves the multiplicity of the maximizer set.
Uniqueness uniqueness_probe(const Economy& economy, const TransportPath& g,
                            const TransportPlan& qbar, const ValuationResult& result,
                            const Tolerances& tol = default_tolerances());

/// V = 0 whenever every consumer cares only about total quantity.
CriterionReport criterion_quantity_only(const Economy& economy);

/// V = 0 whenever all price vectors are positive multiples of the first
/// (covers k = 1 and l = 1).
CriterionReport criterion_collinear_prices(const Economy& economy,
                                           double eps_rel = 1e-9);

/// F_G = {qbar} (hence V = 0) when cross routes are pairwise vertex-disjoint.
CriterionReport criterion_disjoint_routes(const TransportPath& g);

/// Sufficient conditions for V > 0: interior qbar on a positive-dimensional
/// polytope with strictly concave root utilities, or an overlapping cross
/// pair with the price inequalities.
CriterionReport criterion_positive(const Economy& economy, const TransportPath& g,
                                   const TransportPlan& qbar);

}  // namespace xval
