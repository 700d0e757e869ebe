#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "xval/common.hpp"
#include "xval/measure.hpp"

namespace xval {

enum class UtilityFamily { Linear, CobbDouglas, CES, QuantityOnly };

enum class QuantityMap { Identity, Power };

/// Concave, nondecreasing utility on the nonnegative orthant, one of four
/// parametric families.  Linear, CobbDouglas and CES are homogeneous of
/// degree 1, sum(tau) and beta respectively; QuantityOnly applies a strictly
/// increasing scalar map to the total quantity.
struct UtilityFn {
    UtilityFamily family = UtilityFamily::Linear;
    // Linear: coefficients c_i >= 0, not all zero.
    // CobbDouglas: exponents tau_i > 0.
    // CES: weights gamma_i > 0.
    Eigen::VectorXd coef;
    double ces_tau = 0.5;  // CES exponent, in (0,1)
    double ces_beta = 1.0; // CES degree, > 0
    QuantityMap qmap = QuantityMap::Identity;
    double qmap_exponent = 1.0; // Power map exponent, in (0,1]

    double value(const Eigen::VectorXd& q) const;
    /// Declared homogeneity degree (QuantityOnly: the map's exponent).
    double degree() const;
    /// value(q)^(1/degree): concave, homogeneous of degree 1.
    double root_value(const Eigen::VectorXd& q) const;
    Eigen::VectorXd root_gradient(const Eigen::VectorXd& q) const;
    Eigen::MatrixXd root_hessian(const Eigen::VectorXd& q) const;

    void validate(int goods, const std::string& where) const;
};

struct Good {
    std::string id;
    Eigen::VectorXd location;
};

struct Consumer {
    std::string id;
    Eigen::VectorXd location;
    double wealth = 0;
    Eigen::VectorXd prices; // strictly positive, money per unit of each good
    UtilityFn utility;
};

/// Spatial economy: k goods at source locations, l consumers with wealth,
/// per-consumer prices and preferences.
struct Economy {
    int dimension = 2;
    std::vector<Good> goods;
    std::vector<Consumer> consumers;

    int k() const { return static_cast<int>(goods.size()); }
    int l() const { return static_cast<int>(consumers.size()); }
    void validate() const;
};

/// Aggregate demand normalized to unit total mass, with the post-rescaling
/// utility floors and the induced boundary measures.
struct DemandProfile {
    Eigen::MatrixXd qbar;            // k x l, column j = consumer j's bundle
    std::vector<double> floors;      // u_j evaluated on the normalized bundle
    AtomicMeasure source;            // a, masses m_i = row sums
    AtomicMeasure consumer;          // b, masses n_j = column sums
    double scale = 1.0;              // raw total mass before normalization
};

/// Utility-maximizing bundle of consumer j at their prices and wealth.
Eigen::VectorXd demand(const Economy& economy, int j);

/// Hicksian expenditure: least money reaching utility level at prices p.
double expenditure(const UtilityFn& u, const Eigen::VectorXd& p, double level);

/// Solves every consumer's problem, normalizes total mass to one and
/// assembles the boundary measures.
DemandProfile demand_profile(const Economy& economy);

}  // namespace xval
