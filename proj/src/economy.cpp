#include "xval/economy.hpp"

#include <cmath>
#include <limits>

namespace xval {

namespace {

double quantity_map_value(QuantityMap m, double exponent, double s) {
    switch (m) {
        case QuantityMap::Identity: return s;
        case QuantityMap::Power: return std::pow(s, exponent);
    }
    return s;
}

double quantity_map_inverse(QuantityMap m, double exponent, double v) {
    switch (m) {
        case QuantityMap::Identity: return v;
        case QuantityMap::Power: return std::pow(v, 1.0 / exponent);
    }
    return v;
}

}  // namespace

double UtilityFn::value(const Eigen::VectorXd& q) const {
    switch (family) {
        case UtilityFamily::Linear:
            return coef.dot(q);
        case UtilityFamily::CobbDouglas: {
            double v = 1;
            for (int i = 0; i < q.size(); ++i) v *= std::pow(q[i], coef[i]);
            return v;
        }
        case UtilityFamily::CES: {
            double s = 0;
            for (int i = 0; i < q.size(); ++i) s += coef[i] * std::pow(q[i], ces_tau);
            return std::pow(s, ces_beta / ces_tau);
        }
        case UtilityFamily::QuantityOnly:
            return quantity_map_value(qmap, qmap_exponent, q.sum());
    }
    return 0;
}

double UtilityFn::degree() const {
    switch (family) {
        case UtilityFamily::Linear: return 1.0;
        case UtilityFamily::CobbDouglas: return coef.sum();
        case UtilityFamily::CES: return ces_beta;
        case UtilityFamily::QuantityOnly:
            return qmap == QuantityMap::Identity ? 1.0 : qmap_exponent;
    }
    return 1.0;
}

double UtilityFn::root_value(const Eigen::VectorXd& q) const {
    switch (family) {
        case UtilityFamily::Linear:
            return coef.dot(q);
        case UtilityFamily::CobbDouglas: {
            double total = coef.sum();
            double v = 1;
            for (int i = 0; i < q.size(); ++i) v *= std::pow(q[i], coef[i] / total);
            return v;
        }
        case UtilityFamily::CES: {
            double s = 0;
            for (int i = 0; i < q.size(); ++i) s += coef[i] * std::pow(q[i], ces_tau);
            return std::pow(s, 1.0 / ces_tau);
        }
        case UtilityFamily::QuantityOnly:
            return q.sum();
    }
    return 0;
}

Eigen::VectorXd UtilityFn::root_gradient(const Eigen::VectorXd& q) const {
    const int n = static_cast<int>(q.size());
    Eigen::VectorXd g(n);
    switch (family) {
        case UtilityFamily::Linear:
            return coef;
        case UtilityFamily::CobbDouglas: {
            double total = coef.sum();
            double phi = root_value(q);
            for (int i = 0; i < n; ++i) g[i] = phi * (coef[i] / total) / q[i];
            return g;
        }
        case UtilityFamily::CES: {
            double v = root_value(q);
            for (int i = 0; i < n; ++i)
                g[i] = std::pow(v, 1.0 - ces_tau) * coef[i] * std::pow(q[i], ces_tau - 1.0);
            return g;
        }
        case UtilityFamily::QuantityOnly:
            return Eigen::VectorXd::Ones(n);
    }
    return g;
}

Eigen::MatrixXd UtilityFn::root_hessian(const Eigen::VectorXd& q) const {
    const int n = static_cast<int>(q.size());
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
    switch (family) {
        case UtilityFamily::Linear:
        case UtilityFamily::QuantityOnly:
            return h;
        case UtilityFamily::CobbDouglas: {
            double total = coef.sum();
            double phi = root_value(q);
            for (int i = 0; i < n; ++i) {
                double ai = coef[i] / total;
                for (int m = 0; m < n; ++m) {
                    double am = coef[m] / total;
                    h(i, m) = phi * ai * am / (q[i] * q[m]);
                }
                h(i, i) -= phi * ai / (q[i] * q[i]);
            }
            return h;
        }
        case UtilityFamily::CES: {
            double v = root_value(q);
            Eigen::VectorXd d(n);
            for (int i = 0; i < n; ++i) d[i] = coef[i] * std::pow(q[i], ces_tau - 1.0);
            h = (1.0 - ces_tau) * std::pow(v, 1.0 - 2.0 * ces_tau) * d * d.transpose();
            for (int i = 0; i < n; ++i)
                h(i, i) += (ces_tau - 1.0) * std::pow(v, 1.0 - ces_tau) * coef[i] *
                           std::pow(q[i], ces_tau - 2.0);
            return h;
        }
    }
    return h;
}

void UtilityFn::validate(int goods, const std::string& where) const {
    switch (family) {
        case UtilityFamily::Linear: {
            if (coef.size() != goods) throw schema_error(where, "coefficient count mismatch");
            if (coef.minCoeff() < 0 || coef.maxCoeff() <= 0)
                throw schema_error(where, "linear coefficients must be >= 0, not all zero");
            break;
        }
        case UtilityFamily::CobbDouglas:
            if (coef.size() != goods) throw schema_error(where, "exponent count mismatch");
            if (coef.minCoeff() <= 0) throw schema_error(where, "exponents must be positive");
            break;
        case UtilityFamily::CES:
            if (coef.size() != goods) throw schema_error(where, "weight count mismatch");
            if (coef.minCoeff() <= 0) throw schema_error(where, "weights must be positive");
            if (!(ces_tau > 0 && ces_tau < 1)) throw schema_error(where, "tau must lie in (0,1)");
            if (!(ces_beta > 0)) throw schema_error(where, "beta must be positive");
            break;
        case UtilityFamily::QuantityOnly:
            if (qmap == QuantityMap::Power &&
                !(qmap_exponent > 0 && qmap_exponent <= 1))
                throw schema_error(where, "power exponent must lie in (0,1]");
            break;
    }
}

void Economy::validate() const {
    if (goods.empty()) throw schema_error("/goods", "at least one good required");
    if (consumers.empty()) throw schema_error("/consumers", "at least one consumer required");
    std::vector<Eigen::VectorXd> locs;
    auto check_loc = [&](const Eigen::VectorXd& x, const std::string& where) {
        if (x.size() != dimension) throw schema_error(where, "location dimension mismatch");
        for (const auto& other : locs)
            if ((other - x).norm() == 0) throw schema_error(where, "locations must be distinct");
        locs.push_back(x);
    };
    for (size_t i = 0; i < goods.size(); ++i)
        check_loc(goods[i].location, "/goods/" + std::to_string(i) + "/location");
    for (size_t j = 0; j < consumers.size(); ++j) {
        const auto& c = consumers[j];
        const std::string base = "/consumers/" + std::to_string(j);
        check_loc(c.location, base + "/location");
        if (!(c.wealth > 0)) throw schema_error(base + "/wealth", "wealth must be positive");
        if (c.prices.size() != k()) throw schema_error(base + "/prices", "price count mismatch");
        if (c.prices.minCoeff() <= 0)
            throw schema_error(base + "/prices", "prices must be strictly positive");
        c.utility.validate(k(), base + "/utility");
    }
}

Eigen::VectorXd demand(const Economy& economy, int j) {
    if (j < 0 || j >= economy.l()) throw Error("UnknownConsumer", "consumer index out of range");
    const Consumer& c = economy.consumers[j];
    const Eigen::VectorXd& p = c.prices;
    const int k = economy.k();
    Eigen::VectorXd q = Eigen::VectorXd::Zero(k);
    const UtilityFn& u = c.utility;

    switch (u.family) {
        case UtilityFamily::Linear: {
            // corner solution at the best utility-per-money ratio;
            // ties break to the lowest index
            int best = -1;
            double best_ratio = -1;
            for (int i = 0; i < k; ++i) {
                if (u.coef[i] <= 0) continue;
                double r = u.coef[i] / p[i];
                if (r > best_ratio * (1 + 1e-15)) {
                    best_ratio = r;
                    best = i;
                }
            }
            q[best] = c.wealth / p[best];
            return q;
        }
        case UtilityFamily::QuantityOnly: {
            // cheapest-good corner; any split of the same total is equivalent
            int best = 0;
            for (int i = 1; i < k; ++i)
                if (p[i] < p[best] * (1 - 1e-15)) best = i;
            q[best] = c.wealth / p[best];
            return q;
        }
        case UtilityFamily::CobbDouglas: {
            double total = u.coef.sum();
            for (int i = 0; i < k; ++i) q[i] = (u.coef[i] / total) * c.wealth / p[i];
            return q;
        }
        case UtilityFamily::CES: {
            // q_i = (w/A) (p_i/gamma_i)^(1/(tau-1)), A = sum p_i^(tau/(tau-1)) gamma_i^(1/(1-tau))
            double tau = u.ces_tau;
            double denom = 0;
            for (int i = 0; i < k; ++i)
                denom += p[i] * std::pow(p[i] / u.coef[i], 1.0 / (tau - 1.0));
            for (int i = 0; i < k; ++i)
                q[i] = (c.wealth / denom) * std::pow(p[i] / u.coef[i], 1.0 / (tau - 1.0));
            return q;
        }
    }
    return q;
}

double expenditure(const UtilityFn& u, const Eigen::VectorXd& p, double level) {
    const int k = static_cast<int>(p.size());
    const double u0 = u.value(Eigen::VectorXd::Zero(k));
    if (level < u0 - 1e-12)
        throw Error("UnreachableUtility", "target utility below u(0)");
    if (level <= u0) return 0;

    switch (u.family) {
        case UtilityFamily::Linear: {
            double best = std::numeric_limits<double>::infinity();
            for (int i = 0; i < k; ++i)
                if (u.coef[i] > 0) best = std::min(best, p[i] / u.coef[i]);
            return level * best;
        }
        case UtilityFamily::CobbDouglas: {
            // e = T * level^(1/T) * prod (p_i/tau_i)^(tau_i/T)
            double total = u.coef.sum();
            double prod = 1;
            for (int i = 0; i < k; ++i)
                prod *= std::pow(p[i] / u.coef[i], u.coef[i] / total);
            return total * std::pow(level, 1.0 / total) * prod;
        }
        case UtilityFamily::CES: {
            // e = level^(1/beta) * A^((tau-1)/tau), A = sum gamma^(1/(1-tau)) p^(tau/(tau-1))
            double tau = u.ces_tau;
            double a = 0;
            for (int i = 0; i < k; ++i)
                a += std::pow(u.coef[i], 1.0 / (1.0 - tau)) *
                     std::pow(p[i], tau / (tau - 1.0));
            return std::pow(level, 1.0 / u.ces_beta) * std::pow(a, (tau - 1.0) / tau);
        }
        case UtilityFamily::QuantityOnly: {
            double needed = quantity_map_inverse(u.qmap, u.qmap_exponent, level);
            return needed * p.minCoeff();
        }
    }
    return 0;
}

DemandProfile demand_profile(const Economy& economy) {
    economy.validate();
    const int k = economy.k(), l = economy.l();
    DemandProfile out;
    out.qbar.resize(k, l);
    for (int j = 0; j < l; ++j) out.qbar.col(j) = demand(economy, j);

    double total = out.qbar.sum();
    if (total <= 0) throw Error("ZeroTotalMass", "all demands are zero");
    out.scale = total;
    out.qbar /= total;

    out.floors.resize(l);
    for (int j = 0; j < l; ++j)
        out.floors[j] = economy.consumers[j].utility.value(out.qbar.col(j));

    for (int i = 0; i < k; ++i)
        out.source.atoms.push_back({economy.goods[i].location, out.qbar.row(i).sum()});
    for (int j = 0; j < l; ++j)
        out.consumer.atoms.push_back({economy.consumers[j].location, out.qbar.col(j).sum()});
    return out;
}

}  // namespace xval
