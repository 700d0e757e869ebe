#include "xval/exchange_value.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <sstream>

#include "xval/lp.hpp"

namespace xval {

double total_expenditure(const Economy& economy, const TransportPlan& q) {
    if (q.rows() != economy.k() || q.cols() != economy.l())
        throw Error("DimensionMismatch", "plan shape does not match the economy");
    double s = 0;
    for (int j = 0; j < economy.l(); ++j) {
        Eigen::VectorXd col = q.col(j).cwiseMax(0.0);
        const Consumer& c = economy.consumers[j];
        s += expenditure(c.utility, c.prices, c.utility.value(col));
    }
    return s;
}

namespace {

bool piecewise_linear(const Economy& economy) {
    for (const auto& c : economy.consumers)
        if (c.utility.family == UtilityFamily::CobbDouglas ||
            c.utility.family == UtilityFamily::CES)
            return false;
    return true;
}

// Reduced view of consumer j over the goods whose route to j is present.
struct ConsumerBlock {
    int j = 0;
    double kappa = 0;                  // e_j(p_j, 1)
    UtilityFn reduced;                 // utility restricted to active goods
    std::vector<int> packed;           // packed variable index per active good
    double root_floor = 0;             // phi_j(qbar_j)
    bool constant = false;             // phi identically zero/constant on K
    bool floor_needed = true;
};

std::vector<ConsumerBlock> make_blocks(const Economy& economy, const ConstraintSystem& cs,
                                       const Eigen::MatrixXd& z) {
    std::vector<ConsumerBlock> blocks;
    const int l = cs.l;
    for (int j = 0; j < l; ++j) {
        ConsumerBlock blk;
        blk.j = j;
        const UtilityFn& u = economy.consumers[j].utility;
        blk.kappa = expenditure(u, economy.consumers[j].prices, 1.0);

        std::vector<int> active_goods;
        for (size_t t = 0; t < cs.present.size(); ++t)
            if (cs.present[t] % l == j) {
                active_goods.push_back(cs.present[t] / l);
                blk.packed.push_back(static_cast<int>(t));
            }

        blk.reduced = u;
        if (u.coef.size() > 0) {
            Eigen::VectorXd sub(active_goods.size());
            for (size_t m = 0; m < active_goods.size(); ++m) sub[m] = u.coef[active_goods[m]];
            blk.reduced.coef = sub;
        }

        // Cobb-Douglas with a structurally-zero good is identically zero on K.
        if (u.family == UtilityFamily::CobbDouglas &&
            static_cast<int>(active_goods.size()) < cs.k)
            blk.constant = true;
        // untouched by every affine-hull direction -> constant on K
        if (!blk.constant) {
            double znorm = 0;
            for (int t : blk.packed)
                if (z.cols() > 0) znorm = std::max(znorm, z.row(t).cwiseAbs().maxCoeff());
            if (znorm < 1e-12) blk.constant = true;
        }
        if (!blk.constant && u.family == UtilityFamily::Linear && z.cols() > 0) {
            // linear utility constant along the hull when c is orthogonal to it
            double v = 0;
            for (int c = 0; c < z.cols(); ++c) {
                double dot = 0;
                for (size_t m = 0; m < blk.packed.size(); ++m)
                    dot += blk.reduced.coef[m] * z(blk.packed[m], c);
                v = std::max(v, std::abs(dot));
            }
            if (v < 1e-12) blk.constant = true;
        }

        Eigen::VectorXd qcol(active_goods.size());
        for (size_t m = 0; m < active_goods.size(); ++m)
            qcol[m] = cs.qbar(active_goods[m], j);
        blk.root_floor = blk.constant ? 0.0 : blk.reduced.root_value(qcol);

        // total-quantity floors are implied by the edge equations
        blk.floor_needed = !blk.constant && u.family != UtilityFamily::QuantityOnly;
        blocks.push_back(std::move(blk));
    }
    return blocks;
}

// ---- log-barrier machinery over the affine hull parametrization ----------

struct Constraint {
    // g(t) must stay strictly positive inside the barrier
    std::function<double(const Eigen::VectorXd&)> value;
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> grad;
    std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> hess;
};

struct Objective {
    std::function<double(const Eigen::VectorXd&)> value;
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> grad;
    std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> hess;
};

struct BarrierOutcome {
    Eigen::VectorXd t;
    int iterations = 0;
    bool converged = false;
};

// maximize f(t) + mu * sum log(g_i(t) + shift) by damped Newton, over the
// constraints relaxed by a fixed tiny shift.  The relaxation keeps t = 0
// strictly admissible even though the floors are tight there, so no
// feasibility phase is needed, it lets the iterates track optima that lie on
// faces where some constraint can never become strictly positive, and because
// the shift does not move between stages the previous iterate always stays
// admissible when mu shrinks.  The reported point can violate a constraint by
// at most the shift.
constexpr double kBarrierShift = 1e-10;

BarrierOutcome barrier_maximize(const Objective& f, const std::vector<Constraint>& cons,
                                Eigen::VectorXd t, double mu_start, double mu_end,
                                int max_iter_per_stage) {
    BarrierOutcome out;
    const int d = static_cast<int>(t.size());

    for (double mu = mu_start; mu >= mu_end * 0.999; mu /= 10.0) {
        auto stage_phi = [&](const Eigen::VectorXd& x) -> double {
            double v = f.value(x);
            for (const auto& c : cons) {
                double g = c.value(x) + kBarrierShift;
                if (g <= 0) return -std::numeric_limits<double>::infinity();
                v += mu * std::log(g);
            }
            return v;
        };
        bool stage_done = false;
        for (int it = 0; it < max_iter_per_stage && !stage_done; ++it) {
            ++out.iterations;
            Eigen::VectorXd grad = f.grad(t);
            Eigen::MatrixXd hess = f.hess(t);
            for (const auto& c : cons) {
                double g = c.value(t) + kBarrierShift;
                Eigen::VectorXd cg = c.grad(t);
                hess += mu * (c.hess(t) / g - (cg * cg.transpose()) / (g * g));
                grad += mu * cg / g;
            }
            Eigen::MatrixXd neg = -hess;
            neg += 1e-12 * Eigen::MatrixXd::Identity(d, d);
            Eigen::LDLT<Eigen::MatrixXd> ldlt(neg);
            Eigen::VectorXd dt;
            if (ldlt.info() == Eigen::Success) {
                dt = ldlt.solve(grad);
                if (!dt.allFinite() || grad.dot(dt) <= 0) dt = grad;  // fallback ascent
            } else {
                dt = grad;
            }
            double decrement = grad.dot(dt);
            if (decrement < 1e-14) { stage_done = true; break; }

            double base = stage_phi(t);
            double step = 1.0;
            bool moved = false;
            for (int ls = 0; ls < 60; ++ls) {
                Eigen::VectorXd cand = t + step * dt;
                double v = stage_phi(cand);
                if (std::isfinite(v) && v > base + 1e-4 * step * decrement) {
                    t = cand;
                    moved = true;
                    break;
                }
                step *= 0.5;
            }
            if (!moved) { stage_done = true; }
        }
    }
    out.t = t;
    out.converged = true;
    return out;
}

struct BarrierProblem {
    Objective f;
    std::vector<Constraint> cons;
};

BarrierProblem build_barrier_problem(const Economy& economy, const ConstraintSystem& cs,
                                     const Eigen::MatrixXd& z,
                                     const std::vector<ConsumerBlock>& blocks) {
    BarrierProblem bp;
    const Eigen::VectorXd x0 = cs.pack(cs.qbar);
    const int n = static_cast<int>(cs.present.size());
    const int d = static_cast<int>(z.cols());

    auto to_x = [x0, z](const Eigen::VectorXd& t) -> Eigen::VectorXd { return x0 + z * t; };

    // objective S(q(t)) = sum kappa_j phi_j over the non-constant blocks
    std::vector<const ConsumerBlock*> live;
    for (const auto& b : blocks)
        if (!b.constant) live.push_back(&b);

    auto column_of = [](const ConsumerBlock& b, const Eigen::VectorXd& x) {
        Eigen::VectorXd q(b.packed.size());
        for (size_t m = 0; m < b.packed.size(); ++m) q[m] = x[b.packed[m]];
        return q;
    };

    bp.f.value = [live, to_x, column_of](const Eigen::VectorXd& t) {
        Eigen::VectorXd x = to_x(t);
        double s = 0;
        for (const auto* b : live) s += b->kappa * b->reduced.root_value(column_of(*b, x));
        return s;
    };
    bp.f.grad = [live, to_x, column_of, z, d](const Eigen::VectorXd& t) {
        Eigen::VectorXd x = to_x(t);
        Eigen::VectorXd gx = Eigen::VectorXd::Zero(x.size());
        for (const auto* b : live) {
            Eigen::VectorXd g = b->kappa * b->reduced.root_gradient(column_of(*b, x));
            for (size_t m = 0; m < b->packed.size(); ++m) gx[b->packed[m]] += g[m];
        }
        return Eigen::VectorXd(z.transpose() * gx);
    };
    bp.f.hess = [live, to_x, column_of, z, d](const Eigen::VectorXd& t) {
        Eigen::VectorXd x = to_x(t);
        Eigen::MatrixXd hx = Eigen::MatrixXd::Zero(x.size(), x.size());
        for (const auto* b : live) {
            Eigen::MatrixXd h = b->kappa * b->reduced.root_hessian(column_of(*b, x));
            for (size_t a = 0; a < b->packed.size(); ++a)
                for (size_t c = 0; c < b->packed.size(); ++c)
                    hx(b->packed[a], b->packed[c]) += h(a, c);
        }
        return Eigen::MatrixXd(z.transpose() * hx * z);
    };

    // nonnegativity for every variable the hull actually moves
    for (int v = 0; v < n; ++v) {
        if (d == 0) break;
        if (z.row(v).cwiseAbs().maxCoeff() < 1e-12) continue;
        Constraint c;
        Eigen::VectorXd zr = z.row(v).transpose();
        double base = x0[v];
        c.value = [base, zr](const Eigen::VectorXd& t) { return base + zr.dot(t); };
        c.grad = [zr](const Eigen::VectorXd&) { return zr; };
        c.hess = [d](const Eigen::VectorXd&) { return Eigen::MatrixXd::Zero(d, d); };
        bp.cons.push_back(std::move(c));
    }

    // utility floors in root form: phi_j(q_j(t)) >= phi_j(qbar_j)
    for (const auto& b : blocks) {
        if (!b.floor_needed) continue;
        const ConsumerBlock* blk = &b;
        Constraint c;
        c.value = [blk, to_x, column_of](const Eigen::VectorXd& t) {
            return blk->reduced.root_value(column_of(*blk, to_x(t))) - blk->root_floor;
        };
        c.grad = [blk, to_x, column_of, z](const Eigen::VectorXd& t) {
            Eigen::VectorXd x = to_x(t);
            Eigen::VectorXd gx = Eigen::VectorXd::Zero(x.size());
            Eigen::VectorXd g = blk->reduced.root_gradient(column_of(*blk, x));
            for (size_t m = 0; m < blk->packed.size(); ++m) gx[blk->packed[m]] = g[m];
            return Eigen::VectorXd(z.transpose() * gx);
        };
        c.hess = [blk, to_x, column_of, z](const Eigen::VectorXd& t) {
            Eigen::VectorXd x = to_x(t);
            Eigen::MatrixXd hx = Eigen::MatrixXd::Zero(x.size(), x.size());
            Eigen::MatrixXd h = blk->reduced.root_hessian(column_of(*blk, x));
            for (size_t a = 0; a < blk->packed.size(); ++a)
                for (size_t m = 0; m < blk->packed.size(); ++m)
                    hx(blk->packed[a], blk->packed[m]) = h(a, m);
            return Eigen::MatrixXd(z.transpose() * hx * z);
        };
        bp.cons.push_back(std::move(c));
    }
    return bp;
}

// LP route for piecewise-linear economies: S is linear over the polytope.
ValuationResult solve_lp_backend(const Economy& economy, const ConstraintSystem& cs,
                                 double s_base, const Tolerances& tol) {
    const int l = cs.l;
    const int n = static_cast<int>(cs.present.size());

    std::vector<int> linear_floor_consumers;
    for (int j = 0; j < l; ++j)
        if (economy.consumers[j].utility.family == UtilityFamily::Linear)
            linear_floor_consumers.push_back(j);
    const int nf = static_cast<int>(linear_floor_consumers.size());

    // variables: present routes then one slack per linear floor
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(cs.A.rows() + nf, n + nf);
    Eigen::VectorXd b(cs.A.rows() + nf);
    a.topLeftCorner(cs.A.rows(), n) = cs.A;
    b.head(cs.A.rows()) = cs.b;

    Eigen::VectorXd c = Eigen::VectorXd::Zero(n + nf);
    for (int t = 0; t < n; ++t) {
        int i = cs.present[t] / l, j = cs.present[t] % l;
        const Consumer& cons = economy.consumers[j];
        double kappa = expenditure(cons.utility, cons.prices, 1.0);
        double coeff = cons.utility.family == UtilityFamily::Linear
                           ? cons.utility.coef[i]
                           : 1.0;  // QuantityOnly root value is the plain sum
        c[t] = kappa * coeff;
    }
    for (int f = 0; f < nf; ++f) {
        int j = linear_floor_consumers[f];
        const UtilityFn& u = economy.consumers[j].utility;
        for (int t = 0; t < n; ++t)
            if (cs.present[t] % l == j) a(cs.A.rows() + f, t) = u.coef[cs.present[t] / l];
        a(cs.A.rows() + f, n + f) = -1.0;
        Eigen::VectorXd qcol = cs.qbar.col(j);
        b[cs.A.rows() + f] = u.value(qcol);
    }

    LpResult lp = solve_lp_max(c, a, b);
    ValuationResult res;
    res.backend = "lp";
    res.iterations = lp.iterations;
    res.residual = 0;
    res.maximizer = cs.unpack(lp.x.head(n));

    // lexicographically smallest optimal vertex when enumeration is cheap
    int rank_est = n - static_cast<int>(affine_hull_basis(cs).cols());
    int dim = n - rank_est;
    if (dim <= 6) {
        auto verts = basic_feasible_points(a, b);
        double best = -std::numeric_limits<double>::infinity();
        for (const auto& v : verts) best = std::max(best, c.dot(v));
        std::vector<Eigen::VectorXd> optima;
        for (const auto& v : verts)
            if (c.dot(v) >= best - 1e-9 * std::max(1.0, std::abs(best)))
                optima.push_back(v.head(n));
        std::sort(optima.begin(), optima.end(),
                  [](const Eigen::VectorXd& p, const Eigen::VectorXd& q) {
                      for (int i = 0; i < p.size(); ++i) {
                          if (p[i] < q[i] - 1e-12) return true;
                          if (p[i] > q[i] + 1e-12) return false;
                      }
                      return false;
                  });
        if (!optima.empty()) res.maximizer = cs.unpack(optima.front());
        res.uniqueness = optima.size() == 1 ? Uniqueness::Unique
                         : optima.size() > 1 ? Uniqueness::NonUnique
                                             : Uniqueness::Unknown;
    }

    double v = total_expenditure(economy, res.maximizer) - s_base;
    res.clamped = v < 0 && v > -tol.opt;
    res.value = std::max(0.0, v);
    if (v < -1e-6)
        throw Error("SolverStall", "LP maximizer below the reference expenditure");
    return res;
}

ValuationResult solve_barrier_backend(const Economy& economy, const ConstraintSystem& cs,
                                      const Eigen::MatrixXd& z, double s_base,
                                      const Tolerances& tol) {
    ValuationResult res;
    res.backend = "barrier";
    auto blocks = make_blocks(economy, cs, z);
    BarrierProblem bp = build_barrier_problem(economy, cs, z, blocks);

    Eigen::VectorXd t0 = Eigen::VectorXd::Zero(z.cols());
    BarrierOutcome bo = barrier_maximize(bp.f, bp.cons, t0, 1e-1, 1e-9, 200);
    res.iterations = bo.iterations;
    res.residual = 1e-9 * static_cast<double>(bp.cons.size());

    Eigen::VectorXd x = cs.pack(cs.qbar) + z * bo.t;
    res.maximizer = cs.unpack(x.cwiseMax(0.0));
    double v = total_expenditure(economy, res.maximizer) - s_base;
    res.clamped = v < 0 && v > -tol.opt;
    res.value = std::max(0.0, v);
    return res;
}

}  // namespace

ValuationResult exchange_value(const Economy& economy, const TransportPath& g,
                               const TransportPlan& qbar, const Tolerances& tol) {
    economy.validate();
    std::vector<double> floors(economy.l());
    for (int j = 0; j < economy.l(); ++j)
        floors[j] = economy.consumers[j].utility.value(Eigen::VectorXd(qbar.col(j)));
    ConstraintSystem cs = build_constraints(g, qbar, floors);

    const double s_base = total_expenditure(economy, qbar);
    Eigen::MatrixXd z = affine_hull_basis(cs);

    ValuationResult res;
    if (z.cols() == 0) {
        res.backend = "fixed";
        res.maximizer = qbar;
        res.value = 0;
        res.uniqueness = Uniqueness::Unique;
        return res;
    }
    if (piecewise_linear(economy))
        res = solve_lp_backend(economy, cs, s_base, tol);
    else
        res = solve_barrier_backend(economy, cs, z, s_base, tol);
    return res;
}

Uniqueness uniqueness_probe(const Economy& economy, const TransportPath& g,
                            const TransportPlan& qbar, const ValuationResult& result,
                            const Tolerances& tol) {
    bool all_strict = true;
    for (const auto& c : economy.consumers)
        if (c.utility.family != UtilityFamily::CobbDouglas &&
            c.utility.family != UtilityFamily::CES)
            all_strict = false;
    if (all_strict) return Uniqueness::Unique;  // strictly concave root utilities

    if (result.backend == "fixed") return Uniqueness::Unique;
    if (result.backend == "lp" && result.uniqueness != Uniqueness::Unknown)
        return result.uniqueness;

    // mixed families: re-solve from random feasible starts and compare
    std::vector<double> floors(economy.l());
    for (int j = 0; j < economy.l(); ++j)
        floors[j] = economy.consumers[j].utility.value(Eigen::VectorXd(qbar.col(j)));
    ConstraintSystem cs = build_constraints(g, qbar, floors);
    Eigen::MatrixXd z = affine_hull_basis(cs);
    if (z.cols() == 0) return Uniqueness::Unique;

    auto blocks = make_blocks(economy, cs, z);
    BarrierProblem bp = build_barrier_problem(economy, cs, z, blocks);

    std::mt19937 rng(7);
    std::normal_distribution<double> gauss;
    for (int trial = 0; trial < 4; ++trial) {
        Eigen::VectorXd dir(z.cols());
        for (int i = 0; i < dir.size(); ++i) dir[i] = gauss(rng);
        // backtrack toward t = 0 until the perturbed start is admissible
        Eigen::VectorXd start = 0.1 * dir;
        for (int bt = 0; bt < 40; ++bt) {
            bool ok = true;
            for (const auto& c : bp.cons)
                if (c.value(start) + 0.5 * kBarrierShift <= 0) { ok = false; break; }
            if (ok) break;
            start *= 0.5;
        }
        BarrierOutcome bo = barrier_maximize(bp.f, bp.cons, start, 1e-1, 1e-9, 200);
        TransportPlan q = cs.unpack((cs.pack(cs.qbar) + z * bo.t).cwiseMax(0.0));
        double v = total_expenditure(economy, q) - total_expenditure(economy, qbar);
        if (std::abs(v - result.value) <= 1e-6 * std::max(1.0, result.value) &&
            (q - result.maximizer).lpNorm<Eigen::Infinity>() > 100 * tol.opt)
            return Uniqueness::NonUnique;
    }
    return Uniqueness::Unknown;
}

CriterionReport criterion_quantity_only(const Economy& economy) {
    CriterionReport rep;
    rep.name = "quantity_only";
    bool all = true;
    for (const auto& c : economy.consumers)
        if (c.utility.family != UtilityFamily::QuantityOnly) all = false;
    rep.applies = all;
    if (all) {
        rep.conclusion = CriterionReport::Conclusion::ZeroForced;
        rep.detail = "every consumer derives utility from total quantity only";
    } else {
        rep.detail = "some consumer distinguishes between goods";
    }
    return rep;
}

CriterionReport criterion_collinear_prices(const Economy& economy, double eps_rel) {
    CriterionReport rep;
    rep.name = "collinear_prices";
    const int l = economy.l();
    const Eigen::VectorXd& p1 = economy.consumers[0].prices;
    std::ostringstream detail;
    bool collinear = true;
    for (int j = 0; j < l; ++j) {
        const Eigen::VectorXd& pj = economy.consumers[j].prices;
        double lambda = pj.dot(p1) / p1.squaredNorm();
        if (lambda <= 0 || (pj - lambda * p1).norm() > eps_rel * pj.norm()) {
            collinear = false;
            rep.detail = "consumer " + std::to_string(j + 1) + " breaks collinearity";
            break;
        }
        detail << (j ? "," : "lambda=") << lambda;
    }
    rep.applies = collinear;
    if (collinear) {
        rep.conclusion = CriterionReport::Conclusion::ZeroForced;
        rep.detail = detail.str();
    }
    return rep;
}

CriterionReport criterion_disjoint_routes(const TransportPath& g) {
    CriterionReport rep;
    rep.name = "disjoint_routes";
    RouteMatrix rm = route_matrix(g);
    for (int i1 = 0; i1 < rm.k; ++i1)
        for (int i2 = 0; i2 < rm.k; ++i2)
            for (int j1 = 0; j1 < rm.l; ++j1)
                for (int j2 = 0; j2 < rm.l; ++j2) {
                    if (i1 == i2 || j1 == j2) continue;
                    const Route& r1 = rm.at(i1, j2);
                    const Route& r2 = rm.at(i2, j1);
                    if (!r1.present || !r2.present) continue;
                    for (int v : r1.vertex_ids)
                        if (std::find(r2.vertex_ids.begin(), r2.vertex_ids.end(), v) !=
                            r2.vertex_ids.end()) {
                            rep.applies = false;
                            rep.detail = "routes (" + std::to_string(i1 + 1) + "," +
                                         std::to_string(j2 + 1) + ") and (" +
                                         std::to_string(i2 + 1) + "," +
                                         std::to_string(j1 + 1) + ") share a vertex";
                            return rep;
                        }
                }
    rep.applies = true;
    rep.conclusion = CriterionReport::Conclusion::ZeroForced;
    rep.detail = "cross routes are pairwise vertex-disjoint; the feasible set is a singleton";
    return rep;
}

namespace {

// Looks for a hull direction strictly increasing every utility that is not
// constant on the polytope: maximize eps subject to grad_j . (Z t) >= eps
// with |t_d| <= 1.  A positive optimum certifies a non-singleton feasible
// set for strictly concave families.
bool improving_direction_exists(const Economy& economy, const ConstraintSystem& cs) {
    Eigen::MatrixXd z = affine_hull_basis(cs);
    const int d = static_cast<int>(z.cols());
    if (d == 0) return false;
    const int l = cs.l;

    std::vector<Eigen::VectorXd> dir_grad;  // per kept consumer, gradient in t
    for (int j = 0; j < l; ++j) {
        Eigen::VectorXd gx = Eigen::VectorXd::Zero(z.rows());
        std::vector<int> packed;
        std::vector<int> goods;
        for (size_t t = 0; t < cs.present.size(); ++t)
            if (cs.present[t] % l == j) {
                packed.push_back(static_cast<int>(t));
                goods.push_back(cs.present[t] / l);
            }
        double moved = 0;
        for (int t : packed) moved = std::max(moved, z.row(t).cwiseAbs().maxCoeff());
        if (moved < 1e-12) continue;  // constant on the hull, floor never binds

        Eigen::VectorXd qcol(goods.size());
        for (size_t m = 0; m < goods.size(); ++m) qcol[m] = cs.qbar(goods[m], j);
        UtilityFn reduced = economy.consumers[j].utility;
        if (reduced.coef.size() > 0) {
            Eigen::VectorXd sub(goods.size());
            for (size_t m = 0; m < goods.size(); ++m) sub[m] = reduced.coef[goods[m]];
            reduced.coef = sub;
        }
        Eigen::VectorXd grad = reduced.root_gradient(qcol);
        if (!grad.allFinite()) return false;
        for (size_t m = 0; m < packed.size(); ++m) gx[packed[m]] = grad[m];
        Eigen::VectorXd gt = z.transpose() * gx;
        double scale = gt.cwiseAbs().maxCoeff();
        if (scale < 1e-14) return false;  // flat but moved: cannot certify
        dir_grad.push_back(gt / scale);
    }
    if (dir_grad.empty()) return false;
    const int m = static_cast<int>(dir_grad.size());

    // LP variables: t = tp - tm (2d), eps, one surplus per consumer row,
    // one slack per box row.  Rows: grad_j.(tp - tm) - eps - s_j = 0 and
    // tp_d + tm_d + b_d = 1.
    const int nv = 2 * d + 1 + m + d;
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m + d, nv);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(m + d);
    Eigen::VectorXd c = Eigen::VectorXd::Zero(nv);
    c[2 * d] = 1.0;
    for (int r = 0; r < m; ++r) {
        for (int t = 0; t < d; ++t) {
            a(r, t) = dir_grad[r][t];
            a(r, d + t) = -dir_grad[r][t];
        }
        a(r, 2 * d) = -1.0;
        a(r, 2 * d + 1 + r) = -1.0;
    }
    for (int t = 0; t < d; ++t) {
        a(m + t, t) = 1.0;
        a(m + t, d + t) = 1.0;
        a(m + t, 2 * d + 1 + m + t) = 1.0;
        b[m + t] = 1.0;
    }
    try {
        LpResult lp = solve_lp_max(c, a, b);
        return lp.value > 1e-9;
    } catch (const Error&) {
        return false;
    }
}

}  // namespace

CriterionReport criterion_positive(const Economy& economy, const TransportPath& g,
                                   const TransportPlan& qbar) {
    CriterionReport rep;
    rep.name = "positive_value";
    RouteMatrix rm = route_matrix(g);

    // (a) strictly concave root utilities + positive-dimensional polytope +
    //     interior reference plan + a certified direction along which every
    //     consumer's utility strictly improves (so the feasible set is not a
    //     singleton and positivity follows)
    bool all_strict = true;
    for (const auto& c : economy.consumers)
        if (c.utility.family != UtilityFamily::CobbDouglas &&
            c.utility.family != UtilityFamily::CES)
            all_strict = false;
    if (all_strict) {
        int n = rm.present_count();
        int chi = euler_characteristic(g);
        if (rm.k + rm.l < n + chi) {
            ConstraintSystem cs = build_constraints(g, qbar);
            if (interior_point_test(cs) && improving_direction_exists(economy, cs)) {
                rep.applies = true;
                rep.conclusion = CriterionReport::Conclusion::PositiveGuaranteed;
                rep.detail =
                    "interior reference plan with a jointly utility-improving direction";
                return rep;
            }
        }
    }

    // (b) overlapping cross routes with the price inequalities at a strictly
    //     positive reference plan
    auto differentiable_positive = [](const UtilityFn& u) {
        return true;  // all supported families have positive gradients at q > 0
    };
    for (int i1 = 0; i1 < rm.k; ++i1)
        for (int i2 = 0; i2 < rm.k; ++i2)
            for (int j1 = 0; j1 < rm.l; ++j1)
                for (int j2 = 0; j2 < rm.l; ++j2) {
                    if (i1 == i2 || j1 == j2) continue;
                    const Route& r1 = rm.at(i1, j2);
                    const Route& r2 = rm.at(i2, j1);
                    if (!r1.present || !r2.present) continue;
                    bool overlap = false;
                    for (int v : r1.vertex_ids)
                        if (std::find(r2.vertex_ids.begin(), r2.vertex_ids.end(), v) !=
                            r2.vertex_ids.end()) {
                            overlap = true;
                            break;
                        }
                    if (!overlap) continue;
                    const auto& c1 = economy.consumers[j1];
                    const auto& c2 = economy.consumers[j2];
                    if (!(c1.prices[i2] > c1.prices[i1] && c2.prices[i1] > c2.prices[i2]))
                        continue;
                    if (!(qbar(i1, j1) > 0 && qbar(i1, j2) > 0 && qbar(i2, j1) > 0 &&
                          qbar(i2, j2) > 0))
                        continue;
                    if (!differentiable_positive(c1.utility) ||
                        !differentiable_positive(c2.utility))
                        continue;
                    rep.applies = true;
                    rep.conclusion = CriterionReport::Conclusion::PositiveGuaranteed;
                    rep.detail = "overlapping routes (" + std::to_string(i1 + 1) + "," +
                                 std::to_string(j2 + 1) + ")/(" + std::to_string(i2 + 1) +
                                 "," + std::to_string(j1 + 1) +
                                 ") with favorable price gaps at an interior plan";
                    return rep;
                }

    rep.detail = "no sufficient condition for positivity holds";
    return rep;
}

}  // namespace xval
