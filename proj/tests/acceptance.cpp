// Acceptance checklist: one line per criterion, PASS or FAIL, with the pinned
// tolerances baked in.  Exits nonzero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>

#include "generators.hpp"
#include "oracles.hpp"
#include "xval/exchange_value.hpp"
#include "xval/h_optimizer.hpp"
#include "xval/plan_polytope.hpp"

using namespace xval;

namespace {

int failures = 0;

void report(int index, const char* label, bool ok, const std::string& detail = "") {
    std::printf("criterion %2d [%s]: %s%s%s\n", index, label, ok ? "PASS" : "FAIL",
                detail.empty() ? "" : " -- ", detail.c_str());
    if (!ok) ++failures;
}

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Economy opposed_linear() {
    Economy e;
    e.dimension = 2;
    e.goods = {{"x1", Eigen::Vector2d(0, 0)}, {"x2", Eigen::Vector2d(0, 10)}};
    Consumer c1, c2;
    c1.id = "y1";
    c1.location = Eigen::Vector2d(1, 0);
    c1.wealth = 0.5;
    c1.prices = Eigen::Vector2d(1, 6);
    c1.utility.family = UtilityFamily::Linear;
    c1.utility.coef = Eigen::Vector2d(1, 3);
    c2.id = "y2";
    c2.location = Eigen::Vector2d(1, 10);
    c2.wealth = 0.5;
    c2.prices = Eigen::Vector2d(6, 1);
    c2.utility.family = UtilityFamily::Linear;
    c2.utility.coef = Eigen::Vector2d(3, 1);
    e.consumers = {c1, c2};
    return e;
}

TransportPath direct_pairing() {
    TransportPath g;
    g.vertices = {{"x1", Eigen::Vector2d(0, 0)},
                  {"x2", Eigen::Vector2d(0, 10)},
                  {"y1", Eigen::Vector2d(1, 0)},
                  {"y2", Eigen::Vector2d(1, 10)}};
    g.edges = {{0, 2, 0.5}, {1, 3, 0.5}};
    g.sources = {0, 1};
    g.source_mass = {0.5, 0.5};
    g.sinks = {2, 3};
    g.sink_mass = {0.5, 0.5};
    return g;
}

TransportPath trunk_star(const Eigen::Vector2d& hub) {
    AtomicMeasure a, b;
    a.atoms = {{Eigen::Vector2d(0, 0), 0.5}, {Eigen::Vector2d(0, 10), 0.5}};
    b.atoms = {{Eigen::Vector2d(1, 0), 0.5}, {Eigen::Vector2d(1, 10), 0.5}};
    return hub_path(a, b, hub);
}

bool demand_hub(const Economy& e, TransportPath& g, TransportPlan& qbar) {
    DemandProfile p = demand_profile(e);
    for (int j = 0; j < e.l(); ++j)
        if (p.qbar.col(j).sum() <= 1e-12) return false;
    try {
        g = hub_path(p.source, p.consumer, Eigen::Vector2d(11.37, 0.77));
    } catch (const Error&) {
        return false;
    }
    qbar = p.qbar;
    return true;
}

bool split_hub(const Economy& e, const TransportPlan& qbar, TransportPath& g) {
    const int k = static_cast<int>(qbar.rows());
    const int l = static_cast<int>(qbar.cols());
    if (l < 2) return false;
    DemandProfile p = demand_profile(e);
    g = TransportPath();
    for (int i = 0; i < k; ++i)
        g.vertices.push_back({"x" + std::to_string(i), p.source.atoms[i].location});
    for (int j = 0; j < l; ++j)
        g.vertices.push_back({"y" + std::to_string(j), p.consumer.atoms[j].location});
    g.vertices.push_back({"h1", Eigen::Vector2d(12.19, -3.1)});
    g.vertices.push_back({"h2", Eigen::Vector2d(12.19, 3.1)});
    const int h1 = k + l, h2 = k + l + 1;
    const int split = l / 2;
    for (int i = 0; i < k; ++i) {
        double w1 = 0, w2 = 0;
        for (int j = 0; j < split; ++j) w1 += qbar(i, j);
        for (int j = split; j < l; ++j) w2 += qbar(i, j);
        if (w1 > 0) g.edges.push_back({i, h1, w1});
        if (w2 > 0) g.edges.push_back({i, h2, w2});
    }
    for (int j = 0; j < l; ++j) {
        double w = qbar.col(j).sum();
        if (w <= 0) return false;
        g.edges.push_back({j < split ? h1 : h2, k + j, w});
    }
    for (int i = 0; i < k; ++i) {
        g.sources.push_back(i);
        g.source_mass.push_back(qbar.row(i).sum());
    }
    for (int j = 0; j < l; ++j) {
        g.sinks.push_back(k + j);
        g.sink_mass.push_back(qbar.col(j).sum());
    }
    try {
        g.validate();
        route_matrix(g);
    } catch (const Error&) {
        return false;
    }
    return true;
}

void criterion_1() {
    auto t0 = std::chrono::steady_clock::now();
    Economy e = opposed_linear();
    DemandProfile p = demand_profile(e);
    bool ok = (p.qbar - (Eigen::MatrixXd(2, 2) << 0.5, 0, 0, 0.5).finished()).norm() < 1e-12;
    for (int j = 0; j < 2 && ok; ++j)
        ok = std::abs(expenditure(e.consumers[j].utility, e.consumers[j].prices, 0.7) - 0.7) <
             1e-12;
    ValuationResult direct = exchange_value(e, direct_pairing(), p.qbar);
    ok = ok && direct.value == 0.0;
    ValuationResult trunk = exchange_value(e, trunk_star(Eigen::Vector2d(0.5, 5)), p.qbar);
    ok = ok && std::abs(trunk.value - 2.0) <= 1e-9;
    TransportPlan expect(2, 2);
    expect << 0, 0.5, 0.5, 0;
    ok = ok && (trunk.maximizer - expect).lpNorm<Eigen::Infinity>() <= 1e-9;
    double dt = seconds_since(t0);
    ok = ok && dt < 1.0;
    report(1, "reference economy", ok,
           "V_direct=" + std::to_string(direct.value) + " V_trunk=" +
               std::to_string(trunk.value) + " t=" + std::to_string(dt) + "s");
}

void criterion_2() {
    auto t0 = std::chrono::steady_clock::now();
    std::mt19937 rng(11);
    bool ok = true;
    int n = 0;
    for (int trial = 0; trial < 200; ++trial) {
        auto inst = gen::random_forest(rng, 2 + static_cast<int>(rng() % 3),
                                       2 + static_cast<int>(rng() % 3), 6);
        ConstraintSystem cs = build_constraints(inst.path, inst.qbar);
        if (polytope_dimension_rank(cs) != polytope_dimension_formula(inst.path)) ok = false;
        ++n;
    }
    double dt = seconds_since(t0);
    ok = ok && dt < 10.0 && n == 200;
    report(2, "dimension identity", ok,
           std::to_string(n) + " instances, t=" + std::to_string(dt) + "s");
}

void criterion_3() {
    auto t0 = std::chrono::steady_clock::now();
    std::mt19937 rng(13);
    bool ok = true;
    int n = 0;
    for (int trial = 0; trial < 400 && n < 50; ++trial) {
        Economy e;
        try {
            e = gen::random_economy(rng, 2 + static_cast<int>(rng() % 2),
                                    2 + static_cast<int>(rng() % 2), gen::EconomyKind::Mixed);
        } catch (const Error&) {
            continue;
        }
        TransportPath hub, partial;
        TransportPlan qbar;
        if (!demand_hub(e, hub, qbar)) continue;
        if (!split_hub(e, qbar, partial)) continue;
        double v_hub = exchange_value(e, hub, qbar).value;
        double v_partial = exchange_value(e, partial, qbar).value;
        if (!(v_hub >= 0 && v_partial >= 0 && v_partial <= v_hub + 1e-7)) ok = false;
        ++n;
    }
    double dt = seconds_since(t0);
    ok = ok && n == 50 && dt < 60.0;
    report(3, "upper bound", ok, std::to_string(n) + " economies, t=" + std::to_string(dt) + "s");
}

void criterion_4() {
    std::mt19937 rng(17);
    bool ok = true;
    int nc = 0, nq = 0;
    for (int trial = 0; trial < 600 && nc < 50; ++trial) {
        Economy e;
        try {
            e = gen::random_economy(rng, 2 + static_cast<int>(rng() % 2),
                                    2 + static_cast<int>(rng() % 2),
                                    gen::EconomyKind::Collinear);
        } catch (const Error&) {
            continue;
        }
        TransportPath hub;
        TransportPlan qbar;
        if (!demand_hub(e, hub, qbar)) continue;
        if (exchange_value(e, hub, qbar).value > 1e-7) ok = false;
        ++nc;
    }
    for (int trial = 0; trial < 600 && nq < 50; ++trial) {
        Economy e;
        try {
            e = gen::random_economy(rng, 2 + static_cast<int>(rng() % 2),
                                    2 + static_cast<int>(rng() % 2),
                                    gen::EconomyKind::QuantityOnly);
        } catch (const Error&) {
            continue;
        }
        TransportPath hub;
        TransportPlan qbar;
        if (!demand_hub(e, hub, qbar)) continue;
        if (exchange_value(e, hub, qbar).value > 1e-7) ok = false;
        ++nq;
    }
    ok = ok && nc == 50 && nq == 50;
    report(4, "zero criteria", ok,
           std::to_string(nc) + " collinear + " + std::to_string(nq) + " quantity-only");
}

void criterion_5() {
    std::mt19937 rng(19);
    std::uniform_real_distribution<double> lo(0.5, 1.0), gap(1.5, 3.0), t(0.3, 0.7);
    bool ok = true;
    for (int trial = 0; trial < 25; ++trial) {
        Economy e;
        e.dimension = 2;
        e.goods = {{"x1", Eigen::Vector2d(0, 0)}, {"x2", Eigen::Vector2d(0, 4)}};
        for (int j = 0; j < 2; ++j) {
            Consumer c;
            c.id = "y" + std::to_string(j + 1);
            c.location = Eigen::Vector2d(6, 4.0 * j);
            c.wealth = 1.0;
            double cheap = lo(rng);
            c.prices = Eigen::Vector2d(j == 0 ? cheap : cheap * gap(rng),
                                       j == 0 ? cheap * gap(rng) : cheap);
            c.utility.family = UtilityFamily::CobbDouglas;
            c.utility.coef = Eigen::Vector2d(t(rng), t(rng));
            e.consumers.push_back(std::move(c));
        }
        TransportPath hub;
        TransportPlan qbar;
        if (!demand_hub(e, hub, qbar)) { ok = false; continue; }
        if (!(criterion_positive(e, hub, qbar).applies &&
              exchange_value(e, hub, qbar).value > 1e-7))
            ok = false;
    }
    report(5, "positivity", ok, "25 constructed cross-gap economies");
}

void criterion_6() {
    std::mt19937 rng(202);
    bool ok = true;
    int tested = 0;
    double worst = 0;
    for (int trial = 0; trial < 6000 && tested < 150; ++trial) {
        int k = 2 + static_cast<int>(rng() % 3), l = 2 + static_cast<int>(rng() % 3);
        gen::EconomyKind kind = trial % 3 == 0   ? gen::EconomyKind::Mixed
                                : trial % 3 == 1 ? gen::EconomyKind::CobbDouglas
                                                 : gen::EconomyKind::Collinear;
        Economy e;
        gen::ForestInstance inst;
        try {
            e = gen::random_economy(rng, k, l, kind);
            inst = gen::random_forest(rng, k, l, 3);
        } catch (const Error&) {
            continue;
        }
        int dim = polytope_dimension_formula(inst.path);
        if (dim < 1 || dim > 3) continue;
        double vs = exchange_value(e, inst.path, inst.qbar).value;
        double vo = oracle::exchange_value_grid(e, inst.path, inst.qbar);
        ++tested;
        double err = std::abs(vs - vo);
        if (err > 1e-4 * std::max(vs, vo) + 1e-7) ok = false;
        if (std::max(vs, vo) > 1e-4) worst = std::max(worst, err / std::max(vs, vo));
    }
    ok = ok && tested == 150;
    report(6, "oracle equivalence", ok,
           std::to_string(tested) + " instances, worst rel err " + std::to_string(worst));
}

void criterion_7() {
    Economy e = opposed_linear();
    TransportPlan qbar(2, 2);
    qbar << 0.5, 0, 0, 0.5;
    double v0 = exchange_value(e, trunk_star(Eigen::Vector2d(0.5, 5)), qbar).value;
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> d(-0.3, 0.3);
    bool ok = true;
    double worst = 0;
    for (int trial = 0; trial < 20; ++trial) {
        Eigen::Vector2d hub(0.5 + d(rng), 5 + d(rng));
        double v = exchange_value(e, trunk_star(hub), qbar).value;
        worst = std::max(worst, std::abs(v - v0));
    }
    ok = worst <= 1e-9;
    report(7, "topological invariance", ok, "max |dV| = " + std::to_string(worst));
}

void criterion_8() {
    std::mt19937 rng(29);
    std::uniform_real_distribution<double> unit(0.1, 1.0);
    bool ok = true;
    for (int k = 2; k <= 3; ++k)
        for (int l = 2; l <= 3; ++l) {
            TransportPlan qbar(k, l);
            for (int i = 0; i < k; ++i)
                for (int j = 0; j < l; ++j) qbar(i, j) = unit(rng);
            AtomicMeasure a, b;
            for (int i = 0; i < k; ++i)
                a.atoms.push_back({Eigen::Vector2d(0, 3.0 * i), qbar.row(i).sum()});
            for (int j = 0; j < l; ++j)
                b.atoms.push_back({Eigen::Vector2d(4, 3.0 * j), qbar.col(j).sum()});
            TransportPath g = hub_path(a, b, Eigen::Vector2d(2, 1));
            ConstraintSystem cs = build_constraints(g, qbar);
            if (polytope_dimension_rank(cs) != (k - 1) * (l - 1)) ok = false;
        }
    report(8, "hub dimension", ok, "k,l in {2,3}");
}

void criterion_9() {
    Economy e = opposed_linear();
    bool ok = true, switched = false;
    for (double sigma : {0.0, 0.1, 1.0, 10.0, 1000.0}) {
        HResult r = optimize_h(e, 0.5, sigma, 2);
        if (r.best < 0) { ok = false; break; }
        const CandidateOutcome& best = r.candidates[r.best];
        if (sigma == 0.0) {
            for (const auto& c : r.candidates)
                if (best.m_alpha > c.m_alpha + 1e-9) ok = false;
        }
        if (best.exchange > 1.0) switched = true;
    }
    ok = ok && switched;
    report(9, "sigma switch", ok, "trunk selected above a finite sigma");
}

void criterion_10() {
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> coefd(0.2, 2.0), taud(0.2, 0.8);
    std::uniform_real_distribution<double> priced(0.5, 3.0), leveld(0.2, 3.0);
    bool ok = true;
    double worst = 0;
    for (int trial = 0; trial < 100; ++trial) {
        int k = 2 + static_cast<int>(rng() % 3);
        UtilityFn u;
        u.coef = Eigen::VectorXd::NullaryExpr(k, [&](Eigen::Index) { return coefd(rng); });
        if (trial % 2) {
            u.family = UtilityFamily::CobbDouglas;
        } else {
            u.family = UtilityFamily::CES;
            u.ces_tau = taud(rng);
            u.ces_beta = coefd(rng);
        }
        Eigen::VectorXd p =
            Eigen::VectorXd::NullaryExpr(k, [&](Eigen::Index) { return priced(rng); });
        double level = leveld(rng);
        double closed = expenditure(u, p, level);
        double grid = oracle::expenditure_grid(u, p, level);
        double rel = std::abs(closed - grid) / std::max(1e-12, grid);
        worst = std::max(worst, rel);
        if (rel > 1e-6) ok = false;
    }
    report(10, "expenditure forms", ok, "100 instances, worst rel err " + std::to_string(worst));
}

}  // namespace

int main() {
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10();
    std::printf("acceptance: %d/10 passed\n", 10 - failures);
    return failures == 0 ? 0 : 1;
}
