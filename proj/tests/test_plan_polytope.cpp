#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <random>

#include "doctest.h"
#include "generators.hpp"
#include "xval/plan_polytope.hpp"

using namespace xval;

namespace {

TransportPath star_path(const TransportPlan& qbar) {
    AtomicMeasure a, b;
    const int k = static_cast<int>(qbar.rows());
    const int l = static_cast<int>(qbar.cols());
    for (int i = 0; i < k; ++i)
        a.atoms.push_back({Eigen::Vector2d(0, 3.0 * i), qbar.row(i).sum()});
    for (int j = 0; j < l; ++j)
        b.atoms.push_back({Eigen::Vector2d(4, 3.0 * j), qbar.col(j).sum()});
    return hub_path(a, b, Eigen::Vector2d(2, 1));
}

TransportPlan diag_half() {
    TransportPlan q = TransportPlan::Zero(2, 2);
    q(0, 0) = q(1, 1) = 0.5;
    return q;
}

}  // namespace

TEST_CASE("compatibility accepts matching pairs and reports residuals") {
    TransportPlan qbar = diag_half();
    TransportPath g = star_path(qbar);
    CHECK(compatibility_check(g, qbar).compatible);

    TransportPlan off = qbar;
    off(0, 0) = 0.4;
    CompatibilityReport rep = compatibility_check(g, off);
    CHECK_FALSE(rep.compatible);
    CHECK(rep.max_edge_residual == doctest::Approx(0.1));
}

TEST_CASE("mass on an absent route is rejected") {
    TransportPath g;
    g.vertices = {{"x1", Eigen::Vector2d(0, 0)},
                  {"x2", Eigen::Vector2d(0, 3)},
                  {"y1", Eigen::Vector2d(4, 0)},
                  {"y2", Eigen::Vector2d(4, 3)}};
    g.edges = {{0, 2, 0.5}, {1, 3, 0.5}};
    g.sources = {0, 1};
    g.source_mass = {0.5, 0.5};
    g.sinks = {2, 3};
    g.sink_mass = {0.5, 0.5};

    TransportPlan bad = TransportPlan::Zero(2, 2);
    bad(0, 1) = bad(1, 0) = 0.5;
    CHECK(compatibility_check(g, bad).max_zero_violation == doctest::Approx(0.5));
    CHECK_THROWS_AS(build_constraints(g, bad), Error);

    CHECK(compatibility_check(g, diag_half()).compatible);
}

TEST_CASE("star polytope has dimension (k-1)(l-1) at positive plans") {
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> unit(0.1, 1.0);
    for (int k = 2; k <= 3; ++k)
        for (int l = 2; l <= 3; ++l) {
            TransportPlan qbar(k, l);
            for (int i = 0; i < k; ++i)
                for (int j = 0; j < l; ++j) qbar(i, j) = unit(rng);
            TransportPath g = star_path(qbar);
            ConstraintSystem cs = build_constraints(g, qbar);
            CHECK(polytope_dimension_rank(cs) == (k - 1) * (l - 1));
            CHECK(polytope_dimension_formula(g) == (k - 1) * (l - 1));
            CHECK(interior_point_test(cs));
        }
}

TEST_CASE("rank dimension equals the formula on random forests") {
    std::mt19937 rng(37);
    for (int trial = 0; trial < 80; ++trial) {
        auto inst = gen::random_forest(rng, 2 + static_cast<int>(rng() % 3),
                                       2 + static_cast<int>(rng() % 3), 6);
        ConstraintSystem cs = build_constraints(inst.path, inst.qbar);
        CHECK(polytope_dimension_rank(cs) == polytope_dimension_formula(inst.path));
    }
}

TEST_CASE("affine hull basis is orthonormal and spans kernel directions") {
    TransportPlan qbar = diag_half();
    TransportPath g = star_path(qbar);
    ConstraintSystem cs = build_constraints(g, qbar);
    Eigen::MatrixXd z = affine_hull_basis(cs);
    REQUIRE(z.cols() == 1);
    CHECK((z.transpose() * z - Eigen::MatrixXd::Identity(1, 1)).norm() < 1e-12);
    CHECK((cs.A * z).norm() < 1e-9);
}

TEST_CASE("boundary reference plan fails the interior test") {
    TransportPlan qbar = diag_half();  // two present routes carry zero mass
    TransportPath g = star_path(qbar);
    ConstraintSystem cs = build_constraints(g, qbar);
    CHECK(polytope_dimension_rank(cs) == 1);
    CHECK_FALSE(interior_point_test(cs));
}

TEST_CASE("zero-dimensional polytopes are vacuously interior") {
    std::mt19937 rng(41);
    auto inst = gen::random_forest(rng, 2, 2, 0);
    while (polytope_dimension_formula(inst.path) != 0) inst = gen::random_forest(rng, 2, 2, 0);
    ConstraintSystem cs = build_constraints(inst.path, inst.qbar);
    CHECK(interior_point_test(cs));
}

TEST_CASE("vertex enumeration of the 2x2 star polytope") {
    TransportPlan qbar = diag_half();
    TransportPath g = star_path(qbar);
    ConstraintSystem cs = build_constraints(g, qbar);
    std::vector<TransportPlan> v = vertices(cs);
    REQUIRE(v.size() == 2);
    // segment endpoints: diag(0.5) and antidiag(0.5)
    bool saw_diag = false, saw_anti = false;
    for (const auto& q : v) {
        if (std::abs(q(0, 0) - 0.5) < 1e-9 && std::abs(q(1, 1) - 0.5) < 1e-9) saw_diag = true;
        if (std::abs(q(0, 1) - 0.5) < 1e-9 && std::abs(q(1, 0) - 0.5) < 1e-9) saw_anti = true;
    }
    CHECK(saw_diag);
    CHECK(saw_anti);
}

TEST_CASE("vertex enumeration respects the dimension cap") {
    std::mt19937 rng(47);
    std::uniform_real_distribution<double> unit(0.1, 1.0);
    TransportPlan qbar(4, 4);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) qbar(i, j) = unit(rng);
    TransportPath g = star_path(qbar);
    ConstraintSystem cs = build_constraints(g, qbar);
    CHECK(polytope_dimension_rank(cs) == 9);
    CHECK_THROWS_AS(vertices(cs, 6), Error);
}

TEST_CASE("pack and unpack are mutually inverse on present routes") {
    std::mt19937 rng(53);
    for (int trial = 0; trial < 20; ++trial) {
        auto inst = gen::random_forest(rng, 2, 3, 3);
        ConstraintSystem cs = build_constraints(inst.path, inst.qbar);
        Eigen::VectorXd x = cs.pack(inst.qbar);
        CHECK((cs.unpack(x) - inst.qbar).norm() < 1e-15);
    }
}
