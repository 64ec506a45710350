#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "sdo/numerics.hpp"
#include "sdo/ode.hpp"

using namespace sdo;

TEST_CASE("adaptive integrator against the closed-form linear flow") {
    // v' = A v with A = [[0, 1], [-4, 0]]: circular motion at frequency 2.
    auto f = [](const Vec<2>& v) { return Vec<2>(v[1], -4.0 * v[0]); };
    IntegratorConfig cfg;
    cfg.rel_tol = 1e-10;
    cfg.abs_tol = 1e-12;
    const auto tr = integrate<2>(f, Vec<2>(1.0, 0.0), 0.0, 5.0, cfg);
    const Vec<2> ref(std::cos(10.0), -2.0 * std::sin(10.0));
    CHECK((tr.y.back() - ref).norm() < 1e-7);
    CHECK(!tr.used_stiff_stepper);
}

TEST_CASE("implicit fallback integrates a stiff linear problem") {
    // lambda = -1e6 relaxation onto a slow drift.
    auto f = [](const Vec<2>& v) {
        return Vec<2>(-1e6 * (v[0] - v[1]), -0.5 * v[1]);
    };
    IntegratorConfig cfg;
    cfg.rel_tol = 1e-8;
    cfg.abs_tol = 1e-10;
    cfg.force_stiff = true;
    const auto tr = integrate<2>(f, Vec<2>(2.0, 1.0), 0.0, 4.0, cfg);
    CHECK(tr.used_stiff_stepper);
    CHECK(tr.y.back()[1] == doctest::Approx(std::exp(-2.0)).epsilon(1e-4));
    CHECK(tr.y.back()[0] == doctest::Approx(tr.y.back()[1]).epsilon(1e-4));
}

TEST_CASE("trial-step overflow is rejected, not accepted with a NaN error") {
    // Quadratic blow-up: y' = y^2 from y(0) = 1 diverges at t = 1. A huge
    // initial trial step used to overflow the embedded error difference to
    // NaN and slip through acceptance.
    auto f = [](const Vec<1>& v) { return Vec<1>(v[0] * v[0]); };
    IntegratorConfig cfg;
    cfg.rel_tol = 1e-10;
    cfg.abs_tol = 1e-12;
    const auto tr = integrate<1>(f, Vec<1>(1.0), 0.0, 0.9, cfg);
    CHECK(tr.y.back()[0] == doctest::Approx(10.0).epsilon(1e-7));
    for (const auto& y : tr.y) CHECK(y.allFinite());
}

TEST_CASE("event detection finds oriented crossings") {
    auto f = [](const Vec<2>& v) { return Vec<2>(v[1], -v[0]); };
    IntegratorConfig cfg;
    cfg.rel_tol = 1e-11;
    cfg.abs_tol = 1e-13;
    // Start at angle 0; x crosses 0 decreasing at t = pi/2.
    const auto hit = integrate_until_event<2>(
        f, Vec<2>(1.0, 0.0), 0.0, 10.0, [](const Vec<2>& v) { return v[0]; }, -1,
        cfg, 1e-12);
    REQUIRE(hit.has_value());
    CHECK(hit->first == doctest::Approx(M_PI / 2).epsilon(1e-9));
    CHECK(std::abs(hit->second[0]) < 1e-9);
    // Increasing direction: first hit at t = 3 pi / 2.
    const auto hit2 = integrate_until_event<2>(
        f, Vec<2>(1.0, 0.0), 0.0, 10.0, [](const Vec<2>& v) { return v[0]; }, +1,
        cfg, 1e-12);
    REQUIRE(hit2.has_value());
    CHECK(hit2->first == doctest::Approx(3 * M_PI / 2).epsilon(1e-9));
}

TEST_CASE("limit cycle of the Hopf normal form with known multiplier") {
    // r' = r (1 - r^2), theta' = 1: cycle r = 1, period 2 pi; the return-map
    // multiplier is exp(-2 * 2 pi).
    auto f = [](const Eigen::Vector2d& v) {
        const double r2 = v.squaredNorm();
        return Eigen::Vector2d(v[0] * (1.0 - r2) - v[1], v[1] * (1.0 - r2) + v[0]);
    };
    const Section sec{{0.0, 0.0}, {3.0, 0.0}, +1};
    IntegratorConfig cfg;
    cfg.rel_tol = 1e-11;
    cfg.abs_tol = 1e-13;
    const auto cyc = find_limit_cycle(f, Eigen::Vector2d(0.3, 0.0), sec, cfg);
    REQUIRE(cyc.has_value());
    CHECK(cyc->period == doctest::Approx(2 * M_PI).epsilon(1e-8));
    CHECK(cyc->max_x == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(cyc->l2_norm == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(cyc->stability == CycleStability::Attracting);
    CHECK(cyc->multiplier == doctest::Approx(std::exp(-4 * M_PI)).epsilon(1e-2));

    // Reverse time turns the repelling cycle of the negated field into the
    // same geometric object, reported with the forward-time multiplier.
    auto fneg = [&](const Eigen::Vector2d& v) { return Eigen::Vector2d(-f(v)); };
    const auto rep = find_limit_cycle(fneg, Eigen::Vector2d(0.6, 0.0), sec, cfg, true);
    REQUIRE(rep.has_value());
    CHECK(rep->max_x == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(rep->stability == CycleStability::Repelling);
}

TEST_CASE("reverse-time search survives finite-time blow-up") {
    // In reverse time every orbit of the Hopf normal form outside r = 1
    // escapes; the search must report failure, not crash.
    auto f = [](const Eigen::Vector2d& v) {
        const double r2 = v.squaredNorm();
        return Eigen::Vector2d(v[0] * (1.0 - r2) - v[1], v[1] * (1.0 - r2) + v[0]);
    };
    const Section sec{{1.5, 0.0}, {5.0, 0.0}, +1};
    const auto none = find_limit_cycle(f, Eigen::Vector2d(2.0, 0.0), sec, {}, true);
    CHECK(!none.has_value());
}

TEST_CASE("equilibrium search and classification") {
    // Pitchfork-like field with equilibria at x = 0, +-1 (y decoupled).
    auto f = [](const Eigen::Vector2d& v) {
        return Eigen::Vector2d(v[0] * (1.0 - v[0] * v[0]), -v[1]);
    };
    const auto eqs = find_equilibria(f, {-2.0, -1.0}, {2.0, 1.0}, 15);
    REQUIRE(eqs.size() == 3);
    int saddles = 0, stable = 0;
    for (const auto& e : eqs) {
        if (e.classification == EquilibriumType::Saddle) ++saddles;
        if (e.stable()) ++stable;
    }
    CHECK(saddles == 1); // x = 0 has eigenvalues {+1, -1}
    CHECK(stable == 2);  // x = +-1 are stable nodes

    Eigen::Matrix2d rot;
    rot << 0.1, -1.0, 1.0, 0.1;
    CHECK(classify_jacobian(rot) == EquilibriumType::UnstableFocus);
    Eigen::Matrix2d node;
    node << -1.0, 0.0, 0.0, -2.0;
    CHECK(classify_jacobian(node) == EquilibriumType::StableNode);
}

TEST_CASE("Hausdorff distance on known polylines") {
    const std::vector<Eigen::Vector2d> sq = {
        {0, 0}, {1, 0}, {1, 1}, {0, 1}, {0, 0}};
    std::vector<Eigen::Vector2d> sq2;
    for (const auto& q : sq) sq2.push_back(q + Eigen::Vector2d(0.0, 0.25));
    CHECK(hausdorff_distance(sq, sq) == doctest::Approx(0.0));
    CHECK(hausdorff_distance(sq, sq2) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(hausdorff_distance(sq2, sq) == doctest::Approx(0.25).epsilon(1e-12));
}
