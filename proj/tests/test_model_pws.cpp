#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "sdo/model.hpp"
#include "sdo/pws.hpp"

using namespace sdo;

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(ModelParams(1.2, 2.0, 1.0, 0.0, 0.01), ModelError);
    CHECK_THROWS_AS(ModelParams(0.5, 0.4, 1.0, 0.0, 0.01), ModelError);
    CHECK_THROWS_AS(ModelParams(0.5, 2.0, 1.0, 0.0, -0.01), ModelError);
    CHECK_THROWS_AS(GammaVector(0, 0.5, 2.0, 0.3, 0.3), ModelError);
    CHECK_THROWS_AS(GammaVector(1, 0.5, 2.0, -0.3, 0.3), ModelError);
}

TEST_CASE("full field: hand-computed values at the switching point") {
    // At x = 1 the sigmoid argument is 0, so the gain is alpha + beta/2.
    const ModelParams p(0.5, 2.0, 1.1, 0.05, 0.01);
    const auto s = SigmoidSpec::arctan();
    const auto f = full_vector_field(p, s, {1.0, 0.8});
    CHECK(f[0] == doctest::Approx((0.5 + 1.0) * 0.8 - 1.0).epsilon(1e-14));
    CHECK(f[1] == doctest::Approx(1.1 - (0.05 + 0.5 + 1.0) * 0.8).epsilon(1e-14));
}

TEST_CASE("full jacobian agrees with finite differences") {
    const ModelParams p(0.5, 2.0, 1.0, 0.02, 0.0064);
    const auto s = SigmoidSpec::arctan();
    for (const auto& st : {PlanarState{0.99, 1.4}, PlanarState{1.01, 0.5},
                           PlanarState{1.5, 2.0}}) {
        const auto J = full_jacobian(p, s, st);
        const double h = 1e-7;
        const auto fx1 = full_vector_field(p, s, {st.x + h, st.y});
        const auto fx0 = full_vector_field(p, s, {st.x - h, st.y});
        const auto fy1 = full_vector_field(p, s, {st.x, st.y + h});
        const auto fy0 = full_vector_field(p, s, {st.x, st.y - h});
        CHECK(J(0, 0) == doctest::Approx((fx1[0] - fx0[0]) / (2 * h)).epsilon(1e-5));
        CHECK(J(1, 0) == doctest::Approx((fx1[1] - fx0[1]) / (2 * h)).epsilon(1e-5));
        CHECK(J(0, 1) == doctest::Approx((fy1[0] - fy0[0]) / (2 * h)).epsilon(1e-5));
        CHECK(J(1, 1) == doctest::Approx((fy1[1] - fy0[1]) / (2 * h)).epsilon(1e-5));
    }
}

TEST_CASE("the full system is the sigmoid blend of its own linear pieces") {
    const ModelParams p(0.5, 2.0, 1.0, 0.03, 0.01);
    const auto sig = SigmoidSpec::arctan();
    const auto [XL, XR] = pws_fields(p);
    BlendedPws b{[XL](const Eigen::Vector2d& v) { return XL(v); },
                 [XR](const Eigen::Vector2d& v) { return XR(v); },
                 sig, p.eps, 1.0};
    for (double x : {0.7, 0.99, 1.0, 1.02, 1.6})
        for (double y : {0.3, 1.0, 2.2}) {
            const auto lhs = blended_field(b, {x, y});
            const auto rhs = full_vector_field(p, sig, {x, y});
            CHECK(lhs[0] == doctest::Approx(rhs[0]).epsilon(1e-13));
            CHECK(lhs[1] == doctest::Approx(rhs[1]).epsilon(1e-13));
        }
}

TEST_CASE("piecewise-linear structure: asymptotes, boundaries, nodes") {
    const ModelParams p(0.5, 2.0, 1.0, 0.08, 0.0);
    const auto st = pws_structure(p);
    CHECK(st.yL == doctest::Approx(2.0));
    CHECK(st.yR == doctest::Approx(0.4));
    CHECK(st.pL[0] == 1.0);
    CHECK(st.pL[1] == doctest::Approx(2.0));
    CHECK(st.etaL_mu == doctest::Approx(1.0 + 0.08 / 0.5));
    CHECK(st.etaR_mu == doctest::Approx(1.0 + 0.08 / 2.5));
    // Node coordinates solve the one-sided linear systems.
    const auto [XL, XR] = pws_fields(p);
    CHECK(XL(st.zL).norm() < 1e-13);
    CHECK(XR(st.zR).norm() < 1e-13);
    // Eigensolutions are genuine.
    for (const auto& es : st.zL_eigensolutions)
        CHECK((XL.A * es.v - es.lambda * es.v).norm() < 1e-12);
    for (const auto& es : st.zR_eigensolutions)
        CHECK((XR.A * es.v - es.lambda * es.v).norm() < 1e-12);
}

TEST_CASE("node position classification switches at the eta boundaries") {
    auto pos = [](double eta, double mu) {
        return classify_node_position(ModelParams(0.5, 2.0, eta, mu, 0.0));
    };
    // mu = 0.08: eta^L = 1.16, eta^R = 1.032.
    CHECK(pos(1.0, 0.08).first == NodePosition::Real);     // z^L real below eta^L
    CHECK(pos(1.2, 0.08).first == NodePosition::Virtual);  // and virtual above
    CHECK(pos(1.16, 0.08).first == NodePosition::Boundary);
    CHECK(pos(1.0, 0.08).second == NodePosition::Virtual); // z^R virtual below eta^R
    CHECK(pos(1.1, 0.08).second == NodePosition::Real);
}

TEST_CASE("closed-form flow of the linear pieces") {
    const ModelParams p(0.5, 2.0, 1.0, 0.0, 0.0);
    const auto [XL, XR] = pws_fields(p);
    // Flow must satisfy the ODE: compare against a tiny explicit Euler refine.
    const Eigen::Vector2d v0(0.7, 1.4);
    const double t = 0.37;
    const auto vt = XL.flow(t, v0);
    Eigen::Vector2d ref = v0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) ref += (t / n) * XL(ref + 0.5 * (t / n) * XL(ref));
    CHECK((vt - ref).norm() < 1e-9);
}

TEST_CASE("singular cycle closes and stays in the physical strip") {
    const ModelParams p(0.5, 2.0, 1.0, 0.0, 0.0);
    const auto g0 = build_singular_cycle(p);
    CHECK(g0.closure_gap < 1e-7);
    const auto poly = g0.polyline();
    CHECK(poly.size() > 100);
    double max_x = 0.0, min_x = 10.0;
    for (const auto& q : poly) {
        CHECK(q[1] > 0.0);
        max_x = std::max(max_x, q[0]);
        min_x = std::min(min_x, q[0]);
    }
    // Right arc overshoots to max x ~ 1.7-1.9, left arc undershoots to ~ 0.6.
    CHECK(max_x > 1.5);
    CHECK(max_x < 2.0);
    CHECK(min_x < 0.65);
    // gammaR starts at p^L = (1, 2), gammaL starts at p^R = (1, 0.4).
    CHECK(g0.gammaR.front()[1] == doctest::Approx(1.0));
    CHECK(g0.gammaR.front()[2] == doctest::Approx(2.0));
    CHECK(g0.gammaL.front()[1] == doctest::Approx(1.0));
    CHECK(g0.gammaL.front()[2] == doctest::Approx(0.4));
    // CSV export carries both arcs.
    const auto csv = g0.to_csv();
    CHECK(csv.rfind("arc_id,t,x,y", 0) == 0);
}
