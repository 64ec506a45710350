#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "sdo/blowup_verify.hpp"
#include "sdo/chart_dynamics.hpp"
#include "sdo/geometry.hpp"

using namespace sdo;

TEST_CASE("scaled parameters invert exactly") {
    for (int k : {1, 2, 3}) {
        const double eps = 0.0064, mu = 0.08, eta = 1.05;
        const auto sp = scale_params_inverse(eps, mu, eta, k);
        CHECK(sp.sigma == doctest::Approx(std::pow(eps, 1.0 / (k + 1))).epsilon(1e-14));
        double e2, m2, h2;
        scale_params(sp, k, e2, m2, h2);
        CHECK(e2 == doctest::Approx(eps).epsilon(1e-13));
        CHECK(m2 == doctest::Approx(mu).epsilon(1e-13));
        CHECK(h2 == doctest::Approx(eta).epsilon(1e-13));
    }
    CHECK_THROWS_AS(scale_params_inverse(0.0, 0.0, 1.0, 1), ChartError);
}

TEST_CASE("chart point construction rejects illegal data") {
    CHECK_THROWS_AS(ChartPoint({Stage::Cylinder1, ChartName::rbar1}, {1, 1, 1}, 1),
                    ChartError);
    CHECK_THROWS_AS(
        ChartPoint({Stage::Cylinder1, ChartName::xbar1}, {-0.1, 1.0, 0.1}, 1),
        ChartError);
    CHECK_THROWS_AS(
        ChartPoint({Stage::SphereL, ChartName::rbar1}, {0.1, 1.0, 0.1}, 0),
        ChartError);
}

TEST_CASE("chart point JSON round-trip") {
    const ChartPoint p({Stage::SphereR, ChartName::ybar_neg1}, {0.125, 2.5, 0.75}, 2);
    const auto q = ChartPoint::from_json(p.to_json());
    CHECK(q.chart == p.chart);
    CHECK(q.k == p.k);
    CHECK((q.coords - p.coords).norm() == 0.0);
}

TEST_CASE("cylinder charts: specific hand values, k = 1") {
    // xbar_neg1 at (r1, y, eps1) = (0.2, 1.5, 0.05): x = 0.8, eps = 0.01.
    const ChartPoint c1({Stage::Cylinder1, ChartName::xbar_neg1}, {0.2, 1.5, 0.05}, 1);
    const auto g1 = cylinder1_to_global(c1);
    CHECK(g1[0] == doctest::Approx(0.8));
    CHECK(g1[1] == doctest::Approx(1.5));
    CHECK(g1[2] == doctest::Approx(0.01));
    // Weighted stage: xbar1 (r3, y3, delta3) = (0.3, 1.0, 0.2): x = 1 + r3^{k+1}.
    const ChartPoint c2({Stage::Cylinder2, ChartName::xbar1}, {0.3, 1.0, 0.2}, 1);
    const auto g2 = cylinder2_to_global(c2);
    CHECK(g2[0] == doctest::Approx(1.09));
    CHECK(g2[2] == doctest::Approx(0.06)); // sigma = r3 delta3
}

TEST_CASE("sphere chart change: K21 hand value, k = 1") {
    // rbar1 (rho1, y1, delta1) -> deltabar1 (delta1 rho1, delta1^{-1}, delta1^{-2} y1).
    const ChartPoint p({Stage::SphereL, ChartName::rbar1}, {0.1, -0.8, 0.5}, 1);
    const auto q = chart_change(p, ChartName::deltabar1);
    CHECK(q.coords[0] == doctest::Approx(0.05));
    CHECK(q.coords[1] == doctest::Approx(2.0));
    CHECK(q.coords[2] == doctest::Approx(-3.2));
    // Changing to the chart itself is the identity.
    const auto r = chart_change(p, ChartName::rbar1);
    CHECK((r.coords - p.coords).norm() == 0.0);
    // K41 requires the y1 < 0 half.
    const ChartPoint bad({Stage::SphereL, ChartName::rbar1}, {0.1, 0.8, 0.5}, 1);
    CHECK_THROWS_AS(chart_change(bad, ChartName::ybar_neg1), ChartError);
}

TEST_CASE("randomized round-trips, cocycle, and pushforward residuals") {
    for (int k : {1, 2}) {
        const auto rep = verify_blowup_geometry(k, 20240817u, 400, 60);
        for (const auto& row : rep.rows) {
            INFO("k=", k, " check=", row.check, " residual=", row.max_residual);
            CHECK(row.pass);
        }
        CHECK(rep.all_pass());
    }
}

TEST_CASE("desingularization factor scales with the radial coordinate") {
    // Stage-1 side charts remove the scale coordinate eps1/eps3; the central
    // chart is already regular.
    const ChartPoint a({Stage::Cylinder1, ChartName::xbar_neg1}, {0.2, 1.0, 0.05}, 1);
    CHECK(desingularization_factor(a) == doctest::Approx(0.05));
    const ChartPoint b({Stage::Cylinder1, ChartName::epsbar1}, {0.5, 1.0, 0.02}, 1);
    CHECK(desingularization_factor(b) == doctest::Approx(1.0));
    // Stage-2 charts remove delta^{k+1}; k = 1 here.
    const ChartPoint c({Stage::Cylinder2, ChartName::xbar_neg1}, {0.3, 1.0, 0.1}, 1);
    CHECK(desingularization_factor(c) == doctest::Approx(0.01));
}

TEST_CASE("sphere fields restrict smoothly to the invariant sphere rho = 0") {
    const GammaVector g(1, 0.5, 2.0, 1.0 / M_PI, 1.0 / M_PI);
    const auto sig = SigmoidSpec::arctan();
    const auto f = sphere_field({Stage::SphereL, ChartName::rbar1}, g, -0.3, 0.1, sig);
    const auto v = f({0.0, -1.2, 0.4});
    CHECK(v.allFinite());
    CHECK(std::abs(v[0]) < 1e-15); // rho = 0 is invariant
}
