#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>

#include "sdo/sphere_analysis.hpp"

using namespace sdo;

namespace {
const GammaVector g_alpha_half(1, 0.5, 1.0, 1.0 / M_PI, 1.0 / M_PI);
const GammaVector g_beta_two(1, 0.5, 2.0, 1.0 / M_PI, 1.0 / M_PI);

std::map<std::string, SphereEquilibrium> by_label(
    const std::vector<SphereEquilibrium>& v) {
    std::map<std::string, SphereEquilibrium> m;
    for (const auto& e : v) m.emplace(e.label, e);
    return m;
}
} // namespace

TEST_CASE("left-sphere equilibrium catalog against closed forms") {
    // alpha = 0.5, mu1 = 0, eta1 = -1 (detuning e1 = -1), phiL(0) = 1/pi.
    const ScaledParams sp{0.1, -1.0, 0.0};
    const auto cat = by_label(catalog_equilibria(SphereSide::Left, sp, g_alpha_half));
    REQUIRE(cat.size() == 7);

    // Corner points of the hyperbolic chart: q_s at the origin with
    // eigenvalues {alpha, 1}; q_w is a saddle displaced along the Y axis.
    CHECK(cat.at("q_s").coords.norm() < 1e-12);
    CHECK(cat.at("q_s").eigenvalues[0].real() == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(cat.at("q_s").eigenvalues[1].real() == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(cat.at("q_s").classification == SphereEqClass::UnstableNode);

    CHECK(cat.at("q_w").coords[0] == doctest::Approx(-1.0).epsilon(1e-10));
    CHECK(cat.at("q_w").classification == SphereEqClass::Saddle);

    // Fast corner q_f: double eigenvalue -k(k+1) phiL(0) = -2/pi here.
    CHECK(cat.at("q_f").coords.norm() < 1e-12);
    CHECK(cat.at("q_f").eigenvalues[0].real() ==
          doctest::Approx(-2.0 / M_PI).epsilon(1e-9));
    CHECK(cat.at("q_f").classification == SphereEqClass::StableNode);

    // Semi-hyperbolic point q_r: one zero eigenvalue, one k(k+1) phiL(0).
    CHECK(cat.at("q_r").coords[0] == doctest::Approx(0.0));
    CHECK(cat.at("q_r").coords[1] == doctest::Approx(-1.27323954474).epsilon(1e-9));
    CHECK(std::abs(cat.at("q_r").eigenvalues[0].real()) < 1e-9);
    CHECK(cat.at("q_r").eigenvalues[1].real() ==
          doctest::Approx(2.0 / M_PI).epsilon(1e-9));
    CHECK(cat.at("q_r").classification == SphereEqClass::NonhyperbolicSaddle);

    // Equator saddles a, b with eigenvalues +-(k+1)/4-scaled: here +-0.25.
    CHECK(cat.at("a").classification == SphereEqClass::Saddle);
    CHECK(cat.at("b").classification == SphereEqClass::Saddle);
    CHECK(std::abs(std::abs(cat.at("a").eigenvalues[0].real()) - 0.25) < 1e-10);

    // Interior equilibrium z (exists since eta1 < eta1^L): stable focus-type
    // spectrum at this parameter point; stored as stable node class.
    CHECK(cat.at("z").chart == ChartName::rbar1);
    CHECK(cat.at("z").coords[0] == doctest::Approx(-3.27323954474).epsilon(1e-9));
    CHECK(cat.at("z").coords[1] == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(cat.at("z").eigenvalues[0].real() ==
          doctest::Approx(-0.431690113852).epsilon(1e-8));
    CHECK(std::abs(cat.at("z").eigenvalues[0].imag()) ==
          doctest::Approx(0.560038967935).epsilon(1e-8));
    // det = product of the conjugate pair = 0.5 at this point.
    const double det = std::norm(cat.at("z").eigenvalues[0]);
    CHECK(det == doctest::Approx(0.5).epsilon(1e-8));
}

TEST_CASE("right-sphere equilibrium catalog") {
    const ScaledParams sp{0.1, 1.0, 0.0};
    const auto cat = by_label(catalog_equilibria(SphereSide::Right, sp, g_alpha_half));
    REQUIRE(cat.size() == 7);
    // On the right the fast rate is alpha + beta = 1.5.
    CHECK(cat.at("q_s").coords[0] == doctest::Approx(-1.0 / 3.0).epsilon(1e-9));
    CHECK(cat.at("q_f").eigenvalues[0].real() ==
          doctest::Approx(-0.21220659079).epsilon(1e-8));
    CHECK(cat.at("q_r").coords[1] == doctest::Approx(0.141471060526).epsilon(1e-8));
    CHECK(std::abs(std::abs(cat.at("a").eigenvalues[0].real()) - 0.75) < 1e-9);
    CHECK(cat.at("z").coords[0] == doctest::Approx(0.808137727193).epsilon(1e-8));
}

TEST_CASE("singular Hopf value: closed form vs trace-zero continuation") {
    // Left side, k = 1: eta1_H = mu1/alpha - (k C / (alpha (alpha+1)))^{1/2}
    // with C = k (k+1) phiL(0) alpha^2-scaled curvature datum.
    const HopfResult hl = hopf_value(SphereSide::Left, 0.0, g_beta_two);
    CHECK(hl.eta1_closed_form ==
          doctest::Approx(-0.9213177319235613).epsilon(1e-12));
    CHECK(std::abs(hl.eta1_closed_form - hl.eta1_numeric) < 1e-9);
    CHECK(hl.lyapunov_sign == +1); // subcritical on both spheres
    CHECK(hl.lyapunov_coefficient > 0.0);

    const HopfResult hr = hopf_value(SphereSide::Right, 0.0, g_beta_two);
    CHECK(std::abs(hr.eta1_closed_form - hr.eta1_numeric) < 1e-9);
    CHECK(hr.eta1_closed_form > 0.0);
    CHECK(hr.lyapunov_sign == +1);

    // mu1 shifts the closed form affinely with slope 1/alpha (left).
    const HopfResult hl2 = hopf_value(SphereSide::Left, 0.3, g_beta_two);
    CHECK(hl2.eta1_closed_form - hl.eta1_closed_form ==
          doctest::Approx(0.3 / 0.5).epsilon(1e-12));

    // Second tail order k = 2.
    const GammaVector g2(2, 0.5, 2.0, 0.25, 0.25);
    const HopfResult h2 = hopf_value(SphereSide::Left, 0.0, g2);
    CHECK(std::abs(h2.eta1_closed_form - h2.eta1_numeric) < 1e-9);
    CHECK(h2.lyapunov_sign == +1);
}

TEST_CASE("heteroclinic connection values and the parameter duality") {
    const ShootResult left = shoot_heteroclinic(SphereSide::Left, 0.0, g_alpha_half);
    CHECK(left.eta1_het == doctest::Approx(-0.74887956415).epsilon(5e-7));
    CHECK(left.eta1_het < 0.0);
    REQUIRE(left.orbit.size() > 10);

    const ShootResult right = shoot_heteroclinic(SphereSide::Right, 0.0, g_alpha_half);
    CHECK(right.eta1_het == doctest::Approx(0.345741125873).epsilon(5e-7));
    CHECK(right.eta1_het > 0.0);

    // The right-side value must agree with the one predicted by solving the
    // dual left-side problem.
    const double dual = right_het_via_duality(0.0, g_alpha_half);
    CHECK(std::abs(dual - right.eta1_het) < 2e-8);

    SUBCASE("Melnikov transversality along the left connection") {
        const ScaledParams sp{0.1, left.eta1_het, 0.0};
        const MelnikovResult m = melnikov_check(left, sp, g_alpha_half);
        CHECK(m.integral == doctest::Approx(-1.5328081).epsilon(2e-4));
        CHECK(m.integral_sign == -1);
        CHECK(m.integrand_sign_uniform);
        CHECK(m.orbit_monotone);
    }
}

TEST_CASE("folds of the connection-chart nullcline") {
    // At mild detuning the nullcline graph is fold-free; steeper detuning
    // creates exactly two interior folds. Window endpoint sqrt(pi)/2.
    const FoldReport f1 = nullcline_folds({0.1, -1.0, 0.0}, g_alpha_half);
    CHECK(f1.count == 0);
    CHECK(f1.delta4_max == doctest::Approx(std::sqrt(M_PI) / 2).epsilon(1e-9));

    const FoldReport f2 = nullcline_folds({0.1, -2.0, 0.0}, g_alpha_half);
    CHECK(f2.count == 2);
    REQUIRE(f2.delta4.size() == 2);
    CHECK(f2.delta4[0] == doctest::Approx(0.5134224542).epsilon(1e-6));
    CHECK(f2.delta4[1] == doctest::Approx(0.8259377653).epsilon(1e-6));

    const FoldReport f3 = nullcline_folds({0.1, -5.0, 0.0}, g_alpha_half);
    CHECK(f3.count == 2);
}

TEST_CASE("sphere planar fields vanish at catalog equilibria") {
    const ScaledParams sp{0.1, -1.0, 0.0};
    for (const auto& e : catalog_equilibria(SphereSide::Left, sp, g_alpha_half)) {
        const auto f =
            sphere_planar_field(SphereSide::Left, e.chart, g_alpha_half, sp.eta1, sp.mu1);
        CHECK(f(e.coords).norm() < 1e-8);
    }
}
