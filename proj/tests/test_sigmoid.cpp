#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "sdo/blowup_verify.hpp"
#include "sdo/sigmoid.hpp"

using namespace sdo;

TEST_CASE("arctan sigmoid: midpoint, monotonicity, limits") {
    const auto s = SigmoidSpec::arctan();
    CHECK(eval_sigmoid(s, 0.0) == doctest::Approx(0.5));
    double prev = 0.0;
    for (double z = -50.0; z <= 50.0; z += 0.5) {
        const double v = eval_sigmoid(s, z);
        CHECK(v > 0.0);
        CHECK(v < 1.0);
        CHECK(v > prev);
        prev = v;
    }
    CHECK(eval_sigmoid(s, 1e8) == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(eval_sigmoid(s, -1e8) == doctest::Approx(0.0).epsilon(1e-7));
}

TEST_CASE("arctan sigmoid: algebraic tail of order 1 with coefficient 1/pi") {
    const auto s = SigmoidSpec::arctan();
    CHECK(s.k == 1);
    CHECK(s.phiL0 == doctest::Approx(1.0 / M_PI).epsilon(1e-15));
    // z (1 - phi(z)) -> 1/pi and (-z) phi(z) -> 1/pi.
    CHECK(1e7 * (1.0 - eval_sigmoid(s, 1e7)) == doctest::Approx(1.0 / M_PI).epsilon(1e-6));
    CHECK(1e7 * eval_sigmoid(s, -1e7) == doctest::Approx(1.0 / M_PI).epsilon(1e-6));
    // The registered tail decomposition reproduces the direct value far out.
    for (double z : {2e3, 1e5, -3e3, -1e6})
        CHECK(tail_decomposition(s, z) ==
              doctest::Approx(eval_sigmoid(s, z)).epsilon(1e-13));
    CHECK_THROWS_AS(tail_decomposition(s, 10.0), SigmoidError);
}

TEST_CASE("arctan derivative is the Cauchy density") {
    const auto s = SigmoidSpec::arctan();
    for (double z : {-2.0, 0.0, 0.7, 5.0})
        CHECK(eval_sigmoid_derivative(s, z) ==
              doctest::Approx(1.0 / (M_PI * (1.0 + z * z))).epsilon(1e-12));
}

TEST_CASE("Goldbeter-Koshland closed form at eps = 0") {
    const auto s = SigmoidSpec::goldbeter_koshland(0.0);
    for (double z : {-3.0, -0.5, 0.0, 0.5, 3.0}) {
        const double ref = 2.0 / (2.0 - z + std::sqrt(z * z + 4.0));
        CHECK(eval_sigmoid(s, z) == doctest::Approx(ref).epsilon(1e-13));
    }
    CHECK(s.k == 1);
    CHECK(s.phiL0 == doctest::Approx(1.0));
    CHECK(s.has_tails());
    for (double z : {4e3, -4e3})
        CHECK(tail_decomposition(s, z) ==
              doctest::Approx(eval_sigmoid(s, z)).epsilon(1e-12));
    // Positive eps keeps the value form but continuously perturbs it.
    const auto s2 = SigmoidSpec::goldbeter_koshland(0.01);
    CHECK(std::abs(eval_sigmoid(s2, 1.0) - eval_sigmoid(s, 1.0)) < 0.05);
    CHECK(!s2.has_tails());
}

TEST_CASE("Hill family is evaluation-only in the x form") {
    const auto s = SigmoidSpec::hill(4);
    CHECK(s.k == 4);
    CHECK(eval_sigmoid(s, 1.0) == doctest::Approx(0.5));
    CHECK(eval_sigmoid(s, 2.0) == doctest::Approx(16.0 / 17.0));
    CHECK(!s.has_tails());
    CHECK_THROWS_AS(eval_sigmoid(s, -1.0), SigmoidError);
    CHECK_THROWS_AS(tail_decomposition(s, 1e4), SigmoidError);
}

TEST_CASE("order-2 algebraic sigmoid matches its registered tails") {
    const auto s = algebraic_sigmoid_order2();
    CHECK(s.k == 2);
    CHECK(eval_sigmoid(s, 0.0) == doctest::Approx(0.5));
    CHECK(s.phiL0 == doctest::Approx(0.25));
    CHECK(1e8 * (1.0 - eval_sigmoid(s, 1e4)) == doctest::Approx(0.25).epsilon(1e-6));
    for (double z : {3e3, 1e5, -3e3, -1e5})
        CHECK(tail_decomposition(s, z) ==
              doctest::Approx(eval_sigmoid(s, z)).epsilon(1e-12));
}
