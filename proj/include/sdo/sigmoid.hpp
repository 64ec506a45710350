#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>

namespace sdo {

// Regularization functions z -> phi(z) in (0,1), strictly increasing, with
// algebraic decay of order k at both infinities:
//   phi(z) = (-z)^{-k} phiL((-z)^{-1})   for z < 0,
//   phi(z) = 1 - z^{-k} phiR(z^{-1})     for z > 0,
// with smooth positive tail functions phiL/phiR on [0, inf).

enum class SigmoidFamily { Arctan, Hill, GoldbeterKoshland, Custom };

struct SigmoidError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// |z| beyond which registered tails are considered valid.
inline constexpr double kTailValidityZ0 = 1e3;

struct SigmoidSpec {
    SigmoidFamily family = SigmoidFamily::Arctan;
    int k = 1;              // algebraic decay order
    double phiL0 = 0.0;     // phiL(0) > 0 when a left tail is registered
    double phiR0 = 0.0;     // phiR(0) > 0 when a right tail is registered
    int hill_n = 0;         // Hill exponent (Hill family only)
    double eps_gk = 0.0;    // second argument of the Goldbeter-Koshland psi

    std::function<double(double)> value_fn;              // z -> phi(z)
    std::optional<std::function<double(double)>> tailL_fn; // w -> phiL(w), w >= 0
    std::optional<std::function<double(double)>> tailR_fn; // w -> phiR(w), w >= 0

    bool has_tails() const { return tailL_fn.has_value() && tailR_fn.has_value(); }

    static SigmoidSpec arctan();
    // Evaluation-only family: argument is the x-coordinate form H_n(x).
    static SigmoidSpec hill(int n);
    // Goldbeter-Koshland via the recentred two-argument form psi(z, eps_gk);
    // tails are registered for the limit function psi(., 0) only.
    static SigmoidSpec goldbeter_koshland(double eps_gk);
    static SigmoidSpec custom(std::function<double(double)> value, int k,
                              double phiL0, double phiR0,
                              std::optional<std::function<double(double)>> tailL = {},
                              std::optional<std::function<double(double)>> tailR = {});
};

// The stable recentred Goldbeter-Koshland function psi(z, eps); psi(z, 0) =
// 2 / (2 - z + sqrt(z^2 + 4)).
double gk_psi(double z, double eps);

double eval_sigmoid(const SigmoidSpec& spec, double z);

// Derivative phi'(z); analytic for Arctan, central finite difference otherwise.
double eval_sigmoid_derivative(const SigmoidSpec& spec, double z);

// Reconstructs phi(z) from the registered tail form; requires |z| > Z0.
double tail_decomposition(const SigmoidSpec& spec, double z);

} // namespace sdo
