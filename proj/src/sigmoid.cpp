#include "sdo/sigmoid.hpp"

namespace sdo {

namespace {

constexpr double kPi = 3.14159265358979323846;

// atan(w)/w, stable near w = 0.
double atan_over_w(double w) {
    if (std::abs(w) < 1e-4) {
        const double w2 = w * w;
        return 1.0 - w2 / 3.0 + w2 * w2 / 5.0;
    }
    return std::atan(w) / w;
}

} // namespace

double gk_psi(double z, double eps) {
    const double s =
        std::sqrt(4.0 + z * z + 2.0 * eps * z * z + 4.0 * eps * z + eps * eps * z * z);
    const double num = 2.0 + eps * s + 2.0 * eps + eps * z + eps * eps * z;
    const double den = (2.0 - z + eps * z + s) * (1.0 + eps);
    if (!(den > 0.0)) throw SigmoidError("Goldbeter-Koshland form undefined at z=" + std::to_string(z));
    return num / den;
}

SigmoidSpec SigmoidSpec::arctan() {
    SigmoidSpec s;
    s.family = SigmoidFamily::Arctan;
    s.k = 1;
    s.phiL0 = 1.0 / kPi;
    s.phiR0 = 1.0 / kPi;
    s.value_fn = [](double z) { return 0.5 + std::atan(z) / kPi; };
    // For w > 0: phi(-1/w) = atan(w)/pi / ... ; both tails reduce to atan(w)/(pi w).
    s.tailL_fn = [](double w) { return atan_over_w(w) / kPi; };
    s.tailR_fn = [](double w) { return atan_over_w(w) / kPi; };
    return s;
}

SigmoidSpec SigmoidSpec::hill(int n) {
    if (n <= 0) throw SigmoidError("Hill exponent must be positive");
    SigmoidSpec s;
    s.family = SigmoidFamily::Hill;
    s.hill_n = n;
    s.k = n;
    // Evaluation-only: H_n(x) = x^n / (1 + x^n) as a function of x >= 0.
    s.value_fn = [n](double x) {
        if (x < 0.0) throw SigmoidError("Hill function requires x >= 0");
        const double xn = std::pow(x, n);
        if (!std::isfinite(xn)) return 1.0 - 0.0; // saturates
        return xn / (1.0 + xn);
    };
    return s; // no tails: the z-form left tail does not exist for this family
}

SigmoidSpec SigmoidSpec::goldbeter_koshland(double eps_gk) {
    if (eps_gk < 0.0) throw SigmoidError("Goldbeter-Koshland scale must be >= 0");
    SigmoidSpec s;
    s.family = SigmoidFamily::GoldbeterKoshland;
    s.eps_gk = eps_gk;
    s.k = 1;
    s.value_fn = [eps_gk](double z) { return gk_psi(z, eps_gk); };
    if (eps_gk == 0.0) {
        // psi(z,0) = 2/(2 - z + sqrt(z^2+4)) has identical left/right tails
        // phiL(w) = phiR(w) = 2/(1 + 2w + sqrt(1 + 4w^2)).
        auto tail = [](double w) { return 2.0 / (1.0 + 2.0 * w + std::sqrt(1.0 + 4.0 * w * w)); };
        s.phiL0 = 1.0;
        s.phiR0 = 1.0;
        s.tailL_fn = tail;
        s.tailR_fn = tail;
    }
    return s;
}

SigmoidSpec SigmoidSpec::custom(std::function<double(double)> value, int k,
                                double phiL0, double phiR0,
                                std::optional<std::function<double(double)>> tailL,
                                std::optional<std::function<double(double)>> tailR) {
    if (!value) throw SigmoidError("custom sigmoid requires a value function");
    if (k <= 0) throw SigmoidError("decay order k must be a positive integer");
    if (!(phiL0 > 0.0) || !(phiR0 > 0.0))
        throw SigmoidError("custom sigmoid requires positive tail coefficients phiL0, phiR0");
    SigmoidSpec s;
    s.family = SigmoidFamily::Custom;
    s.k = k;
    s.phiL0 = phiL0;
    s.phiR0 = phiR0;
    s.value_fn = std::move(value);
    s.tailL_fn = std::move(tailL);
    s.tailR_fn = std::move(tailR);
    return s;
}

double eval_sigmoid(const SigmoidSpec& spec, double z) {
    if (!spec.value_fn) throw SigmoidError("sigmoid has no value function");
    return spec.value_fn(z);
}

double eval_sigmoid_derivative(const SigmoidSpec& spec, double z) {
    if (spec.family == SigmoidFamily::Arctan) {
        constexpr double kPiLocal = 3.14159265358979323846;
        return 1.0 / (kPiLocal * (1.0 + z * z));
    }
    const double h = 1e-6 * std::max(1.0, std::abs(z));
    return (eval_sigmoid(spec, z + h) - eval_sigmoid(spec, z - h)) / (2.0 * h);
}

double tail_decomposition(const SigmoidSpec& spec, double z) {
    if (!spec.has_tails())
        throw SigmoidError("no tail functions registered for this sigmoid family");
    if (std::abs(z) <= kTailValidityZ0)
        throw SigmoidError("tail form requested inside |z| <= Z0");
    if (z < 0.0) {
        const double w = -1.0 / z; // (-z)^{-1}
        return std::pow(-z, -spec.k) * (*spec.tailL_fn)(w);
    }
    const double w = 1.0 / z;
    return 1.0 - std::pow(z, -spec.k) * (*spec.tailR_fn)(w);
}

} // namespace sdo
