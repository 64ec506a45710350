#pragma once

#include <Eigen/Dense>
#include <functional>
#include <stdexcept>

#include "sdo/sigmoid.hpp"

namespace sdo {

struct ModelError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Planar state (x, y): product and substrate concentrations.
struct PlanarState {
    double x = 0.0;
    double y = 0.0;

    Eigen::Vector2d vec() const { return {x, y}; }
    static PlanarState from(const Eigen::Vector2d& v) { return {v[0], v[1]}; }
};

// The five scalars of the full system
//   x' = (alpha + beta phi(eps^{-1}(x-1))) y - x
//   y' = eta - (mu + alpha + beta phi(eps^{-1}(x-1))) y
// subject to alpha in (0,1), alpha + beta > 1.
struct ModelParams {
    double alpha;
    double beta;
    double eta;
    double mu;
    double eps; // regularization scale; 0 is allowed for PWL-limit queries only

    ModelParams(double alpha_, double beta_, double eta_, double mu_, double eps_)
        : alpha(alpha_), beta(beta_), eta(eta_), mu(mu_), eps(eps_) {
        if (!(alpha > 0.0 && alpha < 1.0))
            throw ModelError("alpha must lie in (0,1)");
        if (!(alpha + beta > 1.0))
            throw ModelError("alpha + beta must exceed 1");
        if (!(eps >= 0.0))
            throw ModelError("eps must be >= 0");
    }
};

// The parameter bundle gamma = (k, alpha, beta, phiL(0), phiR(0)) that the
// blow-up analysis depends on.
struct GammaVector {
    int k;
    double alpha;
    double beta;
    double phiL0;
    double phiR0;

    GammaVector(int k_, double alpha_, double beta_, double phiL0_, double phiR0_)
        : k(k_), alpha(alpha_), beta(beta_), phiL0(phiL0_), phiR0(phiR0_) {
        if (k <= 0) throw ModelError("gamma: k must be a positive integer");
        if (!(alpha > 0.0 && alpha < 1.0)) throw ModelError("gamma: alpha must lie in (0,1)");
        if (!(alpha + beta > 1.0)) throw ModelError("gamma: alpha + beta must exceed 1");
        if (!(phiL0 > 0.0 && phiR0 > 0.0)) throw ModelError("gamma: tail coefficients must be positive");
    }

    static GammaVector from(const ModelParams& p, const SigmoidSpec& s) {
        return GammaVector(s.k, p.alpha, p.beta, s.phiL0, s.phiR0);
    }
};

using PlanarField = std::function<Eigen::Vector2d(const Eigen::Vector2d&)>;

// Generic blend X_eps = X^L (1 - phi(eps^{-1}(x-1))) + X^R phi(eps^{-1}(x-1))
// across the switching manifold x = switch_x.
struct BlendedPws {
    PlanarField left_field;
    PlanarField right_field;
    SigmoidSpec sigmoid;
    double eps;
    double switch_x = 1.0;
};

Eigen::Vector2d full_vector_field(const ModelParams& p, const SigmoidSpec& spec,
                                  const PlanarState& s);

// Jacobian of the full field at s (analytic up to phi').
Eigen::Matrix2d full_jacobian(const ModelParams& p, const SigmoidSpec& spec,
                              const PlanarState& s);

Eigen::Vector2d blended_field(const BlendedPws& b, const PlanarState& s);

} // namespace sdo
