#pragma once

#include <Eigen/Dense>
#include <functional>

#include "sdo/geometry.hpp"
#include "sdo/model.hpp"
#include "sdo/sigmoid.hpp"

namespace sdo {

using Field3 = std::function<Eigen::Vector3d(const Eigen::Vector3d&)>;

// Desingularized vector field in one chart of the first cylinder blow-up
// (scaling in eps). Chart coordinates as documented in geometry.hpp.
// Parameters (eta, mu) are the original ones.
Field3 cylinder1_field(const ChartId& id, const GammaVector& g, double eta, double mu,
                       const SigmoidSpec& sigmoid);

// Desingularized vector field in one chart of the second (weighted) cylinder
// blow-up. Parameters (eta1, mu1) are the scaled ones.
Field3 cylinder2_field(const ChartId& id, const GammaVector& g, double eta1, double mu1,
                       const SigmoidSpec& sigmoid);

// Desingularized vector field in one directional chart of the sphere blow-up
// at p^L (stage SphereL) or p^R (stage SphereR). One shared implementation
// parameterized by the side; requires a sigmoid with tails.
Field3 sphere_field(const ChartId& id, const GammaVector& g, double eta1, double mu1,
                    const SigmoidSpec& sigmoid);

// The common desingularization factor removed from the chart field, evaluated
// at a chart point: the original field equals (factor) * (pushforward of the
// chart field).
double desingularization_factor(const ChartPoint& cp);

// Max relative residual of |DPhi * (chart field) * factor - original field o Phi|
// over the slow-fast components, with DPhi computed analytically. The original
// field is the (x, y) fast system with eps (stage 1) or scaled parameters
// (stage 2 / spheres) recovered from the chart point.
double pushforward_consistency(const ChartPoint& cp, const GammaVector& g,
                               double eta_or_eta1, double mu_or_mu1,
                               const SigmoidSpec& sigmoid);

} // namespace sdo
