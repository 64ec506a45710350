#pragma once

#include <Eigen/Dense>
#include <array>
#include <string>
#include <vector>

#include "sdo/model.hpp"

namespace sdo {

// Affine planar system v' = A v + c with a closed-form flow.
struct LinearPlanarSystem {
    Eigen::Matrix2d A;
    Eigen::Vector2d c;

    Eigen::Vector2d operator()(const Eigen::Vector2d& v) const { return A * v + c; }
    Eigen::Vector2d equilibrium() const { return A.fullPivLu().solve(-c); }
    // exp(A t)(v0 - z) + z, exact up to the matrix exponential.
    Eigen::Vector2d flow(double t, const Eigen::Vector2d& v0) const;
};

struct EigenSolution {
    double lambda;
    Eigen::Vector2d v;
};

// The eps = 0 piecewise-linear data: asymptotes, tangency points, one-sided
// nodes, boundary values eta^{L/R}(mu) and node eigensolutions.
struct PwsStructure {
    double yL;                    // 1/alpha
    double yR;                    // 1/(alpha+beta)
    Eigen::Vector2d pL;           // (1, yL)
    Eigen::Vector2d pR;           // (1, yR)
    Eigen::Vector2d zL;           // left node
    Eigen::Vector2d zR;           // right node
    double etaL_mu;               // 1 + mu/alpha
    double etaR_mu;               // 1 + mu/(alpha+beta)
    std::array<EigenSolution, 2> zL_eigensolutions;
    std::array<EigenSolution, 2> zR_eigensolutions;
};

enum class NodePosition { Real, Boundary, Virtual };

struct SingularCycle {
    // Arc samples as (t, x, y) rows; gammaL is the forward orbit of pR under
    // the x<1 system, gammaR the forward orbit of pL under the x>1 system.
    std::vector<Eigen::Vector3d> gammaL;
    std::vector<Eigen::Vector3d> gammaR;
    double closure_gap;

    std::vector<Eigen::Vector2d> polyline() const; // concatenated (x,y) loop
    std::string to_csv() const;                    // columns: arc_id,t,x,y
};

// left = (alpha y - x, eta - (mu+alpha) y); right with alpha+beta.
std::pair<LinearPlanarSystem, LinearPlanarSystem> pws_fields(const ModelParams& p);

PwsStructure pws_structure(const ModelParams& p);

// (eta^R(mu), eta^L(mu)).
std::pair<double, double> eta_boundaries(const ModelParams& p);

// z^L is real iff eta < eta^L(mu); z^R is real iff eta > eta^R(mu).
std::pair<NodePosition, NodePosition> classify_node_position(const ModelParams& p);

// Singular cycle Gamma_0 at eta = 1, mu = 0 by closed-form integration;
// arcs truncated at node_cutoff from the terminal node, final point replaced
// by the node itself.
SingularCycle build_singular_cycle(const ModelParams& p, int samples_per_arc = 1000,
                                   double node_cutoff = 1e-8);

} // namespace sdo
