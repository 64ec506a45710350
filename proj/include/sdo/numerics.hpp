#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sdo/model.hpp"
#include "sdo/ode.hpp"

namespace sdo {

// Oriented line segment used as a Poincare section. A crossing is registered
// when the orbit passes the supporting line in the direction of the normal
// (rot90(b-a)) with the hit point between the endpoints.
struct Section {
    Eigen::Vector2d a;
    Eigen::Vector2d b;
    int orientation = +1; // +1: cross with increasing side value, -1: decreasing

    Eigen::Vector2d point(double s) const { return a + s * (b - a); }
    // Signed side value, positive on the normal side.
    double side(const Eigen::Vector2d& p) const {
        const Eigen::Vector2d d = b - a;
        const Eigen::Vector2d n(-d[1], d[0]);
        return n.dot(p - a) / d.norm();
    }
    double parameter(const Eigen::Vector2d& p) const {
        const Eigen::Vector2d d = b - a;
        return d.dot(p - a) / d.squaredNorm();
    }
};

enum class EquilibriumType {
    StableNode,
    StableFocus,
    UnstableNode,
    UnstableFocus,
    Saddle,
    NonHyperbolic
};

struct EquilibriumInfo {
    Eigen::Vector2d location;
    Eigen::Matrix2d jacobian;
    Eigen::Vector2cd eigenvalues;
    EquilibriumType classification;

    bool stable() const {
        return classification == EquilibriumType::StableNode ||
               classification == EquilibriumType::StableFocus;
    }
};

enum class CycleStability { Attracting, Repelling };

struct LimitCycle {
    std::vector<double> t;                  // sample times over one period
    std::vector<Eigen::Vector2d> samples;   // ordered states over one period
    double period;
    double max_x;
    double l2_norm;    // sqrt( (1/T) \int |u|^2 dt )
    double multiplier; // nontrivial Floquet multiplier of the forward-time field
    CycleStability stability;
};

// First oriented return of the orbit of `state` to the section.
std::optional<std::pair<Eigen::Vector2d, double>> poincare_return(
    const PlanarField& field, const Section& section, const Eigen::Vector2d& state,
    const IntegratorConfig& cfg = {}, double t_max = 1e4);

// Fixed point of the section return map by damped secant iteration; repelling
// cycles are located by passing reverse_time = true (the field is negated
// internally and the reported multiplier refers to forward time).
std::optional<LimitCycle> find_limit_cycle(const PlanarField& field,
                                           const Eigen::Vector2d& guess_state,
                                           const Section& section,
                                           const IntegratorConfig& cfg = {},
                                           bool reverse_time = false);

std::optional<EquilibriumInfo> refine_equilibrium(
    const PlanarField& field, Eigen::Vector2d guess, double tol = 1e-12);

// Multi-start Newton over a grid in the box [lo, hi], deduplicated.
std::vector<EquilibriumInfo> find_equilibria(const PlanarField& field,
                                             const Eigen::Vector2d& lo,
                                             const Eigen::Vector2d& hi,
                                             int grid = 20, double dedup = 1e-6);

// Hopf detection along the full-system equilibrium branch continued in eta:
// sign changes of the Jacobian trace with positive determinant, bisected to
// eta_tol.
std::vector<double> detect_hopf_on_branch(const ModelParams& base,
                                          const SigmoidSpec& spec, double eta_min,
                                          double eta_max, int n,
                                          double eta_tol = 1e-4);

// Symmetric Hausdorff distance between polylines (distances measured from
// sample points of one curve to the segments of the other).
double hausdorff_distance(const std::vector<Eigen::Vector2d>& A,
                          const std::vector<Eigen::Vector2d>& B);

EquilibriumType classify_jacobian(const Eigen::Matrix2d& J, double tol = 1e-9);

} // namespace sdo
