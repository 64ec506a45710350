#pragma once
// Dynamics on the two invariant spheres obtained from the second-stage
// blow-up of the fold points of the critical manifold. Everything here works
// with the planar restrictions of the chart vector fields to the sphere
// (radial coordinate rho = 0), where only the tail limits phi^L(0), phi^R(0)
// of the switching function enter. Provides:
//   - a catalog of the sphere equilibria with closed-form locations,
//   - closed-form and numeric Hopf values on the branch of interior
//     equilibria, with the sign of the first Lyapunov coefficient,
//   - heteroclinic shooting between the corner saddle and the
//     semi-hyperbolic corner point, and the induced curve eta1(mu1),
//   - a Melnikov transversality check along the connecting orbit,
//   - fold counting for the delta4-nullcline of the connection chart.
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sdo/geometry.hpp"
#include "sdo/model.hpp"

namespace sdo {

enum class SphereSide { Left, Right };

std::string side_string(SphereSide side);

// Planar vector field of a sphere chart restricted to the invariant sphere
// rho = 0. Coordinate pairs: rbar1 -> (Y, D); deltabar1 -> (r, Y);
// ybar1 / ybar_neg1 -> (r, D).
std::function<Eigen::Vector2d(const Eigen::Vector2d&)> sphere_planar_field(
    SphereSide side, ChartName chart, const GammaVector& gamma, double eta1,
    double mu1);

enum class SphereEqClass {
    Saddle,
    StableNode,
    UnstableNode,
    NonhyperbolicSaddle,
    NonhyperbolicNode,
};

std::string classification_string(SphereEqClass c);

struct SphereEquilibrium {
    std::string label; // one of q_w, q_s, q_f, q_r, a, b, z
    SphereSide side;
    ChartName chart;
    Eigen::Vector2d coords;          // closed form, Newton-refined
    Eigen::Vector2cd eigenvalues;    // of the planar chart Jacobian
    SphereEqClass classification;
};

// All equilibria of the sphere visible in the hyperbolic-direction charts,
// Newton-refined from their closed-form locations; the interior one (z) is
// included only on its side of existence (eta1 < eta1^L resp. > eta1^R).
// Throws if the numeric classification disagrees with the expected one.
std::vector<SphereEquilibrium> catalog_equilibria(SphereSide side,
                                                  const ScaledParams& sp,
                                                  const GammaVector& gamma);

struct HopfResult {
    SphereSide side;
    double eta1_closed_form;   // singular Hopf value of eta1
    double eta1_numeric;       // trace-zero value on the z branch
    double lyapunov_coefficient; // scaled first Lyapunov coefficient
    int lyapunov_sign;         // +1 => subcritical
};

// Hopf bifurcation of the interior equilibrium z at fixed mu1.
HopfResult hopf_value(SphereSide side, double mu1, const GammaVector& gamma);

// Leading-order parametrisations of the local invariant manifolds used as
// shooting seeds. The unstable seed lives in chart rbar1 and returns (Y, D)
// at D = delta1; the center seed lives in chart deltabar1 and returns (r, Y)
// at r = r2.
Eigen::Vector2d local_unstable_seed(SphereSide side, const ScaledParams& sp,
                                    const GammaVector& gamma, double delta1);
Eigen::Vector2d local_center_seed(SphereSide side, const ScaledParams& sp,
                                  const GammaVector& gamma, double r2);

struct ShootResult {
    SphereSide side;
    double mu1 = 0.0;
    double eta1_het = 0.0; // connection value of eta1
    // Connecting orbit sampled along the unstable branch, in the chart used
    // for shooting (ybar_neg1 (r,D) on the left, rbar1 (Y,D) on the right),
    // with time shifted so that t = 0 at the matching section.
    std::vector<double> t;
    std::vector<Eigen::Vector2d> orbit;
};

// Bisection in eta1 on the gap between the unstable manifold of the corner
// saddle q_w and the center-stable manifold of q_r, measured on a fixed
// section transverse to the connection.
ShootResult shoot_heteroclinic(SphereSide side, double mu1,
                               const GammaVector& gamma, double tol = 1e-8);

// Right-side connection value predicted from the left-side problem through
// the parameter duality eta1 -> -eta1, alpha -> 1/(alpha+beta),
// mu1 -> -mu1/(alpha+beta)^2, phi^L(0) -> phi^R(0)/(alpha+beta)^3.
double right_het_via_duality(double mu1, const GammaVector& gamma,
                             double tol = 1e-8);

struct HetCurve {
    std::vector<double> mu1_grid;
    std::vector<double> etaL_het; // eta1_Het^L(mu1)
    std::vector<double> etaR_het; // eta1_Het^R(mu1)
    double eta_het0_L = 0.0;      // intercept eta1_Het^L(0)
    double eta_het0_R = 0.0;      // intercept eta1_Het^R(0)
    double slope_L = 0.0;         // fitted slope, expected 1/alpha
    double slope_R = 0.0;         // fitted slope, expected 1/(alpha+beta)
    double mu1_star = 0.0;        // crossing of the two affine branches
};

HetCurve build_het_curve(const GammaVector& gamma, double mu1_max, int n,
                         double tol = 1e-8);

struct MelnikovResult {
    double integral = 0.0;
    int integral_sign = 0;
    bool integrand_sign_uniform = false;
    bool orbit_monotone = false;
};

// Weighted wedge-product integral measuring the eta1-derivative of the
// section gap along a left-side connecting orbit (chart ybar_neg1).
MelnikovResult melnikov_check(const ShootResult& orbit, const ScaledParams& sp,
                              const GammaVector& gamma);

struct FoldReport {
    int count = 0;                 // 0, 1 or 2 interior folds
    std::vector<double> delta4;    // fold locations
    double delta4_max = 0.0;       // right end delta_{4,0} of the window
};

// Folds of the delta4-nullcline of the left connection chart as a graph over
// r4, counted on (0, delta_{4,0}]. Requires eta1 < eta1^L(mu1).
FoldReport nullcline_folds(const ScaledParams& sp, const GammaVector& gamma);

} // namespace sdo
