#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

#include "sdo/model.hpp"

namespace sdo {

struct ChartError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Stage { Cylinder1, Cylinder2, SphereL, SphereR };

// Chart labels. Cylinder stages use {xbar_neg1, epsbar1, xbar1}; sphere
// stages use {rbar1, deltabar1, ybar1, ybar_neg1}.
enum class ChartName { xbar_neg1, epsbar1, xbar1, deltabar1, rbar1, ybar1, ybar_neg1 };

struct ChartId {
    Stage stage;
    ChartName name;

    bool operator==(const ChartId&) const = default;
};

bool chart_is_legal(const ChartId& id);
std::string stage_string(Stage s);
std::string chart_name_string(ChartName n);

// A point in one blow-up chart. Coordinate order:
//   Cylinder1 xbar_neg1: (r1, y, eps1); epsbar1: (x2, y, r2); xbar1: (r3, y, eps3)
//   Cylinder2 xbar_neg1: (r1, y1, delta1); deltabar1: (x2, y2, r2);
//             xbar1: (r3, y3, delta3)
//   Sphere    rbar1: (rho1, y1, delta1); deltabar1: (rho2, r2, y2);
//             ybar1: (rho3, r3, delta3); ybar_neg1: (rho4, r4, delta4)
struct ChartPoint {
    ChartId chart;
    Eigen::Vector3d coords;
    int k;

    ChartPoint(ChartId chart_, const Eigen::Vector3d& coords_, int k_);

    std::string to_json() const;
    static ChartPoint from_json(const std::string& json);
};

// Scaled parameters (eps, mu, eta) = (sigma^{k+1}, sigma^k mu1, 1 + sigma^k eta1).
struct ScaledParams {
    double sigma;
    double eta1;
    double mu1;
};

// (eps, mu, eta) from scaled parameters and back.
ScaledParams scale_params_inverse(double eps, double mu, double eta, int k);
void scale_params(const ScaledParams& sp, int k, double& eps, double& mu, double& eta);

// Chart -> global (x, y, eps) for stage Cylinder1.
Eigen::Vector3d cylinder1_to_global(const ChartPoint& cp);
ChartPoint cylinder1_from_global(ChartName name, const Eigen::Vector3d& xye, int k);

// Chart -> global (x, y, sigma) for stage Cylinder2 (weighted charts).
Eigen::Vector3d cylinder2_to_global(const ChartPoint& cp);
ChartPoint cylinder2_from_global(ChartName name, const Eigen::Vector3d& xys, int k);

// Sphere chart -> the cylinder-2 chart it is attached to (xbar_neg1 for
// SphereL at p^L, xbar1 for SphereR at p^R). Needs y^{L/R} from gamma.
ChartPoint sphere_to_cylinder(const ChartPoint& cp, const GammaVector& g);
ChartPoint sphere_from_cylinder(Stage sphere_stage, ChartName name,
                                const ChartPoint& cyl, const GammaVector& g);

// Chart changes between sphere charts of one sphere (K41, K21, K42 and their
// inverses, plus the mirrored ybar1 versions used on the y > 0 side).
ChartPoint chart_change(const ChartPoint& cp, ChartName target);

} // namespace sdo
