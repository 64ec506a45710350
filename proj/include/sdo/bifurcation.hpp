#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "sdo/model.hpp"
#include "sdo/numerics.hpp"
#include "sdo/sphere_analysis.hpp"

namespace sdo {

struct BranchPoint {
    double eta;
    Eigen::Vector2d z;
    EquilibriumType type;
};

struct CyclePoint {
    double eta;
    bool found = false;
    double max_x = std::numeric_limits<double>::quiet_NaN();
    double l2_norm = std::numeric_limits<double>::quiet_NaN();
};

struct BifurcationDiagram {
    std::vector<double> eta_grid;
    // Per grid index: every equilibrium found at that eta.
    std::vector<std::vector<BranchPoint>> equilibria;
    std::vector<double> hopf_etas;
    // Attracting-cycle branch, aligned with eta_grid; found = false marks
    // grid points where the cycle search failed (partial-diagram markers).
    std::vector<CyclePoint> cycle_branch;

    // Columns: eta,eq_x,eq_y,stability,cycle_max_x,cycle_l2 (one row per
    // equilibrium; cycle columns are nan where no attracting cycle exists).
    std::string to_csv() const;
    std::string hopf_json() const;
};

// Sweep the full system in eta on a uniform grid: continue all equilibria,
// bisect Hopf points on the branch, and follow the attracting cycle branch
// where the Poincare shooting converges. Requires n >= 10.
BifurcationDiagram sweep_eta(const ModelParams& base, const SigmoidSpec& spec,
                             double eta_min, double eta_max, int n);

struct RegimeVerdict {
    double eps;
    double mu1;
    double eta1;
    bool predicted_exists;   // mu1 < mu1_star and eta1 inside the connection window
    bool observed_exists;    // attracting cycle found near the singular cycle
    double hausdorff_to_singular; // nan when no cycle was observed
    bool inconclusive;       // eta1 within 2 * tol of a window boundary
    bool agree;
};

// Compare the singular-limit existence prediction (from the heteroclinic
// window) against a direct cycle search in the full system at the matching
// (eta, mu, eps). The observed search is seeded from the singular cycle.
RegimeVerdict classify_regime(double eps, double mu1, double eta1,
                              const GammaVector& gamma, const HetCurve& het,
                              const SigmoidSpec& spec, double tol = 1e-8);

struct MuNegativeReport {
    double y_star;                            // crossing fixed point y on x = 1
    std::vector<Eigen::Vector2d> singular_cycle; // crossing-cycle polyline
    std::vector<double> eps_values;
    std::vector<double> hausdorff;            // per eps, to the singular cycle
    std::vector<double> period;
    std::vector<double> max_x;
    bool all_attracting = false;
    bool hausdorff_decreasing = false;
};

// Existence check for the crossing-cycle scenario with mu < 0 and eta a
// little above 1 + mu/alpha: builds the piecewise-linear crossing cycle from
// the two half-return maps on x = 1 and verifies that the blended system has
// an attracting cycle converging to it as eps decreases.
MuNegativeReport mu_negative_scenario(const ModelParams& p, const SigmoidSpec& spec,
                                      const std::vector<double>& eps_values);

} // namespace sdo
