#include "sdo/bifurcation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "sdo/io.hpp"
#include "sdo/pws.hpp"

namespace sdo {

namespace {

PlanarField full_field(const ModelParams& p, const SigmoidSpec& spec) {
    return [p, spec](const Eigen::Vector2d& v) {
        return full_vector_field(p, spec, PlanarState::from(v));
    };
}

IntegratorConfig cycle_config() {
    IntegratorConfig cfg;
    cfg.rel_tol = 1e-9;
    cfg.abs_tol = 1e-11;
    return cfg;
}

double cycle_diameter(const LimitCycle& c) {
    double lo_x = 1e300, hi_x = -1e300, lo_y = 1e300, hi_y = -1e300;
    for (const auto& s : c.samples) {
        lo_x = std::min(lo_x, s[0]);
        hi_x = std::max(hi_x, s[0]);
        lo_y = std::min(lo_y, s[1]);
        hi_y = std::max(hi_y, s[1]);
    }
    return std::max(hi_x - lo_x, hi_y - lo_y);
}

// Attracting-cycle search from a seed state: settle onto the attractor, then
// locate the section fixed point. Tiny return-map fixed points (the orbit
// spiralling into a focus that straddles the section) do not count.
std::optional<LimitCycle> attracting_cycle(const PlanarField& field,
                                           const Eigen::Vector2d& seed,
                                           double settle_time) {
    const IntegratorConfig cfg = cycle_config();
    Eigen::Vector2d state = seed;
    if (settle_time > 0.0) {
        const auto tr = integrate<2>(field, seed, 0.0, settle_time, cfg);
        state = tr.y.back();
    }
    const Section sec{{1.0, 0.02}, {1.0, 4.0}, +1};
    auto cyc = find_limit_cycle(field, state, sec, cfg);
    if (!cyc) return std::nullopt;
    if (cyc->stability != CycleStability::Attracting) return std::nullopt;
    if (cycle_diameter(*cyc) < 0.1) return std::nullopt;
    return cyc;
}

std::string stability_string(EquilibriumType t) {
    switch (t) {
        case EquilibriumType::StableNode: return "stable_node";
        case EquilibriumType::StableFocus: return "stable_focus";
        case EquilibriumType::UnstableNode: return "unstable_node";
        case EquilibriumType::UnstableFocus: return "unstable_focus";
        case EquilibriumType::Saddle: return "saddle";
        case EquilibriumType::NonHyperbolic: return "nonhyperbolic";
    }
    return "unknown";
}

} // namespace

std::string BifurcationDiagram::to_csv() const {
    std::string out = "eta,eq_x,eq_y,stability,cycle_max_x,cycle_l2\n";
    for (std::size_t i = 0; i < eta_grid.size(); ++i) {
        const std::string cx =
            cycle_branch[i].found ? format_g17(cycle_branch[i].max_x) : "nan";
        const std::string cl =
            cycle_branch[i].found ? format_g17(cycle_branch[i].l2_norm) : "nan";
        for (const auto& bp : equilibria[i])
            out += csv_row({format_g17(eta_grid[i]), format_g17(bp.z[0]),
                            format_g17(bp.z[1]), stability_string(bp.type), cx, cl});
    }
    return out;
}

std::string BifurcationDiagram::hopf_json() const {
    std::string out = "{\n  \"hopf_points\": [";
    for (std::size_t i = 0; i < hopf_etas.size(); ++i) {
        if (i) out += ", ";
        out += format_g17(hopf_etas[i]);
    }
    out += "]\n}\n";
    return out;
}

BifurcationDiagram sweep_eta(const ModelParams& base, const SigmoidSpec& spec,
                             double eta_min, double eta_max, int n) {
    if (n < 10) throw std::invalid_argument("sweep_eta: n >= 10 required");
    if (!(eta_min < eta_max))
        throw std::invalid_argument("sweep_eta: eta_min < eta_max required");

    BifurcationDiagram d;
    d.eta_grid.resize(n);
    d.equilibria.resize(n);
    d.cycle_branch.resize(n);
    for (int i = 0; i < n; ++i)
        d.eta_grid[i] = eta_min + (eta_max - eta_min) * i / (n - 1.0);

    std::optional<Eigen::Vector2d> warm;
    for (int i = 0; i < n; ++i) {
        const double eta = d.eta_grid[i];
        ModelParams p(base.alpha, base.beta, eta, base.mu, base.eps);
        const PlanarField field = full_field(p, spec);

        // Wide pass, then a fine pass across the switching layer where the
        // Newton basins shrink with eps (the saddle segment lives there).
        auto eqs = find_equilibria(field, {0.02, 0.02}, {3.0, 3.0}, 16);
        for (const auto& eq : find_equilibria(field, {0.9, 0.02}, {1.1, 3.0}, 25)) {
            bool dup = false;
            for (const auto& e : eqs)
                dup = dup || (e.location - eq.location).norm() < 1e-6;
            if (!dup) eqs.push_back(eq);
        }
        for (const auto& eq : eqs)
            d.equilibria[i].push_back({eta, eq.location, eq.classification});

        d.cycle_branch[i].eta = eta;
        const Eigen::Vector2d seed = warm ? *warm : Eigen::Vector2d(1.0, 2.0);
        const double settle = warm ? 0.0 : 200.0;
        if (auto cyc = attracting_cycle(field, seed, settle)) {
            d.cycle_branch[i].found = true;
            d.cycle_branch[i].max_x = cyc->max_x;
            d.cycle_branch[i].l2_norm = cyc->l2_norm;
            warm = cyc->samples.front();
        } else {
            warm.reset();
        }
    }

    d.hopf_etas = detect_hopf_on_branch(base, spec, eta_min, eta_max, n);
    return d;
}

RegimeVerdict classify_regime(double eps, double mu1, double eta1,
                              const GammaVector& gamma, const HetCurve& het,
                              const SigmoidSpec& spec, double tol) {
    if (het.mu1_grid.empty() || mu1 > het.mu1_grid.back() + 1e-12)
        throw std::invalid_argument("classify_regime: het curve does not cover mu1");

    RegimeVerdict v;
    v.eps = eps;
    v.mu1 = mu1;
    v.eta1 = eta1;

    // Both connection curves are affine in mu1, so evaluate them directly
    // from the fitted intercept and slope.
    const double etaL_w = het.eta_het0_L + het.slope_L * mu1;
    const double etaR_w = het.eta_het0_R + het.slope_R * mu1;
    v.predicted_exists = mu1 < het.mu1_star && eta1 > etaL_w && eta1 < etaR_w;
    v.inconclusive = std::min(std::abs(eta1 - etaL_w), std::abs(eta1 - etaR_w)) <
                     2.0 * tol;

    const int k = gamma.k;
    const double sk = std::pow(eps, k / (k + 1.0));
    ModelParams p(gamma.alpha, gamma.beta, 1.0 + sk * eta1, sk * mu1, eps);
    const PlanarField field = full_field(p, spec);

    ModelParams p0(gamma.alpha, gamma.beta, 1.0, 0.0, 0.0);
    const auto gamma0 = build_singular_cycle(p0).polyline();

    // Seed the search from the singular cycle's upper corner p^L = (1, 1/alpha).
    const Eigen::Vector2d seed(1.0, 1.0 / gamma.alpha);
    v.hausdorff_to_singular = std::numeric_limits<double>::quiet_NaN();
    v.observed_exists = false;
    if (auto cyc = attracting_cycle(field, seed, 300.0)) {
        v.hausdorff_to_singular = hausdorff_distance(cyc->samples, gamma0);
        // "Near the singular cycle" allows the O(sigma) displacement of the
        // relaxation cycle at moderate eps.
        v.observed_exists = v.hausdorff_to_singular < 0.5;
    }
    v.agree = v.predicted_exists == v.observed_exists;
    return v;
}

MuNegativeReport mu_negative_scenario(const ModelParams& p, const SigmoidSpec& spec,
                                      const std::vector<double>& eps_values) {
    if (!(p.mu < 0.0))
        throw std::invalid_argument("mu_negative_scenario: mu < 0 required");
    const auto [etaR, etaL] = eta_boundaries(p);
    // With mu < 0 the boundary roles swap: eta^L < eta^R and both one-sided
    // nodes are virtual strictly inside the window.
    if (!(p.eta > etaL && p.eta < etaR))
        throw std::invalid_argument(
            "mu_negative_scenario: eta must lie in (1 + mu/alpha, 1 + mu/(alpha+beta))");

    const auto [XL, XR] = pws_fields(p);
    const PlanarField fL = [XL](const Eigen::Vector2d& v) { return XL(v); };
    const PlanarField fR = [XR](const Eigen::Vector2d& v) { return XR(v); };
    const IntegratorConfig cfg = cycle_config();

    // Half-return maps on the switching line x = 1 for the crossing cycle.
    const auto half_return = [&](const PlanarField& f, double y0,
                                 int direction) -> std::pair<double, double> {
        const auto hit = integrate_until_event<2>(
            f, Eigen::Vector2d(1.0, y0), 0.0, 1e3,
            [](const Vec<2>& y) { return y[0] - 1.0; }, direction, cfg, 1e-12);
        if (!hit)
            throw std::runtime_error("mu_negative_scenario: lost the crossing orbit");
        return {hit->second[1], hit->first};
    };
    const auto return_map = [&](double y0) {
        const double y1 = half_return(fR, y0, -1).first; // right arc, x >= 1
        return half_return(fL, y1, +1).first;            // left arc, x <= 1
    };

    // Fixed point by secant iteration, seeded either side of y^L = 1/alpha.
    double a = 0.8 / p.alpha, b = 1.2 / p.alpha;
    double ga = return_map(a) - a, gb = return_map(b) - b;
    double y_star = b;
    for (int it = 0; it < 60; ++it) {
        const double c = b - gb * (b - a) / (gb - ga);
        const double gc = return_map(c) - c;
        a = b; ga = gb;
        b = c; gb = gc;
        y_star = c;
        if (std::abs(gc) < 1e-12) break;
    }
    if (!(std::abs(return_map(y_star) - y_star) < 1e-8))
        throw std::runtime_error("mu_negative_scenario: crossing cycle did not converge");

    MuNegativeReport rep;
    rep.y_star = y_star;

    // Sample the singular crossing cycle: right arc then left arc.
    const auto arc = [&](const PlanarField& f, double y0, int direction) {
        const double T = half_return(f, y0, direction).second;
        const auto tr = integrate<2>(f, Eigen::Vector2d(1.0, y0), 0.0, T, cfg);
        for (const auto& y : tr.y) rep.singular_cycle.push_back(y);
        return tr.y.back()[1];
    };
    const double y_mid = arc(fR, y_star, -1);
    arc(fL, y_mid, +1);

    rep.eps_values = eps_values;
    double prev_h = std::numeric_limits<double>::infinity();
    rep.all_attracting = true;
    rep.hausdorff_decreasing = true;
    for (double eps : eps_values) {
        BlendedPws blend{fL, fR, spec, eps, 1.0};
        const PlanarField f = [blend](const Eigen::Vector2d& v) {
            return blended_field(blend, PlanarState::from(v));
        };
        const auto cyc = attracting_cycle(f, Eigen::Vector2d(1.0, y_star), 100.0);
        if (!cyc) {
            rep.all_attracting = false;
            rep.hausdorff.push_back(std::numeric_limits<double>::quiet_NaN());
            rep.period.push_back(std::numeric_limits<double>::quiet_NaN());
            rep.max_x.push_back(std::numeric_limits<double>::quiet_NaN());
            continue;
        }
        const double h = hausdorff_distance(cyc->samples, rep.singular_cycle);
        rep.hausdorff.push_back(h);
        rep.period.push_back(cyc->period);
        rep.max_x.push_back(cyc->max_x);
        if (!(h < prev_h)) rep.hausdorff_decreasing = false;
        prev_h = h;
    }
    return rep;
}

} // namespace sdo
