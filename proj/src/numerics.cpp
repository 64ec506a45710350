#include "sdo/numerics.hpp"

#include <algorithm>
#include <cmath>

namespace sdo {

namespace {

// First oriented crossing of the section's supporting line that lands inside
// the segment; continues past out-of-segment line crossings.
std::optional<std::pair<Eigen::Vector2d, double>> next_section_hit(
    const PlanarField& field, const Section& section, Eigen::Vector2d y,
    const IntegratorConfig& cfg, double t_max) {
    auto f = [&](const Eigen::Vector2d& v) { return field(v); };
    auto g = [&](const Eigen::Vector2d& v) { return section.side(v); };
    // A finite-time blow-up (typical for reverse-time searches outside a
    // repelling cycle) simply means the orbit never returns.
    const auto abort_if = std::function<bool(const Vec<2>&)>(
        [](const Vec<2>& v) { return !v.allFinite() || v.cwiseAbs().maxCoeff() > 1e6; });
    double t = 0.0;
    while (t < t_max) {
        std::optional<std::pair<double, Vec<2>>> hit;
        try {
            hit = integrate_until_event<2>(f, y, t, t_max, g, section.orientation,
                                           cfg, 1e-10, abort_if);
        } catch (const StepCollapseError&) {
            return std::nullopt;
        }
        if (!hit) return std::nullopt;
        const double s = section.parameter(hit->second);
        if (s >= 0.0 && s <= 1.0) return {{hit->second, hit->first}};
        t = hit->first;
        y = hit->second;
    }
    return std::nullopt;
}

} // namespace

std::optional<std::pair<Eigen::Vector2d, double>> poincare_return(
    const PlanarField& field, const Section& section, const Eigen::Vector2d& state,
    const IntegratorConfig& cfg, double t_max) {
    return next_section_hit(field, section, state, cfg, t_max);
}

std::optional<LimitCycle> find_limit_cycle(const PlanarField& field,
                                           const Eigen::Vector2d& guess_state,
                                           const Section& section,
                                           const IntegratorConfig& cfg,
                                           bool reverse_time) {
    PlanarField f = field;
    if (reverse_time)
        f = [field](const Eigen::Vector2d& v) { return Eigen::Vector2d(-field(v)); };

    // Land on the section, then settle transients with a few return-map sweeps.
    auto first = next_section_hit(f, section, guess_state, cfg, 1e4);
    if (!first) return std::nullopt;
    double s = section.parameter(first->first);
    auto ret_map = [&](double sv) -> std::optional<double> {
        auto hit = next_section_hit(f, section, section.point(sv), cfg, 1e4);
        if (!hit) return std::nullopt;
        return section.parameter(hit->first);
    };
    for (int i = 0; i < 6; ++i) {
        auto r = ret_map(s);
        if (!r) return std::nullopt;
        if (std::abs(*r - s) < 1e-13) break;
        s = *r;
    }

    // Secant iteration on G(s) = R(s) - s.
    double s0 = s;
    auto g0o = ret_map(s0);
    if (!g0o) return std::nullopt;
    double g0 = *g0o - s0;
    double s1 = *g0o; // next iterate along the contraction
    for (int it = 0; it < 40 && std::abs(g0) > 1e-12; ++it) {
        auto g1o = ret_map(s1);
        if (!g1o) return std::nullopt;
        double g1 = *g1o - s1;
        if (g1 == g0) break;
        double s2 = s1 - g1 * (s1 - s0) / (g1 - g0);
        if (!std::isfinite(s2)) break;
        // Damp wild secant moves.
        if (std::abs(s2 - s1) > 0.5) s2 = s1 + (s2 > s1 ? 0.5 : -0.5);
        s0 = s1;
        g0 = g1;
        s1 = s2;
    }
    const double s_star = s1;
    auto check = ret_map(s_star);
    if (!check || std::abs(*check - s_star) > 1e-7) return std::nullopt;

    // Return-map derivative by one-sided finite difference.
    const double h = 1e-6;
    auto rp = ret_map(s_star + h);
    if (!rp) return std::nullopt;
    const double deriv = (*rp - *check) / h;

    // Collect one period of samples (in the integration direction used).
    LimitCycle cycle;
    const Eigen::Vector2d p0 = section.point(s_star);
    double period = 0.0;
    {
        auto hit = next_section_hit(f, section, p0, cfg, 1e4);
        if (!hit) return std::nullopt;
        period = hit->second;
    }
    auto ode = [&](const Vec<2>& v) -> Vec<2> { return f(v); };
    auto traj = integrate<2>(ode, p0, 0.0, period, cfg);
    cycle.t = traj.t;
    cycle.samples.assign(traj.y.begin(), traj.y.end());
    cycle.period = period;
    if (reverse_time) {
        // Report the cycle in forward time.
        std::reverse(cycle.samples.begin(), cycle.samples.end());
        for (auto& tv : cycle.t) tv = period - tv;
        std::reverse(cycle.t.begin(), cycle.t.end());
    }
    cycle.max_x = 0.0;
    double l2 = 0.0;
    for (size_t i = 0; i < cycle.samples.size(); ++i) {
        cycle.max_x = std::max(cycle.max_x, cycle.samples[i][0]);
        if (i + 1 < cycle.samples.size()) {
            const double dt = std::abs(cycle.t[i + 1] - cycle.t[i]);
            l2 += 0.5 * dt *
                  (cycle.samples[i].squaredNorm() + cycle.samples[i + 1].squaredNorm());
        }
    }
    cycle.l2_norm = std::sqrt(l2 / period);
    cycle.multiplier = reverse_time ? 1.0 / deriv : deriv;
    cycle.stability =
        std::abs(cycle.multiplier) < 1.0 ? CycleStability::Attracting : CycleStability::Repelling;
    return cycle;
}

EquilibriumType classify_jacobian(const Eigen::Matrix2d& J, double tol) {
    const double det = J.determinant();
    const double tr = J.trace();
    const double disc = tr * tr - 4.0 * det;
    if (std::abs(det) < tol) return EquilibriumType::NonHyperbolic;
    if (det < 0.0) return EquilibriumType::Saddle;
    if (std::abs(tr) < tol) return EquilibriumType::NonHyperbolic;
    if (disc < 0.0)
        return tr < 0.0 ? EquilibriumType::StableFocus : EquilibriumType::UnstableFocus;
    return tr < 0.0 ? EquilibriumType::StableNode : EquilibriumType::UnstableNode;
}

std::optional<EquilibriumInfo> refine_equilibrium(const PlanarField& field,
                                                  Eigen::Vector2d guess, double tol) {
    for (int it = 0; it < 60; ++it) {
        const Eigen::Vector2d r = field(guess);
        if (!r.allFinite()) return std::nullopt;
        if (r.norm() < tol) break;
        Eigen::Matrix2d J;
        for (int j = 0; j < 2; ++j) {
            const double d = 1e-7 * std::max(1.0, std::abs(guess[j]));
            Eigen::Vector2d gp = guess, gm = guess;
            gp[j] += d;
            gm[j] -= d;
            J.col(j) = (field(gp) - field(gm)) / (2.0 * d);
        }
        const Eigen::Vector2d step = J.fullPivLu().solve(r);
        if (!step.allFinite()) return std::nullopt;
        guess -= step;
        if (it == 59) return std::nullopt;
    }
    if (field(guess).norm() > 1e-9) return std::nullopt;
    EquilibriumInfo info;
    info.location = guess;
    for (int j = 0; j < 2; ++j) {
        const double d = 1e-7 * std::max(1.0, std::abs(guess[j]));
        Eigen::Vector2d gp = guess, gm = guess;
        gp[j] += d;
        gm[j] -= d;
        info.jacobian.col(j) = (field(gp) - field(gm)) / (2.0 * d);
    }
    info.eigenvalues = info.jacobian.eigenvalues();
    info.classification = classify_jacobian(info.jacobian);
    return info;
}

std::vector<EquilibriumInfo> find_equilibria(const PlanarField& field,
                                             const Eigen::Vector2d& lo,
                                             const Eigen::Vector2d& hi, int grid,
                                             double dedup) {
    std::vector<EquilibriumInfo> found;
    for (int i = 0; i < grid; ++i) {
        for (int j = 0; j < grid; ++j) {
            Eigen::Vector2d start(lo[0] + (hi[0] - lo[0]) * (i + 0.5) / grid,
                                  lo[1] + (hi[1] - lo[1]) * (j + 0.5) / grid);
            auto eq = refine_equilibrium(field, start);
            if (!eq) continue;
            if ((eq->location.array() < lo.array() - 1e-6).any() ||
                (eq->location.array() > hi.array() + 1e-6).any())
                continue;
            bool dup = false;
            for (const auto& e : found)
                if ((e.location - eq->location).norm() < dedup) dup = true;
            if (!dup) found.push_back(*eq);
        }
    }
    std::sort(found.begin(), found.end(), [](const auto& a, const auto& b) {
        return a.location[1] < b.location[1];
    });
    return found;
}

namespace {

// Equilibrium abscissa of the full system at the given eta, by 1D Newton on
// x - (alpha + beta phi) eta / (mu + alpha + beta phi) = 0 with warm start.
std::optional<double> branch_x(const ModelParams& p, const SigmoidSpec& spec,
                               double x0) {
    double x = x0;
    for (int it = 0; it < 80; ++it) {
        const double z = (x - 1.0) / p.eps;
        const double rate = p.alpha + p.beta * eval_sigmoid(spec, z);
        const double g = x - rate * p.eta / (p.mu + rate);
        if (std::abs(g) < 1e-13) return x;
        const double dphi = eval_sigmoid_derivative(spec, z) / p.eps;
        const double drate = p.beta * dphi;
        const double dg = 1.0 - p.eta * drate * p.mu / ((p.mu + rate) * (p.mu + rate));
        const double step = g / dg;
        if (!std::isfinite(step)) return std::nullopt;
        x -= std::clamp(step, -0.05, 0.05);
    }
    return std::nullopt;
}

} // namespace

std::vector<double> detect_hopf_on_branch(const ModelParams& base,
                                          const SigmoidSpec& spec, double eta_min,
                                          double eta_max, int n, double eta_tol) {
    auto trace_at = [&](double eta, double& x_warm) -> std::optional<double> {
        ModelParams p = base;
        p.eta = eta;
        auto x = branch_x(p, spec, x_warm);
        if (!x) return std::nullopt;
        x_warm = *x;
        const double y = eta / (p.mu + p.alpha +
                                p.beta * eval_sigmoid(spec, (*x - 1.0) / p.eps));
        const Eigen::Matrix2d J = full_jacobian(p, spec, {*x, y});
        if (J.determinant() <= 0.0) return std::nullopt;
        return J.trace();
    };

    std::vector<double> hopf;
    double x_warm = eta_min; // exact at mu = 0 and a good start otherwise
    auto prev = trace_at(eta_min, x_warm);
    double eta_prev = eta_min;
    double x_prev = x_warm;
    for (int i = 1; i <= n; ++i) {
        const double eta = eta_min + (eta_max - eta_min) * i / n;
        auto cur = trace_at(eta, x_warm);
        if (prev && cur && (*prev) * (*cur) < 0.0) {
            double lo = eta_prev, hi = eta, xw = x_prev;
            double tlo = *prev;
            while (hi - lo > eta_tol) {
                const double mid = 0.5 * (lo + hi);
                auto tm = trace_at(mid, xw);
                if (!tm) break;
                if (tlo * (*tm) <= 0.0)
                    hi = mid;
                else {
                    lo = mid;
                    tlo = *tm;
                }
            }
            hopf.push_back(0.5 * (lo + hi));
        }
        prev = cur;
        eta_prev = eta;
        x_prev = x_warm;
    }
    return hopf;
}

namespace {

double point_to_polyline(const Eigen::Vector2d& p, const std::vector<Eigen::Vector2d>& poly) {
    double best = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i + 1 < poly.size(); ++i) {
        const Eigen::Vector2d d = poly[i + 1] - poly[i];
        const double len2 = d.squaredNorm();
        double t = len2 > 0.0 ? d.dot(p - poly[i]) / len2 : 0.0;
        t = std::clamp(t, 0.0, 1.0);
        best = std::min(best, (p - (poly[i] + t * d)).norm());
    }
    return best;
}

} // namespace

double hausdorff_distance(const std::vector<Eigen::Vector2d>& A,
                          const std::vector<Eigen::Vector2d>& B) {
    double h = 0.0;
    for (const auto& p : A) h = std::max(h, point_to_polyline(p, B));
    for (const auto& p : B) h = std::max(h, point_to_polyline(p, A));
    return h;
}

} // namespace sdo
