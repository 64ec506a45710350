#include "sdo/sphere_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "sdo/ode.hpp"

namespace sdo {
namespace {

using Field2 = std::function<Eigen::Vector2d(const Eigen::Vector2d&)>;

double ipow(double x, int n) {
    if (n < 0) return 1.0 / ipow(x, -n);
    double r = 1.0;
    while (n > 0) {
        if (n & 1) r *= x;
        x *= x;
        n >>= 1;
    }
    return r;
}

// Side-dependent constants of the planar sphere dynamics: the restriction to
// the sphere depends on the parameters only through s = sign of the fold
// side, the total slow rate A, the tail weight C = beta * phi(0 limit), and
// the detuning e1 = eta1 - mu1 / A.
struct SideData {
    double s;
    double A;
    double C;
    int k;
    int kk1;
};

SideData side_data(SphereSide side, const GammaVector& g) {
    SideData d;
    d.k = g.k;
    d.kk1 = g.k * (g.k + 1);
    if (side == SphereSide::Left) {
        d.s = -1.0;
        d.A = g.alpha;
        d.C = g.beta * g.phiL0;
    } else {
        d.s = 1.0;
        d.A = g.alpha + g.beta;
        d.C = g.beta * g.phiR0;
    }
    if (!(d.C > 0.0))
        throw std::invalid_argument("sphere_analysis: tail limits must be positive");
    return d;
}

Field2 planar_field(const SideData& d, ChartName chart, double e1) {
    const double s = d.s, A = d.A, C = d.C;
    const int k = d.k, kk1 = d.kk1;
    switch (chart) {
    case ChartName::rbar1:
        return [=](const Eigen::Vector2d& v) {
            const double Y = v[0], D = v[1];
            const double F = -A * Y + s * (C / A) * ipow(D, kk1);
            const double W = 1.0 + s * F;
            return Eigen::Vector2d(F + ipow(D, k) * e1 + W * Y, D * W / k);
        };
    case ChartName::deltabar1:
        return [=](const Eigen::Vector2d& v) {
            const double r = v[0], Y = v[1];
            const double F = -A * Y + s * C / A;
            const double W = ipow(r, k + 1) + s * F;
            return Eigen::Vector2d(-r * W,
                                   ipow(r, k + 1) * (F + ipow(r, k) * e1) - k * Y * W);
        };
    case ChartName::ybar1:
    case ChartName::ybar_neg1: {
        const double e = (chart == ChartName::ybar1) ? 1.0 : -1.0;
        return [=](const Eigen::Vector2d& v) {
            const double r = v[0], D = v[1];
            const double F = -A * e + s * (C / A) * ipow(D, kk1);
            const double W = ipow(r, k + 1) + s * F;
            const double M = F + ipow(r * D, k) * e1;
            return Eigen::Vector2d(
                -r * W / (k + 1) - e * ipow(r, k + 2) * M / (k + 1),
                D * W / (k + 1) - e * D * ipow(r, k + 1) * M / kk1);
        };
    }
    default:
        throw std::invalid_argument("sphere_planar_field: chart is not a sphere chart");
    }
}

Eigen::Matrix2d fd_jacobian(const Field2& f, const Eigen::Vector2d& x) {
    Eigen::Matrix2d J;
    for (int j = 0; j < 2; ++j) {
        const double h = 1e-6 * std::max(1.0, std::abs(x[j]));
        Eigen::Vector2d xp = x, xm = x;
        xp[j] += h;
        xm[j] -= h;
        J.col(j) = (f(xp) - f(xm)) / (2.0 * h);
    }
    return J;
}

Eigen::Vector2cd jacobian_eigenvalues(const Eigen::Matrix2d& J) {
    Eigen::EigenSolver<Eigen::Matrix2d> es(J);
    return es.eigenvalues();
}

// Newton refinement of a closed-form equilibrium (verification step).
Eigen::Vector2d newton_refine(const Field2& f, Eigen::Vector2d x,
                              const std::string& label) {
    for (int it = 0; it < 8; ++it) {
        const Eigen::Vector2d r = f(x);
        if (r.norm() < 1e-13 * (1.0 + x.norm())) break;
        const Eigen::Matrix2d J = fd_jacobian(f, x);
        const Eigen::Vector2d dx = J.fullPivLu().solve(r);
        if (!dx.allFinite())
            throw std::runtime_error("catalog_equilibria: Newton step failed at " + label);
        x -= dx;
    }
    if (f(x).norm() > 1e-9 * (1.0 + x.norm()))
        throw std::runtime_error("catalog_equilibria: closed form for " + label +
                                 " is not an equilibrium");
    return x;
}

SphereEqClass classify_hyperbolic(const Eigen::Vector2cd& ev) {
    const double r0 = ev[0].real(), r1 = ev[1].real();
    if (r0 < 0.0 && r1 < 0.0) return SphereEqClass::StableNode;
    if (r0 > 0.0 && r1 > 0.0) return SphereEqClass::UnstableNode;
    return SphereEqClass::Saddle;
}

// ---------------------------------------------------------------------------
// Heteroclinic shooting.
//
// Both spheres carry the same connection problem between the corner saddle
// q_w and the semi-hyperbolic point q_r. On the left sphere it is shot in
// the chart ybar_neg1 with the section r4 = 0.95 (alpha/(1-alpha))^{1/(k+1)}
// placed just inside q_w; on the right sphere in the charts rbar1/deltabar1
// with the section D = 0.1 placed just outside q_w. The gap is the offset,
// on the section, between the unstable manifold of q_w (integrated forward)
// and the center-stable manifold of q_r (integrated backward).
// ---------------------------------------------------------------------------

enum class GapKind { Value, CaptureC, CaptureU };

struct GapResult {
    GapKind kind = GapKind::Value;
    double gap = 0.0;
};

struct BranchHit {
    bool hit = false;
    bool bounded = false; // no section hit but stayed in the box (capture)
    double t = 0.0;
    Eigen::Vector2d y = Eigen::Vector2d::Zero();
};

BranchHit run_to_section(const Field2& f, const Eigen::Vector2d& y0,
                         int coord, double level, int direction, double t_max,
                         bool stiff = false) {
    IntegratorConfig cfg;
    cfg.rel_tol = 1e-10;
    cfg.abs_tol = 1e-12;
    cfg.stiff_switch = false;
    cfg.tiny_step_guard = false;
    // The center branch rides a slowly drifting center manifold with a fast
    // transverse contraction: explicit steps starve on the contraction rate,
    // so use the implicit stepper, and cap the step so a single implicit
    // step cannot tunnel through the section.
    cfg.force_stiff = stiff;
    if (stiff) cfg.max_step = 1e3;
    long steps = 0;
    bool escaped = false;
    const auto abort_if = std::function<bool(const Vec<2>&)>(
        [&](const Vec<2>& y) {
            ++steps;
            if (steps > 400000 || !y.allFinite()) return true;
            if (y.cwiseAbs().maxCoeff() > 1e3) {
                escaped = true;
                return true;
            }
            return false;
        });
    const auto hit = integrate_until_event<2>(
        f, y0, 0.0, t_max,
        [&](const Vec<2>& y) { return y[coord] - level; }, direction, cfg,
        1e-12, abort_if);
    BranchHit out;
    if (hit) {
        out.hit = true;
        out.t = hit->first;
        out.y = hit->second;
    } else {
        out.bounded = !escaped;
    }
    return out;
}

struct Shooter {
    SphereSide side;
    SideData d;
    double seed;

    // Left-side data.
    double r_qw4 = 0.0, r_sec = 0.0;
    // Right-side data.
    double D_sec = 0.1;

    Shooter(SphereSide side_, const GammaVector& g, double seed_)
        : side(side_), d(side_data(side_, g)), seed(seed_) {
        if (side == SphereSide::Left) {
            r_qw4 = std::pow(g.alpha / (1.0 - g.alpha), 1.0 / (d.k + 1));
            r_sec = 0.95 * r_qw4;
        }
    }

    // Seeds in the hyperbolic charts (rbar1 for the unstable manifold,
    // deltabar1 for the center manifold), expanded to the order used by the
    // local normal form lemmas.
    Eigen::Vector2d seed_unstable(double e1, double h) const {
        if (side == SphereSide::Left) {
            const double B = -(1.0 - d.A) / d.A;
            const double Y = B + ipow(h, d.k) *
                                     (e1 - ipow(h, d.k * d.k) * d.C / (d.A * d.A));
            return {Y, h};
        }
        return {(e1 / d.A) * ipow(h, d.k), h};
    }

    Eigen::Vector2d seed_center(double e1, double h) const {
        if (side == SphereSide::Left) {
            const double Y = -d.C / (d.A * d.A) -
                             (1.0 / d.A) * ipow(h, d.k + 1) *
                                 (1.0 + ipow(h, d.k) * (d.A * d.A / (d.k * d.C)) *
                                            (e1 + h));
            return {h, Y};
        }
        return {h, d.C / (d.A * d.A) + ipow(h, d.k + 1) / d.A};
    }

    // Chart transfer rbar1 -> ybar_neg1 (left, requires Y < 0).
    Eigen::Vector2d rbar_to_yneg(const Eigen::Vector2d& v) const {
        const double Y = v[0], D = v[1];
        if (!(Y < 0.0))
            throw std::runtime_error("shoot_heteroclinic: seed left the chart domain");
        return {std::pow(-Y, -1.0 / (d.k + 1)), std::pow(-Y, -1.0 / d.kk1) * D};
    }
    // Chart transfer deltabar1 -> ybar_neg1 (left, requires Y < 0).
    Eigen::Vector2d delta_to_yneg(const Eigen::Vector2d& v) const {
        const double r = v[0], Y = v[1];
        if (!(Y < 0.0))
            throw std::runtime_error("shoot_heteroclinic: seed left the chart domain");
        return {std::pow(-Y, -1.0 / (d.k + 1)) * r, std::pow(-Y, -1.0 / d.kk1)};
    }

    GapResult gap(double e1, double h) const {
        if (side == SphereSide::Left) {
            const Field2 f = planar_field(d, ChartName::ybar_neg1, e1);
            const Eigen::Vector2d u0 = rbar_to_yneg(seed_unstable(e1, h));
            if (!(u0[0] > r_sec))
                throw std::runtime_error(
                    "shoot_heteroclinic: unstable seed starts below the section");
            const BranchHit u = run_to_section(f, u0, 0, r_sec, -1, 1e6);
            if (!u.hit) {
                if (u.bounded) return {GapKind::CaptureU, 0.0};
                throw std::runtime_error(
                    "shoot_heteroclinic: unstable branch escaped before the section");
            }
            const Field2 fb = [f](const Eigen::Vector2d& v) {
                return Eigen::Vector2d(-f(v));
            };
            const Eigen::Vector2d c0 = delta_to_yneg(seed_center(e1, h));
            const BranchHit c = run_to_section(fb, c0, 0, r_sec, 1, 1e9, true);
            if (!c.hit) {
                if (c.bounded) return {GapKind::CaptureC, 0.0};
                throw std::runtime_error(
                    "shoot_heteroclinic: center branch escaped before the section");
            }
            return {GapKind::Value, u.y[1] - c.y[1]};
        }
        // Right side: unstable branch in rbar1, center branch in deltabar1;
        // the section D = D_sec corresponds to r2 = D_sec^{-k}.
        const Field2 fu = planar_field(d, ChartName::rbar1, e1);
        const BranchHit u = run_to_section(fu, seed_unstable(e1, h), 1, D_sec, 1, 1e6);
        if (!u.hit) {
            if (u.bounded) return {GapKind::CaptureU, 0.0};
            throw std::runtime_error(
                "shoot_heteroclinic: unstable branch escaped before the section");
        }
        const Field2 fc = planar_field(d, ChartName::deltabar1, e1);
        const Field2 fcb = [fc](const Eigen::Vector2d& v) {
            return Eigen::Vector2d(-fc(v));
        };
        const double r2_sec = std::pow(D_sec, -static_cast<double>(d.k));
        const BranchHit c =
            run_to_section(fcb, seed_center(e1, h), 0, r2_sec, 1, 1e9, true);
        if (!c.hit) {
            if (c.bounded) return {GapKind::CaptureC, 0.0};
            throw std::runtime_error(
                "shoot_heteroclinic: center branch escaped before the section");
        }
        const double Yc = std::pow(c.y[0], -(d.k + 1.0)) * c.y[1];
        return {GapKind::Value, u.y[0] - Yc};
    }

    // Root of the gap in the detuning e1 (= eta1 - mu1/A). Brackets are found
    // on a geometric grid of |e1| in [0.05, 5] (widened once if needed); a
    // capture of the center branch by the interior equilibrium or cycle
    // counts as the near-side sign.
    double solve(double tol) const {
        double e_root = std::numeric_limits<double>::quiet_NaN();
        double h = seed;
        double prev = std::numeric_limits<double>::quiet_NaN();
        for (int pass = 0; pass < 4; ++pass, h *= 0.5) {
            e_root = solve_at_seed(h, tol, pass == 0 ? nullptr : &prev);
            if (pass > 0 && std::abs(e_root - prev) <= 10.0 * tol) break;
            prev = e_root;
        }
        return e_root;
    }

    double solve_at_seed(double h, double tol, const double* hint) const {
        const double sgn = (side == SphereSide::Left) ? -1.0 : 1.0;
        double lo_abs = 0.0, hi_abs = 0.0; // |e1| bracket, lo < hi
        int s_deep = 0;                    // sign of the gap at the deep end
        bool bracketed = false;
        if (hint) {
            // Reuse the previous root: the seed refinement only moves it a
            // little.
            const double w = std::max(0.02, 200.0 * tol);
            const double a = std::max(1e-4, std::abs(*hint) - w);
            const double b = std::abs(*hint) + w;
            const GapResult gb = gap(sgn * b, h);
            const GapResult ga = gap(sgn * a, h);
            if (gb.kind == GapKind::Value) {
                s_deep = gb.gap > 0.0 ? 1 : -1;
                const int s_near = (ga.kind == GapKind::Value)
                                       ? (ga.gap > 0.0 ? 1 : -1)
                                       : -s_deep;
                if (s_near != s_deep) {
                    lo_abs = a;
                    hi_abs = b;
                    bracketed = true;
                }
            }
        }
        if (!bracketed) {
            constexpr int m = 13;
            const double emin = 0.05, emax = 5.0;
            double prev_abs = 0.0;
            int prev_sign = 0;
            GapKind prev_kind = GapKind::Value;
            for (int i = m - 1; i >= 0; --i) {
                const double eabs =
                    emin * std::pow(emax / emin, static_cast<double>(i) / (m - 1));
                const GapResult g = gap(sgn * eabs, h);
                if (g.kind == GapKind::CaptureU)
                    throw std::runtime_error(
                        "shoot_heteroclinic: unstable branch captured before the "
                        "section; deepen the bracket");
                int s;
                if (g.kind == GapKind::CaptureC) {
                    if (s_deep == 0)
                        throw std::runtime_error(
                            "shoot_heteroclinic: center branch captured at the deep "
                            "end of the bracket");
                    s = -s_deep;
                } else {
                    s = g.gap > 0.0 ? 1 : -1;
                    if (s_deep == 0) s_deep = s;
                }
                if (prev_sign != 0 && s != prev_sign) {
                    lo_abs = eabs;
                    hi_abs = prev_abs;
                    bracketed = true;
                    break;
                }
                prev_abs = eabs;
                prev_sign = s;
                prev_kind = g.kind;
            }
            (void)prev_kind;
            if (!bracketed)
                throw std::runtime_error(
                    "shoot_heteroclinic: no sign change of the section gap on "
                    "|e1| in [0.05, 5]");
        }
        // lo_abs carries the sign opposite to the deep end.
        double a = lo_abs, b = hi_abs;
        while (b - a > tol) {
            const double mid = 0.5 * (a + b);
            const GapResult g = gap(sgn * mid, h);
            int s;
            if (g.kind == GapKind::CaptureU)
                throw std::runtime_error(
                    "shoot_heteroclinic: unstable branch captured during bisection");
            if (g.kind == GapKind::CaptureC)
                s = -s_deep;
            else
                s = g.gap > 0.0 ? 1 : -1;
            if (s == s_deep)
                b = mid;
            else
                a = mid;
        }
        return sgn * 0.5 * (a + b);
    }
};

double fit_intercept_slope(const std::vector<double>& x,
                           const std::vector<double>& y, double& slope) {
    const int n = static_cast<int>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double det = n * sxx - sx * sx;
    if (n == 1 || std::abs(det) < 1e-300) {
        slope = 0.0;
        return sy / n;
    }
    slope = (n * sxy - sx * sy) / det;
    return (sy * sxx - sx * sxy) / det;
}

} // namespace

std::string side_string(SphereSide side) {
    return side == SphereSide::Left ? "L" : "R";
}

std::string classification_string(SphereEqClass c) {
    switch (c) {
    case SphereEqClass::Saddle: return "saddle";
    case SphereEqClass::StableNode: return "stable_node";
    case SphereEqClass::UnstableNode: return "unstable_node";
    case SphereEqClass::NonhyperbolicSaddle: return "nonhyperbolic_saddle";
    case SphereEqClass::NonhyperbolicNode: return "nonhyperbolic_node";
    }
    return "?";
}

std::function<Eigen::Vector2d(const Eigen::Vector2d&)> sphere_planar_field(
    SphereSide side, ChartName chart, const GammaVector& gamma, double eta1,
    double mu1) {
    const SideData d = side_data(side, gamma);
    return planar_field(d, chart, eta1 - mu1 / d.A);
}

std::vector<SphereEquilibrium> catalog_equilibria(SphereSide side,
                                                  const ScaledParams& sp,
                                                  const GammaVector& gamma) {
    const SideData d = side_data(side, gamma);
    const double e1 = sp.eta1 - sp.mu1 / d.A;
    const double A = d.A, C = d.C;
    const int k = d.k;

    struct Entry {
        std::string label;
        ChartName chart;
        Eigen::Vector2d x;
        SphereEqClass expected;
        bool semi; // one zero eigenvalue expected
    };
    std::vector<Entry> entries;

    if (side == SphereSide::Left) {
        entries.push_back({"q_s", ChartName::rbar1, {0.0, 0.0},
                           SphereEqClass::UnstableNode, false});
        entries.push_back({"q_w", ChartName::rbar1, {-(1.0 - A) / A, 0.0},
                           SphereEqClass::Saddle, false});
    } else {
        entries.push_back({"q_w", ChartName::rbar1, {0.0, 0.0},
                           SphereEqClass::Saddle, false});
        entries.push_back({"q_s", ChartName::rbar1, {-(A - 1.0) / A, 0.0},
                           SphereEqClass::UnstableNode, false});
    }
    entries.push_back({"q_f", ChartName::deltabar1, {0.0, 0.0},
                       SphereEqClass::StableNode, false});
    entries.push_back({"q_r", ChartName::deltabar1, {0.0, d.s * C / (A * A)},
                       d.s * e1 > 0.0 ? SphereEqClass::NonhyperbolicSaddle
                                      : SphereEqClass::NonhyperbolicNode,
                       true});
    entries.push_back({"a", ChartName::ybar1, {0.0, 0.0}, SphereEqClass::Saddle,
                       false});
    entries.push_back({"b", ChartName::ybar_neg1, {0.0, 0.0},
                       SphereEqClass::Saddle, false});
    if (d.s * e1 > 0.0) {
        // Interior equilibrium z on its side of existence.
        const double ae = std::abs(e1);
        const double Yz =
            d.s * (1.0 / A + (C / (A * A)) * std::pow(ae, -(k + 1.0)));
        const double Dz = std::pow(ae, -1.0 / k);
        const double tr =
            (k * C * std::pow(ae, -(k + 1.0)) - A * (1.0 + A)) / A;
        entries.push_back({"z", ChartName::rbar1, {Yz, Dz},
                           tr < 0.0 ? SphereEqClass::StableNode
                                    : SphereEqClass::UnstableNode,
                           false});
    }

    std::vector<SphereEquilibrium> out;
    for (const auto& en : entries) {
        const Field2 f = planar_field(d, en.chart, e1);
        Eigen::Vector2d x = en.x;
        if (!en.semi) x = newton_refine(f, x, en.label);
        const Eigen::Matrix2d J = fd_jacobian(f, x);
        const Eigen::Vector2cd ev = jacobian_eigenvalues(J);
        const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
        SphereEqClass cls;
        if (en.semi) {
            // Expect exactly one (numerically) zero eigenvalue and one
            // positive one; the saddle/node distinction along the center
            // direction is decided by the sign of the detuning.
            const double a0 = std::abs(ev[0]), a1 = std::abs(ev[1]);
            const int zi = a0 < a1 ? 0 : 1;
            if (std::abs(ev[zi]) > 1e-5 * scale || ev[1 - zi].real() < 1e-8)
                throw std::runtime_error(
                    "catalog_equilibria: " + en.label +
                    " is not semi-hyperbolic with an unstable direction");
            cls = en.expected;
        } else {
            const double tr = ev[0].real() + ev[1].real();
            if (std::abs(tr) < 1e-7 * scale && en.label == "z") {
                cls = en.expected; // at the Hopf point the sign is not decidable
            } else {
                cls = classify_hyperbolic(ev);
                if (cls != en.expected)
                    throw std::runtime_error(
                        "catalog_equilibria: classification mismatch at " +
                        en.label + ": expected " +
                        classification_string(en.expected) + ", computed " +
                        classification_string(cls));
            }
        }
        out.push_back({en.label, side, en.chart, x, ev, cls});
    }
    return out;
}

HopfResult hopf_value(SphereSide side, double mu1, const GammaVector& gamma) {
    const SideData d = side_data(side, gamma);
    const double A = d.A, C = d.C;
    const int k = d.k;
    // Closed form: the trace of the interior equilibrium vanishes where
    // |e1|^{k+1} = k C / (A (A + 1)).
    const double ae_h = std::pow(k * C / (A * (1.0 + A)), 1.0 / (k + 1.0));
    const double e_cf = d.s * ae_h;

    const auto z_of = [&](double ae) {
        const double Yz =
            d.s * (1.0 / A + (C / (A * A)) * std::pow(ae, -(k + 1.0)));
        const double Dz = std::pow(ae, -1.0 / k);
        return Eigen::Vector2d(Yz, Dz);
    };
    const auto trace_at = [&](double ae) {
        const Field2 f = planar_field(d, ChartName::rbar1, d.s * ae);
        const Eigen::Matrix2d J = fd_jacobian(f, z_of(ae));
        return J.trace();
    };
    // The trace is decreasing in |e1|; bracket the zero around the closed form.
    double lo = 0.7 * ae_h, hi = 1.4 * ae_h;
    if (!(trace_at(lo) > 0.0 && trace_at(hi) < 0.0))
        throw std::runtime_error("hopf_value: failed to bracket the trace zero");
    while (hi - lo > 1e-12 * ae_h)
        (trace_at(0.5 * (lo + hi)) > 0.0 ? lo : hi) = 0.5 * (lo + hi);
    const double ae_num = 0.5 * (lo + hi);
    const double e_num = d.s * ae_num;

    // First Lyapunov coefficient at the numeric Hopf point (planar normal
    // form; a > 0 means the bifurcating small cycle is repelling, i.e. the
    // Hopf bifurcation is subcritical).
    const Field2 f = planar_field(d, ChartName::rbar1, e_num);
    const Eigen::Vector2d z = z_of(ae_num);
    const Eigen::Matrix2d J = fd_jacobian(f, z);
    const double det = J.determinant();
    if (!(det > 0.0))
        throw std::runtime_error("hopf_value: non-positive determinant at z");
    const double omega = std::sqrt(det);
    // Real eigenbasis putting the linear part into rotation form.
    Eigen::Vector2d re(J(0, 1), -J(0, 0));
    Eigen::Vector2d im(0.0, omega);
    if (re.norm() < 1e-12) {
        re = Eigen::Vector2d(omega, 0.0); // J is already a rotation multiple
        im = Eigen::Vector2d(0.0, omega);
    }
    Eigen::Matrix2d T;
    T.col(0) = re / re.norm();
    T.col(1) = -im / re.norm();
    Eigen::Matrix2d Jt = T.inverse() * J * T;
    if (Jt(1, 0) < 0.0) { // enforce udot = -w v, vdot = +w u orientation
        T.col(1) = -T.col(1);
        Jt = T.inverse() * J * T;
    }
    const Eigen::Matrix2d Tinv = T.inverse();
    const auto Ft = [&](double u, double v) {
        return Eigen::Vector2d(Tinv * f(z + T * Eigen::Vector2d(u, v)));
    };
    const double h = 1e-3 * std::max(1.0, z.cwiseAbs().maxCoeff());
    const auto P = [&](int i, int j) { return Ft(i * h, j * h); };
    const Eigen::Vector2d p10 = P(1, 0), pm10 = P(-1, 0), p01 = P(0, 1),
                          p0m1 = P(0, -1), p11 = P(1, 1), p1m1 = P(1, -1),
                          pm11 = P(-1, 1), pm1m1 = P(-1, -1), p20 = P(2, 0),
                          pm20 = P(-2, 0), p02 = P(0, 2), p0m2 = P(0, -2),
                          p00 = P(0, 0);
    const double h2 = h * h, h3 = h2 * h;
    const auto dxx = [&](int c) { return (p10[c] - 2 * p00[c] + pm10[c]) / h2; };
    const auto dyy = [&](int c) { return (p01[c] - 2 * p00[c] + p0m1[c]) / h2; };
    const auto dxy = [&](int c) {
        return (p11[c] - p1m1[c] - pm11[c] + pm1m1[c]) / (4 * h2);
    };
    const auto dxxx = [&](int c) {
        return (p20[c] - 2 * p10[c] + 2 * pm10[c] - pm20[c]) / (2 * h3);
    };
    const auto dyyy = [&](int c) {
        return (p02[c] - 2 * p01[c] + 2 * p0m1[c] - p0m2[c]) / (2 * h3);
    };
    const auto dxyy = [&](int c) {
        return (p11[c] + p1m1[c] - 2 * p10[c] - pm11[c] - pm1m1[c] + 2 * pm10[c]) /
               (2 * h3);
    };
    const auto dxxy = [&](int c) {
        return (p11[c] + pm11[c] - 2 * p01[c] - p1m1[c] - pm1m1[c] + 2 * p0m1[c]) /
               (2 * h3);
    };
    const double a16 = dxxx(0) + dxyy(0) + dxxy(1) + dyyy(1) +
                       (dxy(0) * (dxx(0) + dyy(0)) - dxy(1) * (dxx(1) + dyy(1)) -
                        dxx(0) * dxx(1) + dyy(0) * dyy(1)) /
                           omega;
    const double lyap = a16 / 16.0;

    HopfResult res;
    res.side = side;
    res.eta1_closed_form = mu1 / A + e_cf;
    res.eta1_numeric = mu1 / A + e_num;
    res.lyapunov_coefficient = lyap;
    res.lyapunov_sign = lyap > 0.0 ? 1 : (lyap < 0.0 ? -1 : 0);
    return res;
}

Eigen::Vector2d local_unstable_seed(SphereSide side, const ScaledParams& sp,
                                    const GammaVector& gamma, double delta1) {
    Shooter sh(side, gamma, delta1);
    return sh.seed_unstable(sp.eta1 - sp.mu1 / sh.d.A, delta1);
}

Eigen::Vector2d local_center_seed(SphereSide side, const ScaledParams& sp,
                                  const GammaVector& gamma, double r2) {
    Shooter sh(side, gamma, r2);
    return sh.seed_center(sp.eta1 - sp.mu1 / sh.d.A, r2);
}

ShootResult shoot_heteroclinic(SphereSide side, double mu1,
                               const GammaVector& gamma, double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("shoot_heteroclinic: tol > 0");
    Shooter sh(side, gamma, 1e-2);
    const double e_star = sh.solve(tol);

    ShootResult res;
    res.side = side;
    res.mu1 = mu1;
    res.eta1_het = mu1 / sh.d.A + e_star;

    // Sample the connecting orbit at the converged detuning: unstable branch
    // up to the section, then the time-reversed center branch beyond it.
    const double h = 1e-2;
    IntegratorConfig cfg;
    cfg.rel_tol = 1e-10;
    cfg.abs_tol = 1e-12;
    cfg.stiff_switch = false;
    cfg.tiny_step_guard = false;
    const bool left = side == SphereSide::Left;
    const Field2 f = left ? planar_field(sh.d, ChartName::ybar_neg1, e_star)
                          : planar_field(sh.d, ChartName::rbar1, e_star);
    const Eigen::Vector2d u0 = left ? sh.rbar_to_yneg(sh.seed_unstable(e_star, h))
                                    : sh.seed_unstable(e_star, h);
    const int coord = left ? 0 : 1;
    const double level = left ? sh.r_sec : sh.D_sec;
    const BranchHit u = run_to_section(f, u0, coord, level, left ? -1 : 1, 1e6);
    if (!u.hit)
        throw std::runtime_error("shoot_heteroclinic: lost the converged orbit");
    const auto utraj = integrate<2>(f, u0, 0.0, u.t, cfg);
    for (std::size_t i = 0; i < utraj.t.size(); ++i) {
        res.t.push_back(utraj.t[i] - u.t);
        res.orbit.push_back(utraj.y[i]);
    }
    // Center branch, backward from its seed to the section, then reversed.
    const Field2 fcchart = left ? f : planar_field(sh.d, ChartName::deltabar1, e_star);
    const Field2 fcb = [fcchart](const Eigen::Vector2d& v) {
        return Eigen::Vector2d(-fcchart(v));
    };
    const Eigen::Vector2d c0 = left ? sh.delta_to_yneg(sh.seed_center(e_star, h))
                                    : sh.seed_center(e_star, h);
    const int ccoord = 0;
    const double clevel = left ? sh.r_sec : std::pow(sh.D_sec, -double(sh.d.k));
    const BranchHit c = run_to_section(fcb, c0, ccoord, clevel, 1, 1e9, true);
    if (!c.hit)
        throw std::runtime_error("shoot_heteroclinic: lost the center branch");
    IntegratorConfig ccfg = cfg;
    ccfg.force_stiff = true;
    ccfg.max_step = 1e3;
    const auto ctraj = integrate<2>(fcb, c0, 0.0, c.t, ccfg);
    for (std::size_t i = ctraj.t.size(); i-- > 0;) {
        Eigen::Vector2d y = ctraj.y[i];
        if (!left) // transfer deltabar1 -> rbar1
            y = Eigen::Vector2d(std::pow(y[0], -(sh.d.k + 1.0)) * y[1],
                                std::pow(y[0], -1.0 / sh.d.k));
        res.t.push_back(c.t - ctraj.t[i]);
        res.orbit.push_back(y);
    }
    return res;
}

double right_het_via_duality(double mu1, const GammaVector& gamma, double tol) {
    const double A = gamma.alpha + gamma.beta;
    if (!(A > 1.0))
        throw std::invalid_argument("right_het_via_duality: needs alpha + beta > 1");
    const double at = 1.0 / A;
    const GammaVector gt(gamma.k, at, gamma.beta, gamma.phiR0 / (A * A * A),
                         gamma.phiR0 / (A * A * A));
    const double mu1t = -mu1 / (A * A);
    return -shoot_heteroclinic(SphereSide::Left, mu1t, gt, tol).eta1_het;
}

HetCurve build_het_curve(const GammaVector& gamma, double mu1_max, int n,
                         double tol) {
    if (n < 2) throw std::invalid_argument("build_het_curve: need n >= 2");
    HetCurve hc;
    for (int i = 0; i < n; ++i) {
        const double mu1 = mu1_max * i / (n - 1);
        hc.mu1_grid.push_back(mu1);
        hc.etaL_het.push_back(
            shoot_heteroclinic(SphereSide::Left, mu1, gamma, tol).eta1_het);
        hc.etaR_het.push_back(
            shoot_heteroclinic(SphereSide::Right, mu1, gamma, tol).eta1_het);
    }
    hc.eta_het0_L = fit_intercept_slope(hc.mu1_grid, hc.etaL_het, hc.slope_L);
    hc.eta_het0_R = fit_intercept_slope(hc.mu1_grid, hc.etaR_het, hc.slope_R);
    if (std::abs(hc.slope_L - hc.slope_R) < 1e-12)
        throw std::runtime_error("build_het_curve: branches do not cross");
    hc.mu1_star = (hc.eta_het0_R - hc.eta_het0_L) / (hc.slope_L - hc.slope_R);
    return hc;
}

MelnikovResult melnikov_check(const ShootResult& orbit, const ScaledParams& sp,
                              const GammaVector& gamma) {
    if (orbit.side != SphereSide::Left)
        throw std::invalid_argument(
            "melnikov_check: expects a left-side connecting orbit");
    if (orbit.t.size() < 8)
        throw std::invalid_argument("melnikov_check: orbit is too short");
    const SideData d = side_data(SphereSide::Left, gamma);
    const double e1 = sp.eta1 - sp.mu1 / d.A;
    const Field2 f = planar_field(d, ChartName::ybar_neg1, e1);
    const int k = d.k, kk1 = d.kk1;
    const auto deta = [&](const Eigen::Vector2d& v) {
        const double r = v[0], D = v[1];
        return Eigen::Vector2d(ipow(r, 2 * k + 2) * ipow(D, k) / (k + 1),
                               ipow(r, 2 * k + 1) * ipow(D, k + 1) / kk1);
    };

    const std::size_t n = orbit.t.size();
    std::vector<double> trdiv(n), wedge(n);
    MelnikovResult res;
    res.orbit_monotone = true;
    double fscale = 0.0;
    std::vector<Eigen::Vector2d> fv(n);
    for (std::size_t i = 0; i < n; ++i) {
        fv[i] = f(orbit.orbit[i]);
        fscale = std::max(fscale, fv[i].cwiseAbs().maxCoeff());
    }
    for (std::size_t i = 0; i < n; ++i) {
        const Eigen::Vector2d& x = orbit.orbit[i];
        trdiv[i] = fd_jacobian(f, x).trace();
        const Eigen::Vector2d de = deta(x);
        wedge[i] = fv[i][0] * de[1] - fv[i][1] * de[0];
        if (fv[i][0] > 1e-10 * fscale || fv[i][1] < -1e-10 * fscale)
            res.orbit_monotone = false;
    }
    if (!res.orbit_monotone)
        throw std::runtime_error(
            "melnikov_check: connecting orbit is not monotone (r decreasing, "
            "delta increasing)");
    // Cumulative divergence integral, zeroed at the section time t = 0.
    std::vector<double> cum(n, 0.0);
    for (std::size_t i = 1; i < n; ++i)
        cum[i] = cum[i - 1] +
                 0.5 * (trdiv[i] + trdiv[i - 1]) * (orbit.t[i] - orbit.t[i - 1]);
    std::size_t j0 = 0;
    for (std::size_t i = 1; i < n; ++i)
        if (std::abs(orbit.t[i]) < std::abs(orbit.t[j0])) j0 = i;
    double integral = 0.0;
    std::vector<double> w(n);
    double wmax = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        w[i] = std::exp(-(cum[i] - cum[j0])) * wedge[i];
        wmax = std::max(wmax, std::abs(w[i]));
    }
    bool has_pos = false, has_neg = false;
    for (std::size_t i = 0; i < n; ++i) {
        if (w[i] > 1e-12 * wmax) has_pos = true;
        if (w[i] < -1e-12 * wmax) has_neg = true;
        if (i > 0) integral += 0.5 * (w[i] + w[i - 1]) * (orbit.t[i] - orbit.t[i - 1]);
    }
    res.integral = integral;
    res.integral_sign = integral > 0.0 ? 1 : (integral < 0.0 ? -1 : 0);
    res.integrand_sign_uniform = !(has_pos && has_neg);
    return res;
}

FoldReport nullcline_folds(const ScaledParams& sp, const GammaVector& gamma) {
    const SideData d = side_data(SphereSide::Left, gamma);
    const double e1 = sp.eta1 - sp.mu1 / d.A;
    if (!(e1 < 0.0))
        throw std::invalid_argument(
            "nullcline_folds: requires eta1 below the left singular value");
    const int k = d.k, kk1 = d.kk1;
    const double A = d.A, C = d.C;
    const double delta40 = std::pow(A * A / C, 1.0 / kk1);
    const double ae = -e1;
    // Fold condition: rhs(delta4) equals the parameter combination c(k, e1),
    // where rhs vanishes at both ends of (0, delta40) and has one interior
    // maximum.
    const double c = k / (std::pow(ae, (k + 1.0) / k) * (2.0 * k + 1.0)) *
                     std::pow(k * (k + 1.0) / (2.0 * k + 1.0), (k + 1.0) / k);
    const auto F4 = [&](double delta) { return A - (C / A) * ipow(delta, kk1); };
    const auto rhs = [&](double delta) {
        const double F = F4(delta);
        return ipow(delta, k + 1) * F /
               std::pow(1.0 + F / k, (2.0 * k + 1.0) / k);
    };
    // Ternary search for the interior maximum.
    double lo = 1e-12 * delta40, hi = delta40;
    for (int it = 0; it < 200; ++it) {
        const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
        if (rhs(m1) < rhs(m2))
            lo = m1;
        else
            hi = m2;
    }
    const double dmax = 0.5 * (lo + hi);
    const double rmax = rhs(dmax);

    FoldReport rep;
    rep.delta4_max = delta40;
    const double tol = 1e-9 * std::max(rmax, c);
    if (rmax < c - tol) {
        rep.count = 0;
        return rep;
    }
    if (std::abs(rmax - c) <= tol) {
        rep.count = 1;
        rep.delta4.push_back(dmax);
        return rep;
    }
    const auto bisect_root = [&](double a, double b) {
        // rhs - c changes sign on [a, b].
        double fa = rhs(a) - c;
        for (int it = 0; it < 200 && b - a > 1e-14 * delta40; ++it) {
            const double m = 0.5 * (a + b);
            const double fm = rhs(m) - c;
            if ((fa <= 0.0) == (fm <= 0.0)) {
                a = m;
                fa = fm;
            } else {
                b = m;
            }
        }
        return 0.5 * (a + b);
    };
    rep.count = 2;
    rep.delta4.push_back(bisect_root(1e-12 * delta40, dmax));
    rep.delta4.push_back(bisect_root(dmax, delta40));
    return rep;
}

} // namespace sdo
