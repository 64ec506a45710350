#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

namespace sdo {

struct IntegrationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct StepCollapseError : IntegrationError {
    using IntegrationError::IntegrationError;
};

struct IntegratorConfig {
    double rel_tol = 1e-8;
    double abs_tol = 1e-10;
    double max_step = std::numeric_limits<double>::infinity();
    bool stiff_switch = true; // enable the implicit fallback on step collapse
    bool force_stiff = false; // start directly with the implicit stepper
    // Repeated steps below span * 1e-8 normally signal stiffness (or collapse).
    // Callers integrating over very long spans with their own step budgets can
    // switch the heuristic off; the hard floor span * 1e-14 still applies.
    bool tiny_step_guard = true;
};

template <int N>
using Vec = Eigen::Matrix<double, N, 1>;

template <int N>
struct Trajectory {
    std::vector<double> t;
    std::vector<Vec<N>> y;
    bool used_stiff_stepper = false;
};

namespace ode_detail {

// Dormand-Prince 5(4) tableau.
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                        a53 = 64448.0 / 6561, a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
inline constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                        b5 = -2187.0 / 6784, b6 = 11.0 / 84;
inline constexpr double e1 = 35.0 / 384 - 5179.0 / 57600, e3 = 500.0 / 1113 - 7571.0 / 16695,
                        e4 = 125.0 / 192 - 393.0 / 640, e5 = -2187.0 / 6784 + 92097.0 / 339200,
                        e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

} // namespace ode_detail

// One Dormand-Prince 5(4) step from (t, y) with derivative f0 = f(y).
// Returns the 5th-order solution, the embedded error estimate and the
// derivative at the endpoint (FSAL).
template <int N, class F>
void rk45_step(F&& f, const Vec<N>& y, const Vec<N>& f0, double h, Vec<N>& y5,
               Vec<N>& err, Vec<N>& f_end) {
    using namespace ode_detail;
    const Vec<N> k1 = f0;
    const Vec<N> k2 = f(Vec<N>(y + h * (a21 * k1)));
    const Vec<N> k3 = f(Vec<N>(y + h * (a31 * k1 + a32 * k2)));
    const Vec<N> k4 = f(Vec<N>(y + h * (a41 * k1 + a42 * k2 + a43 * k3)));
    const Vec<N> k5 = f(Vec<N>(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)));
    const Vec<N> k6 = f(Vec<N>(y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5)));
    y5 = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const Vec<N> k7 = f(y5);
    err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    f_end = k7;
}

// Cubic Hermite interpolant over one accepted step.
template <int N>
struct HermiteSegment {
    double t0, t1;
    Vec<N> y0, y1, f0, f1;

    Vec<N> eval(double t) const {
        const double h = t1 - t0;
        const double s = (t - t0) / h;
        const double s2 = s * s, s3 = s2 * s;
        return (2 * s3 - 3 * s2 + 1) * y0 + (s3 - 2 * s2 + s) * h * f0 +
               (-2 * s3 + 3 * s2) * y1 + (s3 - s2) * h * f1;
    }
};

// TR-BDF2 (L-stable one-step method) with a damped-Newton inner solve and
// finite-difference Jacobian; used as the stiff fallback.
template <int N, class F>
Vec<N> trbdf2_step(F&& f, const Vec<N>& y, double h) {
    const double gamma = 2.0 - std::sqrt(2.0);
    const Vec<N> nan_state = Vec<N>::Constant(std::numeric_limits<double>::quiet_NaN());
    auto newton_solve = [&](const Vec<N>& base, double coeff, Vec<N> guess) {
        // Solve u - coeff*h*f(u) = base. A diverging or non-converging
        // iteration (typically a too-large trial step whose implicit
        // equation has only spurious far-away roots) is reported as NaN so
        // the step gets rejected instead of silently jumping.
        const Vec<N> anchor = guess;
        bool converged = false;
        for (int it = 0; it < 50; ++it) {
            if (!guess.allFinite() ||
                (guess - anchor).norm() > 50.0 * (1.0 + anchor.norm()))
                return nan_state;
            const Vec<N> r = guess - coeff * h * f(guess) - base;
            if (r.norm() < 1e-14 * (1.0 + guess.norm())) {
                converged = true;
                break;
            }
            Eigen::Matrix<double, N, N> J;
            for (int j = 0; j < N; ++j) {
                const double dj = 1e-7 * std::max(1.0, std::abs(guess[j]));
                Vec<N> gp = guess, gm = guess;
                gp[j] += dj;
                gm[j] -= dj;
                J.col(j) = (gp - coeff * h * f(gp)) - (gm - coeff * h * f(gm));
                J.col(j) /= 2.0 * dj;
            }
            guess -= J.fullPivLu().solve(r);
        }
        return converged ? guess : nan_state;
    };
    const Vec<N> fn = f(y);
    // Trapezoidal stage to t + gamma h.
    const Vec<N> ytr = newton_solve(Vec<N>(y + 0.5 * gamma * h * fn), 0.5 * gamma, Vec<N>(y + gamma * h * fn));
    // BDF2 stage to t + h.
    const double w = 1.0 / (gamma * (2.0 - gamma));
    const double c0 = (1.0 - gamma) * (1.0 - gamma) * w;
    const Vec<N> base = w * ytr - c0 * y;
    return newton_solve(base, (1.0 - gamma) / (2.0 - gamma), ytr);
}

// Adaptive integration of the autonomous field f from t0 to t1. The observer
// is called after each accepted step with the Hermite segment; returning
// false stops the integration early.
template <int N, class F, class Obs>
Trajectory<N> integrate_observed(F&& f, Vec<N> y0, double t0, double t1,
                                 const IntegratorConfig& cfg, Obs&& obs) {
    if (!(cfg.rel_tol > 0.0) || !(cfg.abs_tol > 0.0))
        throw IntegrationError("integration tolerances must be positive");
    Trajectory<N> traj;
    traj.t.push_back(t0);
    traj.y.push_back(y0);

    const double span = t1 - t0;
    double t = t0;
    Vec<N> y = y0;
    Vec<N> fy = f(y);
    double h = std::min(cfg.max_step, std::abs(span) * 1e-3);
    if (!(h > 0)) return traj;
    bool stiff = cfg.force_stiff;
    int tiny_steps = 0;
    const double h_floor = std::abs(span) * 1e-14;

    auto err_norm = [&](const Vec<N>& e, const Vec<N>& ya, const Vec<N>& yb) {
        // An overflowing trial step can leave a finite state but a NaN error
        // estimate (inf - inf in the embedded difference); either way the
        // step must count as rejected, not poison the step-size update.
        if (!e.allFinite())
            return std::numeric_limits<double>::infinity();
        double m = 0.0;
        for (int i = 0; i < N; ++i) {
            const double sc = cfg.abs_tol + cfg.rel_tol * std::max(std::abs(ya[i]), std::abs(yb[i]));
            m = std::max(m, std::abs(e[i]) / sc);
        }
        if (!std::isfinite(m)) m = std::numeric_limits<double>::infinity();
        return m;
    };

    while (t < t1) {
        h = std::min(h, t1 - t);
        Vec<N> ynew, fnew;
        bool accepted = false;
        if (!stiff) {
            Vec<N> err;
            rk45_step(f, y, fy, h, ynew, err, fnew);
            double en = err_norm(err, y, ynew);
            if (!ynew.allFinite()) en = std::numeric_limits<double>::infinity();
            if (en <= 1.0) {
                accepted = true;
            }
            double fac = 0.9 * std::pow(std::max(en, 1e-10), -0.2);
            fac = std::min(5.0, std::max(0.2, fac));
            const double h_used = h;
            h = std::min(cfg.max_step, h * fac);
            if (accepted) {
                if (cfg.tiny_step_guard) {
                    tiny_steps = (h_used < std::abs(span) * 1e-8) ? tiny_steps + 1 : 0;
                    if (tiny_steps > 50) {
                        if (cfg.stiff_switch) {
                            stiff = true;
                            h = std::max(h, std::abs(span) * 1e-6);
                        } else {
                            throw StepCollapseError(
                                "step size collapsed; consider enabling stiff_switch");
                        }
                    }
                }
            } else {
                if (h < h_floor)
                    throw StepCollapseError("step size collapsed below resolution");
                continue;
            }
            if (accepted) {
                HermiteSegment<N> seg{t, t + h_used, y, ynew, fy, fnew};
                t += h_used;
                y = ynew;
                fy = fnew;
                traj.t.push_back(t);
                traj.y.push_back(y);
                if (!obs(seg)) return traj;
            }
        } else {
            traj.used_stiff_stepper = true;
            // Step-doubling error control around the L-stable TR-BDF2 step.
            const Vec<N> y_full = trbdf2_step(f, y, h);
            const Vec<N> y_half = trbdf2_step(f, Vec<N>(trbdf2_step(f, y, 0.5 * h)), 0.5 * h);
            const Vec<N> err = (y_full - y_half) / 3.0;
            double en = err_norm(err, y, y_half);
            if (!y_half.allFinite()) en = std::numeric_limits<double>::infinity();
            const double h_used = h;
            double fac = 0.9 * std::pow(std::max(en, 1e-10), -1.0 / 3.0);
            h = std::min(cfg.max_step, h * std::min(5.0, std::max(0.2, fac)));
            if (en <= 1.0 && y_half.allFinite()) {
                ynew = y_half;
                fnew = f(ynew);
                HermiteSegment<N> seg{t, t + h_used, y, ynew, fy, fnew};
                t += h_used;
                y = ynew;
                fy = fnew;
                traj.t.push_back(t);
                traj.y.push_back(y);
                if (!obs(seg)) return traj;
            } else if (h < h_floor) {
                throw StepCollapseError("implicit step size collapsed below resolution");
            }
        }
    }
    return traj;
}

template <int N, class F>
Trajectory<N> integrate(F&& f, const Vec<N>& y0, double t0, double t1,
                        const IntegratorConfig& cfg = {}) {
    return integrate_observed<N>(std::forward<F>(f), y0, t0, t1, cfg,
                                 [](const HermiteSegment<N>&) { return true; });
}

struct EventHit {
    double t;
    Eigen::VectorXd y;
};

// First root of g(y(t)) = 0 along the orbit with the requested crossing
// direction (+1 increasing, -1 decreasing, 0 either). The crossing time is
// refined on the dense output by bisection to time tolerance t_tol, then the
// state is recomputed by one exact RK step from the preceding grid point.
template <int N, class F, class G>
std::optional<std::pair<double, Vec<N>>> integrate_until_event(
    F&& f, const Vec<N>& y0, double t0, double t_max, G&& g, int direction,
    const IntegratorConfig& cfg = {}, double t_tol = 1e-10,
    const std::function<bool(const Vec<N>&)>& abort_if = nullptr) {
    std::optional<std::pair<double, Vec<N>>> hit;
    double g_prev = g(y0);
    integrate_observed<N>(
        f, y0, t0, t_max, cfg, [&](const HermiteSegment<N>& seg) {
            if (abort_if && abort_if(seg.y1)) return false;
            const double g_new = g(seg.y1);
            const bool crossed = (g_prev <= 0.0 && g_new > 0.0 && direction >= 0) ||
                                 (g_prev >= 0.0 && g_new < 0.0 && direction <= 0);
            const bool genuine = (g_prev != 0.0) || (seg.t0 > t0);
            if (crossed && genuine && g_prev != g_new && g_prev * g_new <= 0.0) {
                double lo = seg.t0, hi = seg.t1;
                // Never demand a tolerance below the floating-point spacing
                // of the crossing time itself.
                const double eff_tol = std::max(
                    t_tol, 8.0 * std::numeric_limits<double>::epsilon() *
                               std::max(std::abs(lo), std::abs(hi)));
                while (hi - lo > eff_tol) {
                    const double mid = 0.5 * (lo + hi);
                    if (mid <= lo || mid >= hi) break;
                    const double gm = g(seg.eval(mid));
                    if ((g_prev <= 0.0 && gm > 0.0) || (g_prev >= 0.0 && gm < 0.0))
                        hi = mid;
                    else
                        lo = mid;
                }
                const double t_star = 0.5 * (lo + hi);
                // Recompute the state at t_star at full integration accuracy.
                Vec<N> y5, err, fe;
                rk45_step(f, seg.y0, seg.f0, t_star - seg.t0, y5, err, fe);
                hit = {t_star, y5};
                return false;
            }
            g_prev = g_new;
            return true;
        });
    return hit;
}

} // namespace sdo
