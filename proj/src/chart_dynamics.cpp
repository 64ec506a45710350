#include "sdo/chart_dynamics.hpp"

#include <cmath>

namespace sdo {

namespace {

double ipow(double x, int n) {
    double r = 1.0;
    for (int i = 0; i < n; ++i) r *= x;
    return r;
}

void require(bool ok, const char* what) {
    if (!ok) throw ChartError(what);
}

double tail(const SigmoidSpec& s, bool left, double w) {
    require(s.has_tails(), "chart dynamics require a sigmoid with registered tails");
    return left ? (*s.tailL_fn)(w) : (*s.tailR_fn)(w);
}

struct Side {
    double s;    // -1 for SphereL / xbar_neg1, +1 for SphereR / xbar1
    double A;    // alpha (left) or alpha + beta (right)
    bool left;
};

Side side_of(Stage stage, const GammaVector& g) {
    const bool left = stage == Stage::SphereL;
    return {left ? -1.0 : 1.0, left ? g.alpha : g.alpha + g.beta, left};
}

} // namespace

Field3 cylinder1_field(const ChartId& id, const GammaVector& g, double eta, double mu,
                       const SigmoidSpec& sigmoid) {
    require(id.stage == Stage::Cylinder1 && chart_is_legal(id), "invalid Cylinder1 chart");
    const double a = g.alpha, b = g.beta;
    const int k = g.k;
    switch (id.name) {
        case ChartName::xbar_neg1:
            // (r1, y, eps1); rate uses the left tail phi(z) = eps1^k phiL(eps1).
            return [=](const Eigen::Vector3d& v) -> Eigen::Vector3d {
                const double r1 = v[0], y = v[1], e1 = v[2];
                const double rate = a + b * ipow(e1, k) * tail(sigmoid, true, e1);
                const double fast = rate * y - 1.0 + r1;
                return {-r1 * fast, r1 * (eta - (mu + rate) * y), e1 * fast};
            };
        case ChartName::epsbar1:
            // (x2, y, r2); the sigmoid is evaluated directly at x2.
            return [=](const Eigen::Vector3d& v) -> Eigen::Vector3d {
                const double x2 = v[0], y = v[1], r2 = v[2];
                const double rate = a + b * eval_sigmoid(sigmoid, x2);
                return {rate * y - 1.0 - r2 * x2, r2 * (eta - (mu + rate) * y), 0.0};
            };
        case ChartName::xbar1:
            // (r3, y, eps3); rate uses the right tail phi(z) = 1 - eps3^k phiR(eps3).
            return [=](const Eigen::Vector3d& v) -> Eigen::Vector3d {
                const double r3 = v[0], y = v[1], e3 = v[2];
                const double rate = a + b * (1.0 - ipow(e3, k) * tail(sigmoid, false, e3));
                const double fast = rate * y - 1.0 - r3;
                return {r3 * fast, r3 * (eta - (mu + rate) * y), -e3 * fast};
            };
        default: throw ChartError("invalid Cylinder1 chart");
    }
}

Field3 cylinder2_field(const ChartId& id, const GammaVector& g, double eta1, double mu1,
                       const SigmoidSpec& sigmoid) {
    require(id.stage == Stage::Cylinder2 && chart_is_legal(id), "invalid Cylinder2 chart");
    const double a = g.alpha, b = g.beta;
    const int k = g.k;
    switch (id.name) {
        case ChartName::xbar_neg1:
            return [=](const Eigen::Vector3d& v) -> Eigen::Vector3d {
                const double r1 = v[0], y1 = v[1], d1 = v[2];
                const double F1 = 1.0 -
                    (a + b * ipow(d1, k * (k + 1)) * tail(sigmoid, true, ipow(d1, k + 1))) * y1;
                const double G = ipow(r1, k + 1) - F1;
                return {-r1 * G / (k + 1),
                        ipow(r1, k + 1) * (F1 + ipow(r1 * d1, k) * (eta1 - mu1 * y1)),
                        d1 * G / (k + 1)};
            };
        case ChartName::deltabar1:
            return [=](const Eigen::Vector3d& v) -> Eigen::Vector3d {
                const double x2 = v[0], y2 = v[1], r2 = v[2];
                const double F2 = 1.0 - (a + b * eval_sigmoid(sigmoid, x2)) * y2;
                return {-ipow(r2, k + 1) * x2 - F2,
                        ipow(r2, k + 1) * (F2 + ipow(r2, k) * (eta1 - mu1 * y2)), 0.0};
            };
        case ChartName::xbar1:
            return [=](const Eigen::Vector3d& v) -> Eigen::Vector3d {
                const double r3 = v[0], y3 = v[1], d3 = v[2];
                const double F3 = 1.0 -
                    (a + b * (1.0 - ipow(d3, k * (k + 1)) *
                                        tail(sigmoid, false, ipow(d3, k + 1)))) * y3;
                const double G = ipow(r3, k + 1) + F3;
                return {-r3 * G / (k + 1),
                        ipow(r3, k + 1) * (F3 + ipow(r3 * d3, k) * (eta1 - mu1 * y3)),
                        d3 * G / (k + 1)};
            };
        default: throw ChartError("invalid Cylinder2 chart");
    }
}

Field3 sphere_field(const ChartId& id, const GammaVector& g, double eta1, double mu1,
                    const SigmoidSpec& sigmoid) {
    require((id.stage == Stage::SphereL || id.stage == Stage::SphereR) && chart_is_legal(id),
            "invalid sphere chart");
    const Side sd = side_of(id.stage, g);
    const double s = sd.s, A = sd.A, b = g.beta;
    const bool left = sd.left;
    const int k = g.k;
    const int kk1 = k * (k + 1);
    // Shared nonlinearity: the chart form of 1 - (rate) * y after subtracting
    // the blown-up point y^{L/R} = 1/A, rescaled by rho^{k(k+1)}:
    //   F = -A Y + s * beta * D^{k(k+1)} * phi_tail((rho D)^{k+1}) * y_full.
    auto Fs = [=](double rho, double Y, double D, double y_full) {
        return -A * Y +
               s * b * ipow(D, kk1) * tail(sigmoid, left, ipow(rho * D, k + 1)) * y_full;
    };
    switch (id.name) {
        case ChartName::rbar1: // (rho, Y, D)
            return [=](const Eigen::Vector3d& v) -> Eigen::Vector3d {
                const double rho = v[0], Y = v[1], D = v[2];
                const double y_full = 1.0 / A + ipow(rho, kk1) * Y;
                const double F = Fs(rho, Y, D, y_full);
                const double W = 1.0 + s * F;
                return {-rho * W / kk1,
                        F + ipow(D, k) * (eta1 - mu1 * y_full) + W * Y,
                        D * W / k};
            };
        case ChartName::deltabar1: // (rho, r, Y); cylinder delta = rho
            return [=](const Eigen::Vector3d& v) -> Eigen::Vector3d {
                const double rho = v[0], r = v[1], Y = v[2];
                const double y_full = 1.0 / A + ipow(rho, kk1) * Y;
                const double F = Fs(rho, Y, 1.0, y_full);
                const double W = ipow(r, k + 1) + s * F;
                return {rho * W / (k + 1), -r * W,
                        ipow(r, k + 1) * (F + ipow(r, k) * (eta1 - mu1 * y_full)) - k * Y * W};
            };
        case ChartName::ybar1:
        case ChartName::ybar_neg1: { // (rho, r, D) on y = y^{L/R} +/- rho^{k(k+1)}
            const double e = id.name == ChartName::ybar1 ? 1.0 : -1.0;
            return [=](const Eigen::Vector3d& v) -> Eigen::Vector3d {
                const double rho = v[0], r = v[1], D = v[2];
                const double y_full = 1.0 / A + e * ipow(rho, kk1);
                const double F = Fs(rho, e, D, y_full);
                const double W = ipow(r, k + 1) + s * F;
                const double M = F + ipow(r * D, k) * (eta1 - mu1 * y_full);
                return {e * rho * ipow(r, k + 1) * M / kk1,
                        -r * W / (k + 1) - e * ipow(r, k + 2) * M / (k + 1),
                        D * W / (k + 1) - e * D * ipow(r, k + 1) * M / kk1};
            };
        }
        default: throw ChartError("invalid sphere chart");
    }
}

double desingularization_factor(const ChartPoint& cp) {
    const int k = cp.k;
    const auto& c = cp.coords;
    switch (cp.chart.stage) {
        case Stage::Cylinder1:
            if (cp.chart.name == ChartName::epsbar1) return 1.0;
            return c[2]; // eps1 or eps3
        case Stage::Cylinder2:
            if (cp.chart.name == ChartName::deltabar1) return 1.0;
            return ipow(c[2], k + 1); // delta1^{k+1} or delta3^{k+1}
        case Stage::SphereL:
        case Stage::SphereR: {
            // Cylinder factor delta^{k+1} (delta = rho*D, or rho in deltabar1)
            // times the sphere factor rho^{k(k+1)}.
            const double rho = c[0];
            const double delta = cp.chart.name == ChartName::deltabar1 ? rho : rho * c[2];
            return ipow(delta, k + 1) * ipow(rho, k * (k + 1));
        }
    }
    throw ChartError("invalid chart");
}

namespace {

// Each global coordinate of a chart map is affine plus a single monomial:
// base + coef * prod_i coords[i]^{p[i]}. Exact partials follow directly.
struct MonoRow {
    double base = 0.0;
    double coef = 0.0;
    int p[3] = {0, 0, 0};

    double value(const Eigen::Vector3d& c) const {
        double m = coef;
        for (int i = 0; i < 3; ++i) m *= ipow(c[i], p[i]);
        return base + m;
    }
    double partial(const Eigen::Vector3d& c, int i) const {
        if (p[i] == 0) return 0.0;
        double m = coef * p[i] * ipow(c[i], p[i] - 1);
        for (int j = 0; j < 3; ++j)
            if (j != i) m *= ipow(c[j], p[j]);
        return m;
    }
};

struct ChartMap {
    MonoRow rows[3]; // -> (x, y, eps) or (x, y, sigma)
};

ChartMap chart_map(const ChartId& id, const GammaVector& g) {
    const int k = g.k;
    const int kk1 = k * (k + 1);
    ChartMap m;
    switch (id.stage) {
        case Stage::Cylinder1:
            switch (id.name) {
                case ChartName::xbar_neg1: // (r1, y, eps1)
                    m.rows[0] = {1.0, -1.0, {1, 0, 0}};
                    m.rows[1] = {0.0, 1.0, {0, 1, 0}};
                    m.rows[2] = {0.0, 1.0, {1, 0, 1}};
                    return m;
                case ChartName::epsbar1: // (x2, y, r2)
                    m.rows[0] = {1.0, 1.0, {1, 0, 1}};
                    m.rows[1] = {0.0, 1.0, {0, 1, 0}};
                    m.rows[2] = {0.0, 1.0, {0, 0, 1}};
                    return m;
                case ChartName::xbar1: // (r3, y, eps3)
                    m.rows[0] = {1.0, 1.0, {1, 0, 0}};
                    m.rows[1] = {0.0, 1.0, {0, 1, 0}};
                    m.rows[2] = {0.0, 1.0, {1, 0, 1}};
                    return m;
                default: break;
            }
            break;
        case Stage::Cylinder2:
            switch (id.name) {
                case ChartName::xbar_neg1: // (r1, y1, delta1)
                    m.rows[0] = {1.0, -1.0, {k + 1, 0, 0}};
                    m.rows[1] = {0.0, 1.0, {0, 1, 0}};
                    m.rows[2] = {0.0, 1.0, {1, 0, 1}};
                    return m;
                case ChartName::deltabar1: // (x2, y2, r2)
                    m.rows[0] = {1.0, 1.0, {1, 0, k + 1}};
                    m.rows[1] = {0.0, 1.0, {0, 1, 0}};
                    m.rows[2] = {0.0, 1.0, {0, 0, 1}};
                    return m;
                case ChartName::xbar1: // (r3, y3, delta3)
                    m.rows[0] = {1.0, 1.0, {k + 1, 0, 0}};
                    m.rows[1] = {0.0, 1.0, {0, 1, 0}};
                    m.rows[2] = {0.0, 1.0, {1, 0, 1}};
                    return m;
                default: break;
            }
            break;
        case Stage::SphereL:
        case Stage::SphereR: {
            const Side sd = side_of(id.stage, g);
            const double yb = 1.0 / sd.A;
            switch (id.name) {
                case ChartName::rbar1: // (rho, Y, D)
                    m.rows[0] = {1.0, sd.s, {kk1, 0, 0}};
                    m.rows[1] = {yb, 1.0, {kk1, 1, 0}};
                    m.rows[2] = {0.0, 1.0, {k + 1, 0, 1}};
                    return m;
                case ChartName::deltabar1: // (rho, r, Y)
                    m.rows[0] = {1.0, sd.s, {kk1, k + 1, 0}};
                    m.rows[1] = {yb, 1.0, {kk1, 0, 1}};
                    m.rows[2] = {0.0, 1.0, {k + 1, 1, 0}};
                    return m;
                case ChartName::ybar1: // (rho, r, D)
                case ChartName::ybar_neg1:
                    m.rows[0] = {1.0, sd.s, {kk1, k + 1, 0}};
                    m.rows[1] = {yb, id.name == ChartName::ybar1 ? 1.0 : -1.0, {kk1, 0, 0}};
                    m.rows[2] = {0.0, 1.0, {k + 1, 1, 1}};
                    return m;
                default: break;
            }
            break;
        }
    }
    throw ChartError("invalid chart");
}

} // namespace

double pushforward_consistency(const ChartPoint& cp, const GammaVector& g,
                               double eta_or_eta1, double mu_or_mu1,
                               const SigmoidSpec& sigmoid) {
    const auto& c = cp.coords;
    for (int i = 0; i < 3; ++i)
        require(std::abs(c[i]) > 0.0, "pushforward check requires an interior chart point");

    const ChartMap map = chart_map(cp.chart, g);
    Eigen::Vector3d global;
    Eigen::Matrix3d dphi;
    for (int i = 0; i < 3; ++i) {
        global[i] = map.rows[i].value(c);
        for (int j = 0; j < 3; ++j) dphi(i, j) = map.rows[i].partial(c, j);
    }

    // Chart field at the point.
    Eigen::Vector3d chart_vel;
    const bool stage1 = cp.chart.stage == Stage::Cylinder1;
    if (stage1) {
        chart_vel = cylinder1_field(cp.chart, g, eta_or_eta1, mu_or_mu1, sigmoid)(c);
    } else if (cp.chart.stage == Stage::Cylinder2) {
        chart_vel = cylinder2_field(cp.chart, g, eta_or_eta1, mu_or_mu1, sigmoid)(c);
    } else {
        chart_vel = sphere_field(cp.chart, g, eta_or_eta1, mu_or_mu1, sigmoid)(c);
    }

    // Original extended field at the image point: the planar flow with the
    // small parameter as common prefactor, appended with a zero component.
    const double x = global[0], y = global[1];
    double eps, prefactor, eta, mu;
    if (stage1) {
        eps = global[2];
        prefactor = eps;
        eta = eta_or_eta1;
        mu = mu_or_mu1;
    } else {
        const double sigma = global[2];
        eps = ipow(sigma, g.k + 1);
        prefactor = eps;
        const double sk = ipow(sigma, g.k);
        eta = 1.0 + sk * eta_or_eta1;
        mu = sk * mu_or_mu1;
    }
    require(eps > 0.0, "pushforward check requires a positive small parameter");
    const double rate = g.alpha + g.beta * eval_sigmoid(sigmoid, (x - 1.0) / eps);
    Eigen::Vector3d original(prefactor * (rate * y - x),
                             prefactor * (eta - (mu + rate) * y), 0.0);

    const Eigen::Vector3d pushed = dphi * chart_vel * desingularization_factor(cp);
    double worst = 0.0;
    for (int i = 0; i < 3; ++i) {
        const double scale = std::max({std::abs(original[i]), std::abs(pushed[i]), 1e-300});
        const double rel = std::abs(pushed[i] - original[i]) /
                           std::max(scale, std::abs(prefactor));
        worst = std::max(worst, rel);
    }
    return worst;
}

} // namespace sdo
