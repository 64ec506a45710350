#include "sdo/geometry.hpp"

#include <cmath>
#include <json.hpp>

namespace sdo {

namespace {

double ipow(double x, int n) {
    double r = 1.0;
    bool inv = n < 0;
    for (int i = 0; i < std::abs(n); ++i) r *= x;
    return inv ? 1.0 / r : r;
}

// x^{1/n} for x >= 0 (fractional powers of negatives are rejected upstream).
double root(double x, int n) {
    if (x < 0.0) throw ChartError("fractional power of a negative quantity");
    return std::pow(x, 1.0 / n);
}

void require(bool ok, const char* what) {
    if (!ok) throw ChartError(what);
}

} // namespace

bool chart_is_legal(const ChartId& id) {
    switch (id.stage) {
        case Stage::Cylinder1:
            return id.name == ChartName::xbar_neg1 || id.name == ChartName::epsbar1 ||
                   id.name == ChartName::xbar1;
        case Stage::Cylinder2:
            return id.name == ChartName::xbar_neg1 || id.name == ChartName::deltabar1 ||
                   id.name == ChartName::xbar1;
        case Stage::SphereL:
        case Stage::SphereR:
            return id.name == ChartName::rbar1 || id.name == ChartName::deltabar1 ||
                   id.name == ChartName::ybar1 || id.name == ChartName::ybar_neg1;
    }
    return false;
}

std::string stage_string(Stage s) {
    switch (s) {
        case Stage::Cylinder1: return "Cylinder1";
        case Stage::Cylinder2: return "Cylinder2";
        case Stage::SphereL: return "SphereL";
        case Stage::SphereR: return "SphereR";
    }
    return "?";
}

std::string chart_name_string(ChartName n) {
    switch (n) {
        case ChartName::xbar_neg1: return "xbar_neg1";
        case ChartName::epsbar1: return "epsbar1";
        case ChartName::xbar1: return "xbar1";
        case ChartName::deltabar1: return "deltabar1";
        case ChartName::rbar1: return "rbar1";
        case ChartName::ybar1: return "ybar1";
        case ChartName::ybar_neg1: return "ybar_neg1";
    }
    return "?";
}

namespace {

Stage stage_from_string(const std::string& s) {
    if (s == "Cylinder1") return Stage::Cylinder1;
    if (s == "Cylinder2") return Stage::Cylinder2;
    if (s == "SphereL") return Stage::SphereL;
    if (s == "SphereR") return Stage::SphereR;
    throw ChartError("unknown stage: " + s);
}

ChartName name_from_string(const std::string& s) {
    if (s == "xbar_neg1") return ChartName::xbar_neg1;
    if (s == "epsbar1") return ChartName::epsbar1;
    if (s == "xbar1") return ChartName::xbar1;
    if (s == "deltabar1") return ChartName::deltabar1;
    if (s == "rbar1") return ChartName::rbar1;
    if (s == "ybar1") return ChartName::ybar1;
    if (s == "ybar_neg1") return ChartName::ybar_neg1;
    throw ChartError("unknown chart name: " + s);
}

// Radial / scale coordinates that must be nonnegative, per chart.
void check_domain(const ChartId& id, const Eigen::Vector3d& c) {
    auto nonneg = [&](int i, const char* msg) { require(c[i] >= 0.0, msg); };
    switch (id.name) {
        case ChartName::xbar_neg1:
        case ChartName::xbar1:
            nonneg(0, "radial coordinate r must be >= 0");
            nonneg(2, "scale coordinate must be >= 0");
            break;
        case ChartName::epsbar1:
        case ChartName::deltabar1:
            if (id.stage == Stage::Cylinder1 || id.stage == Stage::Cylinder2) {
                nonneg(2, "scale coordinate r2 must be >= 0");
            } else {
                nonneg(0, "radial coordinate rho must be >= 0");
                nonneg(1, "radial coordinate r2 must be >= 0");
            }
            break;
        case ChartName::rbar1:
            nonneg(0, "radial coordinate rho must be >= 0");
            nonneg(2, "scale coordinate delta must be >= 0");
            break;
        case ChartName::ybar1:
        case ChartName::ybar_neg1:
            nonneg(0, "radial coordinate rho must be >= 0");
            nonneg(1, "radial coordinate r must be >= 0");
            nonneg(2, "scale coordinate delta must be >= 0");
            break;
    }
}

} // namespace

ChartPoint::ChartPoint(ChartId chart_, const Eigen::Vector3d& coords_, int k_)
    : chart(chart_), coords(coords_), k(k_) {
    require(chart_is_legal(chart), "illegal (stage, name) chart pair");
    require(k >= 1, "decay order k must be >= 1");
    require(coords.allFinite(), "chart coordinates must be finite");
    check_domain(chart, coords);
}

std::string ChartPoint::to_json() const {
    nlohmann::json j;
    j["stage"] = stage_string(chart.stage);
    j["name"] = chart_name_string(chart.name);
    j["coords"] = {coords[0], coords[1], coords[2]};
    j["k"] = k;
    return j.dump();
}

ChartPoint ChartPoint::from_json(const std::string& json) {
    const auto j = nlohmann::json::parse(json);
    const ChartId id{stage_from_string(j.at("stage").get<std::string>()),
                     name_from_string(j.at("name").get<std::string>())};
    const auto c = j.at("coords");
    return ChartPoint(id, Eigen::Vector3d(c.at(0), c.at(1), c.at(2)), j.at("k").get<int>());
}

ScaledParams scale_params_inverse(double eps, double mu, double eta, int k) {
    require(eps > 0.0, "scaled-parameter inverse is undefined at eps = 0");
    ScaledParams sp;
    sp.sigma = root(eps, k + 1);
    const double sk = ipow(sp.sigma, k);
    sp.mu1 = mu / sk;
    sp.eta1 = (eta - 1.0) / sk;
    return sp;
}

void scale_params(const ScaledParams& sp, int k, double& eps, double& mu, double& eta) {
    require(sp.sigma >= 0.0, "sigma must be >= 0");
    const double sk = ipow(sp.sigma, k);
    eps = sk * sp.sigma;
    mu = sk * sp.mu1;
    eta = 1.0 + sk * sp.eta1;
}

Eigen::Vector3d cylinder1_to_global(const ChartPoint& cp) {
    require(cp.chart.stage == Stage::Cylinder1, "expected a Cylinder1 chart point");
    const auto& c = cp.coords;
    switch (cp.chart.name) {
        case ChartName::xbar_neg1: return {1.0 - c[0], c[1], c[0] * c[2]};
        case ChartName::epsbar1: return {1.0 + c[2] * c[0], c[1], c[2]};
        case ChartName::xbar1: return {1.0 + c[0], c[1], c[0] * c[2]};
        default: throw ChartError("invalid Cylinder1 chart");
    }
}

ChartPoint cylinder1_from_global(ChartName name, const Eigen::Vector3d& xye, int k) {
    const double x = xye[0], y = xye[1], eps = xye[2];
    switch (name) {
        case ChartName::xbar_neg1: {
            require(x < 1.0, "xbar_neg1 requires x < 1");
            const double r1 = 1.0 - x;
            return ChartPoint({Stage::Cylinder1, name}, {r1, y, eps / r1}, k);
        }
        case ChartName::epsbar1: {
            require(eps > 0.0, "epsbar1 requires eps > 0");
            return ChartPoint({Stage::Cylinder1, name}, {(x - 1.0) / eps, y, eps}, k);
        }
        case ChartName::xbar1: {
            require(x > 1.0, "xbar1 requires x > 1");
            const double r3 = x - 1.0;
            return ChartPoint({Stage::Cylinder1, name}, {r3, y, eps / r3}, k);
        }
        default: throw ChartError("invalid Cylinder1 chart");
    }
}

Eigen::Vector3d cylinder2_to_global(const ChartPoint& cp) {
    require(cp.chart.stage == Stage::Cylinder2, "expected a Cylinder2 chart point");
    const auto& c = cp.coords;
    const int k = cp.k;
    switch (cp.chart.name) {
        case ChartName::xbar_neg1: return {1.0 - ipow(c[0], k + 1), c[1], c[0] * c[2]};
        case ChartName::deltabar1: return {1.0 + ipow(c[2], k + 1) * c[0], c[1], c[2]};
        case ChartName::xbar1: return {1.0 + ipow(c[0], k + 1), c[1], c[0] * c[2]};
        default: throw ChartError("invalid Cylinder2 chart");
    }
}

ChartPoint cylinder2_from_global(ChartName name, const Eigen::Vector3d& xys, int k) {
    const double x = xys[0], y = xys[1], sigma = xys[2];
    switch (name) {
        case ChartName::xbar_neg1: {
            require(x < 1.0, "xbar_neg1 requires x < 1");
            const double r1 = root(1.0 - x, k + 1);
            return ChartPoint({Stage::Cylinder2, name}, {r1, y, sigma / r1}, k);
        }
        case ChartName::deltabar1: {
            require(sigma > 0.0, "deltabar1 requires sigma > 0");
            return ChartPoint({Stage::Cylinder2, name},
                              {(x - 1.0) / ipow(sigma, k + 1), y, sigma}, k);
        }
        case ChartName::xbar1: {
            require(x > 1.0, "xbar1 requires x > 1");
            const double r3 = root(x - 1.0, k + 1);
            return ChartPoint({Stage::Cylinder2, name}, {r3, y, sigma / r3}, k);
        }
        default: throw ChartError("invalid Cylinder2 chart");
    }
}

ChartPoint sphere_to_cylinder(const ChartPoint& cp, const GammaVector& g) {
    require(cp.chart.stage == Stage::SphereL || cp.chart.stage == Stage::SphereR,
            "expected a sphere chart point");
    const bool left = cp.chart.stage == Stage::SphereL;
    const double yb = left ? 1.0 / g.alpha : 1.0 / (g.alpha + g.beta);
    const ChartName cyl_name = left ? ChartName::xbar_neg1 : ChartName::xbar1;
    const int k = cp.k;
    const auto& c = cp.coords;
    double r, y, delta;
    switch (cp.chart.name) {
        case ChartName::rbar1: { // (rho1, y1, delta1)
            const double rho = c[0];
            r = ipow(rho, k);
            y = yb + ipow(rho, k * (k + 1)) * c[1];
            delta = rho * c[2];
            break;
        }
        case ChartName::deltabar1: { // (rho2, r2, y2)
            const double rho = c[0];
            r = ipow(rho, k) * c[1];
            y = yb + ipow(rho, k * (k + 1)) * c[2];
            delta = rho;
            break;
        }
        case ChartName::ybar1: { // (rho3, r3, delta3)
            const double rho = c[0];
            r = ipow(rho, k) * c[1];
            y = yb + ipow(rho, k * (k + 1));
            delta = rho * c[2];
            break;
        }
        case ChartName::ybar_neg1: { // (rho4, r4, delta4)
            const double rho = c[0];
            r = ipow(rho, k) * c[1];
            y = yb - ipow(rho, k * (k + 1));
            delta = rho * c[2];
            break;
        }
        default: throw ChartError("invalid sphere chart");
    }
    return ChartPoint({Stage::Cylinder2, cyl_name}, {r, y, delta}, k);
}

ChartPoint sphere_from_cylinder(Stage sphere_stage, ChartName name,
                                const ChartPoint& cyl, const GammaVector& g) {
    require(sphere_stage == Stage::SphereL || sphere_stage == Stage::SphereR,
            "expected a sphere stage");
    const bool left = sphere_stage == Stage::SphereL;
    require(cyl.chart.stage == Stage::Cylinder2, "sphere charts attach to Cylinder2");
    require(cyl.chart.name == (left ? ChartName::xbar_neg1 : ChartName::xbar1),
            "sphere stage does not match the cylinder chart");
    const double yb = left ? 1.0 / g.alpha : 1.0 / (g.alpha + g.beta);
    const int k = cyl.k;
    const double r = cyl.coords[0], y = cyl.coords[1], delta = cyl.coords[2];
    switch (name) {
        case ChartName::rbar1: {
            require(r > 0.0, "rbar1 requires r > 0");
            const double rho = root(r, k);
            return ChartPoint({sphere_stage, name},
                              {rho, (y - yb) / ipow(rho, k * (k + 1)), delta / rho}, k);
        }
        case ChartName::deltabar1: {
            require(delta > 0.0, "deltabar1 requires delta > 0");
            const double rho = delta;
            return ChartPoint({sphere_stage, name},
                              {rho, r / ipow(rho, k), (y - yb) / ipow(rho, k * (k + 1))}, k);
        }
        case ChartName::ybar1: {
            require(y > yb, "ybar1 requires y above the asymptote");
            const double rho = root(y - yb, k * (k + 1));
            return ChartPoint({sphere_stage, name},
                              {rho, r / ipow(rho, k), delta / rho}, k);
        }
        case ChartName::ybar_neg1: {
            require(y < yb, "ybar_neg1 requires y below the asymptote");
            const double rho = root(yb - y, k * (k + 1));
            return ChartPoint({sphere_stage, name},
                              {rho, r / ipow(rho, k), delta / rho}, k);
        }
        default: throw ChartError("invalid sphere chart");
    }
}

ChartPoint chart_change(const ChartPoint& cp, ChartName target) {
    require(cp.chart.stage == Stage::SphereL || cp.chart.stage == Stage::SphereR,
            "chart changes are defined between sphere charts");
    const int k = cp.k;
    const int kk1 = k * (k + 1);
    const auto& c = cp.coords;
    auto make = [&](const Eigen::Vector3d& v) {
        return ChartPoint({cp.chart.stage, target}, v, k);
    };
    if (cp.chart.name == target) return cp;

    switch (cp.chart.name) {
        case ChartName::rbar1: { // (rho1, y1, delta1)
            const double rho1 = c[0], y1 = c[1], d1 = c[2];
            if (target == ChartName::deltabar1) { // K21
                require(d1 > 0.0, "K21 requires delta1 > 0");
                return make({d1 * rho1, ipow(d1, -k), ipow(d1, -kk1) * y1});
            }
            if (target == ChartName::ybar_neg1) { // K41
                require(y1 < 0.0, "K41 requires y1 < 0");
                const double m = root(-y1, kk1); // (-y1)^{1/(k(k+1))}
                return make({m * rho1, ipow(m, -k), d1 / m});
            }
            if (target == ChartName::ybar1) { // mirrored K41 for y1 > 0
                require(y1 > 0.0, "chart change to ybar1 requires y1 > 0");
                const double m = root(y1, kk1);
                return make({m * rho1, ipow(m, -k), d1 / m});
            }
            break;
        }
        case ChartName::deltabar1: { // (rho2, r2, y2)
            const double rho2 = c[0], r2 = c[1], y2 = c[2];
            if (target == ChartName::rbar1) { // K12
                require(r2 > 0.0, "K12 requires r2 > 0");
                const double m = root(r2, k); // r2^{1/k}
                return make({rho2 * m, ipow(r2, -(k + 1)) * y2, 1.0 / m});
            }
            if (target == ChartName::ybar_neg1) { // K42
                require(y2 < 0.0, "K42 requires y2 < 0");
                const double m = root(-y2, kk1);
                return make({m * rho2, ipow(m, -k) * r2, 1.0 / m});
            }
            if (target == ChartName::ybar1) { // mirrored K42 for y2 > 0
                require(y2 > 0.0, "chart change to ybar1 requires y2 > 0");
                const double m = root(y2, kk1);
                return make({m * rho2, ipow(m, -k) * r2, 1.0 / m});
            }
            break;
        }
        case ChartName::ybar_neg1: { // (rho4, r4, delta4)
            const double rho4 = c[0], r4 = c[1], d4 = c[2];
            if (target == ChartName::rbar1) { // K14
                require(r4 > 0.0, "K14 requires r4 > 0");
                const double m = root(r4, k); // r4^{1/k} = (-y1)^{-1/(k(k+1))}
                return make({rho4 * m, -ipow(r4, -(k + 1)), d4 / m});
            }
            if (target == ChartName::deltabar1) { // K24
                require(d4 > 0.0, "K24 requires delta4 > 0");
                return make({rho4 * d4, r4 * ipow(d4, -k), -ipow(d4, -kk1)});
            }
            break;
        }
        case ChartName::ybar1: { // (rho3, r3, delta3), mirrored inverses
            const double rho3 = c[0], r3 = c[1], d3 = c[2];
            if (target == ChartName::rbar1) {
                require(r3 > 0.0, "chart change from ybar1 requires r3 > 0");
                const double m = root(r3, k);
                return make({rho3 * m, ipow(r3, -(k + 1)), d3 / m});
            }
            if (target == ChartName::deltabar1) {
                require(d3 > 0.0, "chart change from ybar1 requires delta3 > 0");
                return make({rho3 * d3, r3 * ipow(d3, -k), ipow(d3, -kk1)});
            }
            break;
        }
        default: break;
    }
    throw ChartError("unsupported chart change from " +
                     chart_name_string(cp.chart.name) + " to " + chart_name_string(target));
}

} // namespace sdo
