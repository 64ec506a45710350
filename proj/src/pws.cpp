#include "sdo/pws.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <cstdio>

namespace sdo {

Eigen::Vector2d LinearPlanarSystem::flow(double t, const Eigen::Vector2d& v0) const {
    const Eigen::Vector2d z = equilibrium();
    const Eigen::Matrix2d e = (A * t).exp();
    return z + e * (v0 - z);
}

std::pair<LinearPlanarSystem, LinearPlanarSystem> pws_fields(const ModelParams& p) {
    LinearPlanarSystem left, right;
    left.A << -1.0, p.alpha, 0.0, -(p.mu + p.alpha);
    left.c << 0.0, p.eta;
    right.A << -1.0, p.alpha + p.beta, 0.0, -(p.mu + p.alpha + p.beta);
    right.c << 0.0, p.eta;
    return {left, right};
}

PwsStructure pws_structure(const ModelParams& p) {
    PwsStructure s;
    const double ab = p.alpha + p.beta;
    s.yL = 1.0 / p.alpha;
    s.yR = 1.0 / ab;
    s.pL = {1.0, s.yL};
    s.pR = {1.0, s.yR};
    s.zL = {p.alpha * p.eta / (p.mu + p.alpha), p.eta / (p.mu + p.alpha)};
    s.zR = {ab * p.eta / (p.mu + ab), p.eta / (p.mu + ab)};
    s.etaL_mu = 1.0 + p.mu / p.alpha;
    s.etaR_mu = 1.0 + p.mu / ab;
    s.zL_eigensolutions = {EigenSolution{-1.0, {1.0, 0.0}},
                           EigenSolution{-(p.mu + p.alpha),
                                         {p.alpha, 1.0 - (p.mu + p.alpha)}}};
    s.zR_eigensolutions = {EigenSolution{-1.0, {1.0, 0.0}},
                           EigenSolution{-(p.mu + ab), {ab, 1.0 - (p.mu + ab)}}};
    return s;
}

std::pair<double, double> eta_boundaries(const ModelParams& p) {
    return {1.0 + p.mu / (p.alpha + p.beta), 1.0 + p.mu / p.alpha};
}

std::pair<NodePosition, NodePosition> classify_node_position(const ModelParams& p) {
    const auto [etaR, etaL] = eta_boundaries(p);
    auto classify = [](double eta, double boundary, bool real_below) {
        if (eta == boundary) return NodePosition::Boundary;
        const bool real = real_below ? (eta < boundary) : (eta > boundary);
        return real ? NodePosition::Real : NodePosition::Virtual;
    };
    return {classify(p.eta, etaL, true), classify(p.eta, etaR, false)};
}

namespace {

// Forward orbit of v0 sampled on [0, T] where T is chosen so that the orbit
// ends within node_cutoff of the system's node; the final sample is replaced
// by the node itself.
std::vector<Eigen::Vector3d> sample_arc(const LinearPlanarSystem& sys,
                                        const Eigen::Vector2d& v0, int samples,
                                        double node_cutoff) {
    const Eigen::Vector2d z = sys.equilibrium();
    const double d0 = (v0 - z).norm();
    // Slowest contraction rate bounds the time to reach the cutoff distance.
    const Eigen::Vector2cd lam = sys.A.eigenvalues();
    const double rate = std::min(-lam[0].real(), -lam[1].real());
    double T = std::log(d0 / node_cutoff) / rate;
    while ((sys.flow(T, v0) - z).norm() > node_cutoff) T *= 1.25;

    std::vector<Eigen::Vector3d> arc;
    arc.reserve(samples + 1);
    for (int i = 0; i < samples; ++i) {
        const double t = T * i / samples;
        const Eigen::Vector2d v = sys.flow(t, v0);
        arc.push_back({t, v[0], v[1]});
    }
    arc.push_back({T, z[0], z[1]});
    return arc;
}

} // namespace

SingularCycle build_singular_cycle(const ModelParams& p, int samples_per_arc,
                                   double node_cutoff) {
    if (p.eta != 1.0 || p.mu != 0.0)
        throw ModelError("singular cycle requires eta = 1, mu = 0 exactly");
    const auto [left, right] = pws_fields(p);
    const PwsStructure s = pws_structure(p);

    SingularCycle cycle;
    cycle.gammaL = sample_arc(left, s.pR, samples_per_arc, node_cutoff);
    cycle.gammaR = sample_arc(right, s.pL, samples_per_arc, node_cutoff);

    auto endpoint = [](const std::vector<Eigen::Vector3d>& arc) {
        return Eigen::Vector2d{arc.back()[1], arc.back()[2]};
    };
    auto start = [](const std::vector<Eigen::Vector3d>& arc) {
        return Eigen::Vector2d{arc.front()[1], arc.front()[2]};
    };
    cycle.closure_gap = std::max((endpoint(cycle.gammaL) - start(cycle.gammaR)).norm(),
                                 (endpoint(cycle.gammaR) - start(cycle.gammaL)).norm());
    if (cycle.closure_gap > 1e-6)
        throw ModelError("singular cycle failed to close");
    return cycle;
}

std::vector<Eigen::Vector2d> SingularCycle::polyline() const {
    std::vector<Eigen::Vector2d> pts;
    pts.reserve(gammaL.size() + gammaR.size());
    for (const auto& r : gammaL) pts.push_back({r[1], r[2]});
    for (const auto& r : gammaR) pts.push_back({r[1], r[2]});
    return pts;
}

std::string SingularCycle::to_csv() const {
    std::string out = "arc_id,t,x,y\n";
    char buf[128];
    auto emit = [&](int id, const std::vector<Eigen::Vector3d>& arc) {
        for (const auto& r : arc) {
            std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g\n", id, r[0], r[1], r[2]);
            out += buf;
        }
    };
    emit(0, gammaL);
    emit(1, gammaR);
    return out;
}

} // namespace sdo
