#include "sdo/model.hpp"

namespace sdo {

Eigen::Vector2d full_vector_field(const ModelParams& p, const SigmoidSpec& spec,
                                  const PlanarState& s) {
    if (!(p.eps > 0.0)) throw ModelError("full vector field requires eps > 0");
    const double phi = eval_sigmoid(spec, (s.x - 1.0) / p.eps);
    const double rate = p.alpha + p.beta * phi;
    return {rate * s.y - s.x, p.eta - (p.mu + rate) * s.y};
}

Eigen::Matrix2d full_jacobian(const ModelParams& p, const SigmoidSpec& spec,
                              const PlanarState& s) {
    if (!(p.eps > 0.0)) throw ModelError("full Jacobian requires eps > 0");
    const double z = (s.x - 1.0) / p.eps;
    const double phi = eval_sigmoid(spec, z);
    const double dphi = eval_sigmoid_derivative(spec, z) / p.eps;
    const double rate = p.alpha + p.beta * phi;
    Eigen::Matrix2d j;
    j << p.beta * dphi * s.y - 1.0, rate,
        -p.beta * dphi * s.y, -(p.mu + rate);
    return j;
}

Eigen::Vector2d blended_field(const BlendedPws& b, const PlanarState& s) {
    if (!(b.eps > 0.0)) throw ModelError("blended field requires eps > 0");
    const double phi = eval_sigmoid(b.sigmoid, (s.x - b.switch_x) / b.eps);
    const Eigen::Vector2d v = s.vec();
    return b.left_field(v) * (1.0 - phi) + b.right_field(v) * phi;
}

} // namespace sdo
