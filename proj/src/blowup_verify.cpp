#include "sdo/blowup_verify.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "sdo/chart_dynamics.hpp"
#include "sdo/geometry.hpp"
#include "sdo/io.hpp"

namespace sdo {

namespace {

double rel_diff(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
    double m = 0.0;
    for (int i = 0; i < 3; ++i)
        m = std::max(m, std::abs(a[i] - b[i]) /
                            std::max(1.0, std::max(std::abs(a[i]), std::abs(b[i]))));
    return m;
}

struct Sampler {
    std::mt19937 rng;
    explicit Sampler(unsigned seed) : rng(seed) {}
    double uni(double a, double b) {
        return std::uniform_real_distribution<double>(a, b)(rng);
    }
    int sign() { return rng() % 2 ? 1 : -1; }
};

} // namespace

SigmoidSpec algebraic_sigmoid_order2() {
    auto value = [](double z) { return 0.5 * (1.0 + z / std::sqrt(1.0 + z * z)); };
    // z^2 (1 - phi(z)) = 1 / (2 sqrt(1 + w^2) (1 + sqrt(1 + w^2))) at w = 1/z;
    // the same expression serves both tails by the odd symmetry of phi - 1/2.
    auto tail = [](double w) {
        const double s = std::sqrt(1.0 + w * w);
        return 0.5 / (s * (1.0 + s));
    };
    return SigmoidSpec::custom(value, 2, 0.25, 0.25, tail, tail);
}

bool BlowupVerification::all_pass() const {
    for (const auto& r : rows)
        if (!r.pass) return false;
    return !rows.empty();
}

std::string BlowupVerification::to_csv() const {
    std::string out = "check,samples,max_residual,tolerance,pass\n";
    for (const auto& r : rows)
        out += csv_row({r.check, std::to_string(r.samples), format_g17(r.max_residual),
                        format_g17(r.tolerance), r.pass ? "1" : "0"});
    return out;
}

BlowupVerification verify_blowup_geometry(int k, unsigned seed, int n_roundtrip,
                                          int n_pushforward) {
    if (k != 1 && k != 2)
        throw std::invalid_argument(
            "verify_blowup_geometry: only decay orders 1 and 2 have a registered "
            "sigmoid with matching tails");
    const GammaVector g = k == 1 ? GammaVector(1, 0.5, 2.0, 1.0 / M_PI, 1.0 / M_PI)
                                 : GammaVector(2, 0.5, 2.0, 0.25, 0.25);
    const SigmoidSpec sig = k == 1 ? SigmoidSpec::arctan() : algebraic_sigmoid_order2();

    BlowupVerification rep;
    Sampler s(seed);
    const double rt_tol = 1e-12;
    const double pf_tol = 1e-8;

    auto add = [&](const std::string& check, int n, double tol, auto&& residual) {
        VerificationRow row{check, n, 0.0, tol, false};
        for (int i = 0; i < n; ++i)
            row.max_residual = std::max(row.max_residual, residual());
        row.pass = row.max_residual < tol;
        rep.rows.push_back(row);
    };

    // Stage-1 cylinder: chart -> global -> chart and back in global form.
    for (ChartName name :
         {ChartName::xbar_neg1, ChartName::epsbar1, ChartName::xbar1}) {
        add("cylinder1_roundtrip_" + chart_name_string(name), n_roundtrip, rt_tol,
            [&] {
                const double x = name == ChartName::xbar_neg1 ? s.uni(0.05, 0.95)
                                 : name == ChartName::xbar1   ? s.uni(1.05, 1.95)
                                                              : s.uni(0.5, 1.5);
                const Eigen::Vector3d xye(x, s.uni(0.1, 3.0), s.uni(1e-6, 0.1));
                return rel_diff(xye,
                                cylinder1_to_global(cylinder1_from_global(name, xye, k)));
            });
    }

    // Stage-2 weighted cylinder.
    for (ChartName name :
         {ChartName::xbar_neg1, ChartName::deltabar1, ChartName::xbar1}) {
        add("cylinder2_roundtrip_" + chart_name_string(name), n_roundtrip, rt_tol,
            [&] {
                const double x = name == ChartName::xbar_neg1 ? s.uni(0.05, 0.95)
                                 : name == ChartName::xbar1   ? s.uni(1.05, 1.95)
                                                              : s.uni(0.5, 1.5);
                const Eigen::Vector3d xys(x, s.uni(0.1, 3.0), s.uni(1e-3, 0.5));
                return rel_diff(xys,
                                cylinder2_to_global(cylinder2_from_global(name, xys, k)));
            });
    }

    // Sphere charts against the cylinder chart they attach to.
    for (Stage stage : {Stage::SphereL, Stage::SphereR}) {
        const bool left = stage == Stage::SphereL;
        const double yb = left ? 1.0 / g.alpha : 1.0 / (g.alpha + g.beta);
        const ChartName cyl = left ? ChartName::xbar_neg1 : ChartName::xbar1;
        for (ChartName name : {ChartName::rbar1, ChartName::deltabar1,
                               ChartName::ybar1, ChartName::ybar_neg1}) {
            add("sphere_roundtrip_" + stage_string(stage) + "_" +
                    chart_name_string(name),
                n_roundtrip, rt_tol, [&] {
                    double dy = s.uni(0.05, 0.5);
                    if (name == ChartName::ybar_neg1) dy = -dy;
                    else if (name != ChartName::ybar1 && s.sign() < 0) dy = -dy;
                    const ChartPoint base({Stage::Cylinder2, cyl},
                                          {s.uni(0.05, 1.0), yb + dy, s.uni(0.05, 1.0)},
                                          k);
                    const ChartPoint sph = sphere_from_cylinder(stage, name, base, g);
                    return rel_diff(base.coords, sphere_to_cylinder(sph, g).coords);
                });
        }
    }

    // Chart-change round-trips and the cocycle identity on the sphere.
    add("sphere_chart_change_roundtrips", n_roundtrip, rt_tol, [&] {
        const ChartPoint p({Stage::SphereL, ChartName::rbar1},
                           {s.uni(0.01, 1.0), -s.uni(0.1, 2.0), s.uni(0.1, 2.0)}, k);
        double m = rel_diff(
            p.coords, chart_change(chart_change(p, ChartName::deltabar1),
                                   ChartName::rbar1).coords);
        m = std::max(m, rel_diff(p.coords,
                                 chart_change(chart_change(p, ChartName::ybar_neg1),
                                              ChartName::rbar1).coords));
        const ChartPoint q({Stage::SphereL, ChartName::rbar1},
                           {s.uni(0.01, 1.0), s.uni(0.1, 2.0), s.uni(0.1, 2.0)}, k);
        m = std::max(m, rel_diff(q.coords,
                                 chart_change(chart_change(q, ChartName::ybar1),
                                              ChartName::rbar1).coords));
        return m;
    });
    add("cocycle_K42_K21_equals_K41", n_roundtrip, rt_tol, [&] {
        const ChartPoint p({Stage::SphereL, ChartName::rbar1},
                           {s.uni(0.01, 1.0), -s.uni(0.1, 2.0), s.uni(0.1, 2.0)}, k);
        const ChartPoint via =
            chart_change(chart_change(p, ChartName::deltabar1), ChartName::ybar_neg1);
        const ChartPoint direct = chart_change(p, ChartName::ybar_neg1);
        return rel_diff(via.coords, direct.coords);
    });

    // Pushforward consistency of every desingularized chart field.
    for (ChartName name :
         {ChartName::xbar_neg1, ChartName::epsbar1, ChartName::xbar1}) {
        add("pushforward_cylinder1_" + chart_name_string(name), n_pushforward, pf_tol,
            [&] {
                Eigen::Vector3d c;
                if (name == ChartName::epsbar1)
                    c = {s.uni(-3.0, 3.0), s.uni(0.2, 3.0), s.uni(1e-3, 0.05)};
                else
                    c = {s.uni(0.05, 0.5), s.uni(0.2, 3.0), s.uni(0.01, 0.2)};
                const ChartPoint cp({Stage::Cylinder1, name}, c, k);
                return pushforward_consistency(cp, g, s.uni(0.9, 1.1), s.uni(0.0, 0.1),
                                               sig);
            });
    }
    for (ChartName name :
         {ChartName::xbar_neg1, ChartName::deltabar1, ChartName::xbar1}) {
        add("pushforward_cylinder2_" + chart_name_string(name), n_pushforward, pf_tol,
            [&] {
                Eigen::Vector3d c;
                if (name == ChartName::deltabar1)
                    c = {s.uni(-3.0, 3.0), s.uni(0.2, 3.0), s.uni(1e-2, 0.2)};
                else
                    c = {s.uni(0.05, 0.6), s.uni(0.2, 3.0), s.uni(0.01, 0.3)};
                const ChartPoint cp({Stage::Cylinder2, name}, c, k);
                return pushforward_consistency(cp, g, s.uni(-1.0, 1.0), s.uni(0.0, 1.0),
                                               sig);
            });
    }
    for (Stage stage : {Stage::SphereL, Stage::SphereR}) {
        for (ChartName name : {ChartName::rbar1, ChartName::deltabar1,
                               ChartName::ybar1, ChartName::ybar_neg1}) {
            add("pushforward_" + stage_string(stage) + "_" + chart_name_string(name),
                n_pushforward, pf_tol, [&] {
                    Eigen::Vector3d c;
                    if (name == ChartName::rbar1)
                        c = {s.uni(0.05, 0.3), s.uni(-2.0, 2.0), s.uni(0.1, 1.0)};
                    else if (name == ChartName::deltabar1)
                        c = {s.uni(0.05, 0.3), s.uni(0.1, 1.0), s.uni(-2.0, 2.0)};
                    else
                        c = {s.uni(0.05, 0.3), s.uni(0.1, 1.0), s.uni(0.1, 1.0)};
                    const ChartPoint cp({stage, name}, c, k);
                    return pushforward_consistency(cp, g, s.uni(-1.0, 1.0),
                                                   s.uni(0.0, 1.0), sig);
                });
        }
    }

    return rep;
}

} // namespace sdo
