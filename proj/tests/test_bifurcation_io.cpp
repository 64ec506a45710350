#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "sdo/bifurcation.hpp"
#include "sdo/io.hpp"

using namespace sdo;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
    const std::string path = "/tmp/" + name;
    std::ofstream out(path);
    out << content;
    return path;
}

} // namespace

TEST_CASE("eta sweep finds both Hopf points and a cycle window between them") {
    const ModelParams base(0.5, 2.0, 1.0, 0.0, 0.0064);
    const auto diag = sweep_eta(base, SigmoidSpec::arctan(), 0.90, 1.05, 60);
    REQUIRE(diag.eta_grid.size() == 60);
    REQUIRE(diag.hopf_etas.size() == 2);
    CHECK(diag.hopf_etas[0] == doctest::Approx(0.9345).epsilon(5e-3));
    CHECK(diag.hopf_etas[1] == doctest::Approx(1.0223).epsilon(5e-3));

    int cycles = 0;
    double max_x_mid = 0.0;
    for (const auto& c : diag.cycle_branch) {
        if (!c.found) continue;
        ++cycles;
        CHECK(c.eta > diag.hopf_etas[0] - 0.01);
        CHECK(c.eta < diag.hopf_etas[1] + 0.01);
        if (std::abs(c.eta - 1.0) < 0.005) max_x_mid = c.max_x;
    }
    CHECK(cycles > 20);
    CHECK(max_x_mid > 1.5);
    CHECK(max_x_mid < 1.9);

    // Every grid point carries at least one equilibrium (the branch is
    // globally defined) and the CSV has one header plus >= one row per point.
    for (const auto& eqs : diag.equilibria) CHECK(!eqs.empty());
    const std::string csv = diag.to_csv();
    CHECK(csv.rfind("eta,", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') >= 61);
    CHECK(diag.hopf_json().find("hopf_points") != std::string::npos);

    SUBCASE("sweep validates the grid size") {
        CHECK_THROWS(sweep_eta(base, SigmoidSpec::arctan(), 0.9, 1.05, 5));
    }
}

TEST_CASE("regime classification agrees with the connection window") {
    const GammaVector gamma(1, 0.5, 1.0, 1.0 / M_PI, 1.0 / M_PI);
    // Affine het-curve stand-in with the exact intercepts and slopes; avoids
    // a ten-minute curve build inside a unit test.
    HetCurve het;
    het.mu1_grid = {0.0, 5.0};
    het.eta_het0_L = -0.74887956415;
    het.eta_het0_R = 0.345741125873;
    het.slope_L = 2.0;
    het.slope_R = 2.0 / 3.0;
    het.mu1_star = (het.eta_het0_R - het.eta_het0_L) / (het.slope_L - het.slope_R);

    // Center of the window at mu1 = 0: the relaxation cycle must exist.
    const auto v1 = classify_regime(1e-3, 0.0, 0.0, gamma, het, SigmoidSpec::arctan());
    CHECK(v1.predicted_exists);
    CHECK(v1.observed_exists);
    CHECK(!v1.inconclusive);
    CHECK(v1.agree);
    CHECK(v1.hausdorff_to_singular < 0.5);

    // Far outside the window (eta1 well below the left branch): no cycle.
    const auto v2 = classify_regime(1e-3, 0.0, -3.0, gamma, het, SigmoidSpec::arctan());
    CHECK(!v2.predicted_exists);
    CHECK(!v2.observed_exists);
    CHECK(v2.agree);

    // Beyond mu1_star no connection window remains.
    const auto v3 = classify_regime(1e-3, 2.0 * het.mu1_star, 0.0, gamma, het,
                                    SigmoidSpec::arctan());
    CHECK(!v3.predicted_exists);
}

TEST_CASE("crossing-cycle scenario for negative mu") {
    const ModelParams p(0.5, 2.0, 0.92, -0.05, 0.0);
    const auto rep = mu_negative_scenario(p, SigmoidSpec::arctan(), {1e-2, 1e-3});
    CHECK(rep.y_star == doctest::Approx(2.0198602).epsilon(1e-5));
    REQUIRE(rep.singular_cycle.size() > 50);
    REQUIRE(rep.hausdorff.size() == 2);
    CHECK(rep.all_attracting);
    CHECK(rep.hausdorff_decreasing);
    CHECK(rep.hausdorff[0] == doctest::Approx(0.272063).epsilon(1e-3));
    CHECK(rep.hausdorff[1] == doctest::Approx(0.0827969).epsilon(1e-3));

    SUBCASE("rejects parameters outside the crossing window") {
        const ModelParams bad(0.5, 2.0, 1.05, -0.05, 0.0);
        CHECK_THROWS(mu_negative_scenario(bad, SigmoidSpec::arctan(), {1e-2}));
    }
}

TEST_CASE("run-parameter files: happy path and rejections") {
    const auto path = write_temp("sdo_params_ok.cfg",
                                 "# oscillator\n"
                                 "alpha = 0.5\n"
                                 "beta = 1.0\n"
                                 "eta = 1.0\n"
                                 "mu = 0.0\n"
                                 "eps = 0.01\n"
                                 "sigmoid.family = arctan\n");
    const RunParams rp = read_params_file(path);
    CHECK(rp.params.alpha == 0.5);
    CHECK(rp.params.eps == 0.01);
    CHECK(rp.sigmoid.k == 1);

    const auto hill = write_temp("sdo_params_hill.cfg",
                                 "alpha=0.5\nbeta=1\neta=1\nmu=0\neps=0.01\n"
                                 "sigmoid.family=hill\nsigmoid.n=4\n");
    CHECK(read_params_file(hill).sigmoid.k == 4);

    CHECK_THROWS_AS(read_params_file("/tmp/definitely_missing_sdo.cfg"), ConfigError);
    CHECK_THROWS_AS(
        read_params_file(write_temp("sdo_params_unknown.cfg",
                                    "alpha=0.5\nbeta=1\neta=1\nmu=0\neps=0.01\n"
                                    "sigmoid.family=arctan\ngamma=3\n")),
        ConfigError);
    CHECK_THROWS_AS(
        read_params_file(write_temp("sdo_params_dup.cfg",
                                    "alpha=0.5\nalpha=0.6\nbeta=1\neta=1\nmu=0\n"
                                    "eps=0.01\nsigmoid.family=arctan\n")),
        ConfigError);
    CHECK_THROWS_AS(
        read_params_file(write_temp("sdo_params_badnum.cfg",
                                    "alpha=zero\nbeta=1\neta=1\nmu=0\neps=0.01\n"
                                    "sigmoid.family=arctan\n")),
        ConfigError);
    // Invalid model values are rewrapped as configuration errors.
    CHECK_THROWS_AS(
        read_params_file(write_temp("sdo_params_badalpha.cfg",
                                    "alpha=1.5\nbeta=1\neta=1\nmu=0\neps=0.01\n"
                                    "sigmoid.family=arctan\n")),
        ConfigError);
}

TEST_CASE("gamma files") {
    const auto path = write_temp(
        "sdo_gamma_ok.cfg", "k=1\nalpha=0.5\nbeta=1\nphiL0=0.3183\nphiR0=0.3183\n");
    const GammaVector g = read_gamma_file(path);
    CHECK(g.k == 1);
    CHECK(g.phiL0 == doctest::Approx(0.3183));
    CHECK_THROWS_AS(
        read_gamma_file(write_temp("sdo_gamma_bad.cfg", "k=1\nalpha=0.5\n")),
        ConfigError);
}

TEST_CASE("17-digit formatting round-trips doubles exactly") {
    for (double v : {1.0 / 3.0, M_PI, -1.27323954474e-7, 0.0, 123456789.123456}) {
        const std::string s = format_g17(v);
        CHECK(std::stod(s) == v);
    }
    CHECK(csv_row({"a", "b", "c"}) == "a,b,c\n");
}
