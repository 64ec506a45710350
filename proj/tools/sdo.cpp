// Command-line surface for the oscillator workbench: reproducible runs of the
// simulator, bifurcation sweeps, heteroclinic curves, Hopf checks, regime
// classification, blow-up geometry verification, and cycle shooting.
//
// Exit codes: 0 success, 2 numerical failure, 3 configuration error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "sdo/bifurcation.hpp"
#include "sdo/blowup_verify.hpp"
#include "sdo/io.hpp"
#include "sdo/model.hpp"
#include "sdo/numerics.hpp"
#include "sdo/sphere_analysis.hpp"

namespace {

using nlohmann::json;

// Raw-double JSON values would round-trip through the library's own
// formatting; emit 17-significant-digit strings parsed back to numbers so the
// files are byte-stable across runs.
json jnum(double v) { return json::parse(sdo::format_g17(v)); }

std::string out_path(const std::string& dir, const std::string& name) {
    if (dir.empty() || dir == ".") return name;
    std::error_code ec;
    std::filesystem::create_directories(dir, ec); // best effort; open reports failure
    return dir + "/" + name;
}

int fail(int code, const std::string& kind, const std::string& message) {
    json j;
    j["error"] = {{"kind", kind}, {"message", message}};
    std::fprintf(stderr, "%s\n", j.dump(2).c_str());
    return code;
}

sdo::PlanarField make_field(const sdo::RunParams& rp) {
    return [rp](const Eigen::Vector2d& v) {
        return sdo::full_vector_field(rp.params, rp.sigmoid, sdo::PlanarState::from(v));
    };
}

sdo::IntegratorConfig run_config() {
    sdo::IntegratorConfig cfg;
    cfg.rel_tol = 1e-9;
    cfg.abs_tol = 1e-11;
    return cfg;
}

int cmd_simulate(const std::string& params_file, double tmax, double x0, double y0,
                 const std::string& out) {
    const auto rp = sdo::read_params_file(params_file);
    const auto field = make_field(rp);
    const auto traj =
        sdo::integrate<2>(field, Eigen::Vector2d(x0, y0), 0.0, tmax, run_config());
    std::string csv = "t,x,y\n";
    for (std::size_t i = 0; i < traj.t.size(); ++i)
        csv += sdo::csv_row({sdo::format_g17(traj.t[i]), sdo::format_g17(traj.y[i][0]),
                             sdo::format_g17(traj.y[i][1])});
    sdo::write_text_file(out_path(out, "simulate.csv"), csv);
    std::printf("wrote %s (%zu samples)\n", out_path(out, "simulate.csv").c_str(),
                traj.t.size());
    return 0;
}

int cmd_bifurcate(const std::string& params_file, double eta_min, double eta_max,
                  int n, const std::string& out) {
    const auto rp = sdo::read_params_file(params_file);
    const auto d = sdo::sweep_eta(rp.params, rp.sigmoid, eta_min, eta_max, n);
    sdo::write_text_file(out_path(out, "bifurcation.csv"), d.to_csv());
    sdo::write_text_file(out_path(out, "hopf.json"), d.hopf_json());
    std::printf("wrote %s and %s (%zu Hopf points)\n",
                out_path(out, "bifurcation.csv").c_str(),
                out_path(out, "hopf.json").c_str(), d.hopf_etas.size());
    return 0;
}

int cmd_het_curve(const std::string& gamma_file, double mu1_max, int n,
                  const std::string& out) {
    const auto g = sdo::read_gamma_file(gamma_file);
    const auto hc = sdo::build_het_curve(g, mu1_max, n);
    std::string csv = "mu1,eta1_het_L,eta1_het_R\n";
    for (std::size_t i = 0; i < hc.mu1_grid.size(); ++i)
        csv += sdo::csv_row({sdo::format_g17(hc.mu1_grid[i]),
                             sdo::format_g17(hc.etaL_het[i]),
                             sdo::format_g17(hc.etaR_het[i])});
    sdo::write_text_file(out_path(out, "het_curve.csv"), csv);
    json j;
    j["eta1_het_L_at_0"] = jnum(hc.eta_het0_L);
    j["eta1_het_R_at_0"] = jnum(hc.eta_het0_R);
    j["slope_L"] = jnum(hc.slope_L);
    j["slope_R"] = jnum(hc.slope_R);
    j["mu1_star"] = jnum(hc.mu1_star);
    sdo::write_text_file(out_path(out, "het_curve.json"), j.dump(2) + "\n");
    std::printf("wrote %s and %s (mu1_star = %s)\n",
                out_path(out, "het_curve.csv").c_str(),
                out_path(out, "het_curve.json").c_str(),
                sdo::format_g17(hc.mu1_star).c_str());
    return 0;
}

int cmd_hopf_check(const std::string& gamma_file, const std::string& side_str,
                   const std::string& out) {
    const auto g = sdo::read_gamma_file(gamma_file);
    const sdo::SphereSide side =
        side_str == "L" ? sdo::SphereSide::Left : sdo::SphereSide::Right;
    const auto h = sdo::hopf_value(side, 0.0, g);
    json j;
    j["side"] = side_str;
    j["eta1_hopf_closed_form"] = jnum(h.eta1_closed_form);
    j["eta1_hopf_numeric"] = jnum(h.eta1_numeric);
    j["difference"] = jnum(h.eta1_closed_form - h.eta1_numeric);
    j["lyapunov_coefficient"] = jnum(h.lyapunov_coefficient);
    j["subcritical"] = h.lyapunov_sign > 0;
    const std::string text = j.dump(2) + "\n";
    sdo::write_text_file(out_path(out, "hopf_check.json"), text);
    std::printf("%s", text.c_str());
    return 0;
}

sdo::HetCurve load_het_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw sdo::ConfigError("cannot open het curve file: " + path);
    std::string line;
    if (!std::getline(in, line) || line.rfind("mu1,", 0) != 0)
        throw sdo::ConfigError("het curve file must start with the mu1,... header");
    sdo::HetCurve hc;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string cell;
        double v[3];
        for (int i = 0; i < 3; ++i) {
            if (!std::getline(row, cell, ','))
                throw sdo::ConfigError("het curve row with fewer than 3 columns");
            v[i] = std::stod(cell);
        }
        hc.mu1_grid.push_back(v[0]);
        hc.etaL_het.push_back(v[1]);
        hc.etaR_het.push_back(v[2]);
    }
    if (hc.mu1_grid.size() < 2)
        throw sdo::ConfigError("het curve file needs at least 2 rows");
    // Refit the affine branches and their crossing.
    const auto fit = [&](const std::vector<double>& ys, double& b, double& m) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        const double n = static_cast<double>(hc.mu1_grid.size());
        for (std::size_t i = 0; i < hc.mu1_grid.size(); ++i) {
            sx += hc.mu1_grid[i];
            sy += ys[i];
            sxx += hc.mu1_grid[i] * hc.mu1_grid[i];
            sxy += hc.mu1_grid[i] * ys[i];
        }
        m = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        b = (sy - m * sx) / n;
    };
    fit(hc.etaL_het, hc.eta_het0_L, hc.slope_L);
    fit(hc.etaR_het, hc.eta_het0_R, hc.slope_R);
    hc.mu1_star = (hc.eta_het0_R - hc.eta_het0_L) / (hc.slope_L - hc.slope_R);
    return hc;
}

int cmd_classify(const std::string& params_file, const std::string& het_file,
                 const std::string& out) {
    const auto rp = sdo::read_params_file(params_file);
    if (!(rp.params.eps > 0.0))
        throw sdo::ConfigError("classify requires eps > 0");
    const auto hc = load_het_csv(het_file);
    const auto g = sdo::GammaVector::from(rp.params, rp.sigmoid);
    const auto sp = sdo::scale_params_inverse(rp.params.eps, rp.params.mu,
                                              rp.params.eta, g.k);
    const auto v = sdo::classify_regime(rp.params.eps, sp.mu1, sp.eta1, g, hc,
                                        rp.sigmoid);
    json j;
    j["eps"] = jnum(v.eps);
    j["mu1"] = jnum(v.mu1);
    j["eta1"] = jnum(v.eta1);
    j["predicted_exists"] = v.predicted_exists;
    j["observed_exists"] = v.observed_exists;
    if (std::isfinite(v.hausdorff_to_singular))
        j["hausdorff_to_singular"] = jnum(v.hausdorff_to_singular);
    j["inconclusive"] = v.inconclusive;
    j["agree"] = v.agree;
    const std::string text = j.dump(2) + "\n";
    sdo::write_text_file(out_path(out, "classify.json"), text);
    std::printf("%s", text.c_str());
    return 0;
}

int cmd_blowup_verify(int k, unsigned seed, const std::string& out) {
    const auto rep = sdo::verify_blowup_geometry(k, seed);
    sdo::write_text_file(out_path(out, "blowup_verify.csv"), rep.to_csv());
    std::printf("%s", rep.to_csv().c_str());
    if (!rep.all_pass()) return fail(2, "verification", "blow-up residuals exceed tolerance");
    return 0;
}

int cmd_cycle(const std::string& params_file, bool reverse_time, double x0, double y0,
              const std::string& out) {
    const auto rp = sdo::read_params_file(params_file);
    const auto field = make_field(rp);
    const sdo::IntegratorConfig cfg = run_config();
    Eigen::Vector2d seed(x0, y0);
    if (!reverse_time) {
        const auto tr = sdo::integrate<2>(field, seed, 0.0, 300.0, cfg);
        seed = tr.y.back();
    }
    const sdo::Section sec{{1.0, 0.02}, {1.0, 4.0}, +1};
    const auto cyc = sdo::find_limit_cycle(field, seed, sec, cfg, reverse_time);
    if (!cyc) return fail(2, "numerical", "no limit cycle found from the given state");
    std::string csv = "t,x,y\n";
    for (std::size_t i = 0; i < cyc->t.size(); ++i)
        csv += sdo::csv_row({sdo::format_g17(cyc->t[i]),
                             sdo::format_g17(cyc->samples[i][0]),
                             sdo::format_g17(cyc->samples[i][1])});
    sdo::write_text_file(out_path(out, "cycle.csv"), csv);
    json j;
    j["period"] = jnum(cyc->period);
    j["max_x"] = jnum(cyc->max_x);
    j["l2_norm"] = jnum(cyc->l2_norm);
    j["multiplier"] = jnum(cyc->multiplier);
    j["stability"] =
        cyc->stability == sdo::CycleStability::Attracting ? "attracting" : "repelling";
    const std::string text = j.dump(2) + "\n";
    sdo::write_text_file(out_path(out, "cycle.json"), text);
    std::printf("%s", text.c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"substrate-depletion oscillator workbench"};
    app.require_subcommand(1);

    std::string params_file, gamma_file, het_file, out_dir = ".", side = "L";
    double tmax = 100.0, eta_min = 0.9, eta_max = 1.05, mu1_max = 1.5;
    double x0 = 1.0, y0 = 2.0;
    int n = 100, k = 1;
    unsigned seed = 0;
    bool reverse_time = false;

    auto* sim = app.add_subcommand("simulate", "integrate the full system");
    sim->add_option("--params", params_file)->required();
    sim->add_option("--tmax", tmax)->required();
    sim->add_option("--x0", x0);
    sim->add_option("--y0", y0);
    sim->add_option("--out", out_dir);

    auto* bif = app.add_subcommand("bifurcate", "sweep eta and assemble the diagram");
    bif->add_option("--params", params_file)->required();
    bif->add_option("--eta-min", eta_min)->required();
    bif->add_option("--eta-max", eta_max)->required();
    bif->add_option("--n", n)->required();
    bif->add_option("--out", out_dir);

    auto* het = app.add_subcommand("het-curve", "heteroclinic connection curves");
    het->add_option("--gamma", gamma_file)->required();
    het->add_option("--mu1-max", mu1_max)->required();
    het->add_option("--n", n)->required();
    het->add_option("--out", out_dir);

    auto* hopf = app.add_subcommand("hopf-check", "closed form vs numeric Hopf");
    hopf->add_option("--gamma", gamma_file)->required();
    hopf->add_option("--side", side)->required()->check(CLI::IsMember({"L", "R"}));
    hopf->add_option("--out", out_dir);

    auto* cls = app.add_subcommand("classify", "singular prediction vs observation");
    cls->add_option("--params", params_file)->required();
    cls->add_option("--het", het_file)->required();
    cls->add_option("--out", out_dir);

    auto* ver = app.add_subcommand("blowup-verify", "geometry residual table");
    ver->add_option("--k", k)->required();
    ver->add_option("--seed", seed);
    ver->add_option("--out", out_dir);

    auto* cyc = app.add_subcommand("cycle", "locate a limit cycle");
    cyc->add_option("--params", params_file)->required();
    cyc->add_flag("--reverse-time", reverse_time);
    cyc->add_option("--x0", x0);
    cyc->add_option("--y0", y0);
    cyc->add_option("--out", out_dir);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        json j;
        j["error"] = {{"kind", "config"}, {"message", e.what()}};
        std::fprintf(stderr, "%s\n", j.dump(2).c_str());
        return 3;
    }

    try {
        if (app.got_subcommand(sim)) return cmd_simulate(params_file, tmax, x0, y0, out_dir);
        if (app.got_subcommand(bif))
            return cmd_bifurcate(params_file, eta_min, eta_max, n, out_dir);
        if (app.got_subcommand(het)) return cmd_het_curve(gamma_file, mu1_max, n, out_dir);
        if (app.got_subcommand(hopf)) return cmd_hopf_check(gamma_file, side, out_dir);
        if (app.got_subcommand(cls)) return cmd_classify(params_file, het_file, out_dir);
        if (app.got_subcommand(ver)) return cmd_blowup_verify(k, seed, out_dir);
        if (app.got_subcommand(cyc))
            return cmd_cycle(params_file, reverse_time, x0, y0, out_dir);
    } catch (const sdo::ConfigError& e) {
        return fail(3, "config", e.what());
    } catch (const sdo::ModelError& e) {
        return fail(3, "config", e.what());
    } catch (const std::invalid_argument& e) {
        return fail(3, "config", e.what());
    } catch (const std::exception& e) {
        return fail(2, "numerical", e.what());
    }
    return 3;
}
