// fracvisc command-line front end: evaluate the Mittag-Leffler kernel, emit
// the relaxation/energy curve CSVs, and run the verification suite.
//
// Exit codes: 0 success, 1 verification failure, 2 usage or domain error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "fracvisc/fracvisc.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace fracvisc;

namespace {

struct GridSpec {
    int figure1_points = 200;
    int figure2_points = 400;
    double figure2_t_max = 10.0; // in units of tau0
    int relax_points = 400;
    double relax_t_max = 10.0;
};

struct RunConfig {
    MaterialParams material;
    double sigma0 = 0.5;
    MLConfig ml;
    QuadratureConfig quad;
    OdeConfig ode;
    GridSpec grids;
    std::string output_dir = ".";
};

void apply_json(RunConfig& cfg, const fs::path& file) {
    std::ifstream in(file);
    if (!in) throw domain_error("config file not found: " + file.string());
    json j = json::parse(in);
    if (j.contains("material")) {
        const json& m = j["material"];
        if (m.contains("alpha")) cfg.material.alpha = m["alpha"];
        if (m.contains("tau0")) cfg.material.tau0 = m["tau0"];
        if (m.contains("k0")) cfg.material.k0 = m["k0"];
        if (m.contains("rho_mu")) {
            cfg.material.rho_star = 1.0;
            cfg.material.mu0 = m["rho_mu"];
        }
        if (m.contains("rho_star")) cfg.material.rho_star = m["rho_star"];
        if (m.contains("mu0")) cfg.material.mu0 = m["mu0"];
        if (m.contains("eps0")) cfg.material.eps0 = m["eps0"];
    }
    if (j.contains("sigma0")) cfg.sigma0 = j["sigma0"];
    if (j.contains("ml")) {
        const json& m = j["ml"];
        if (m.contains("series_tol")) cfg.ml.series_tol = m["series_tol"];
        if (m.contains("crossover")) cfg.ml.crossover = m["crossover"];
        if (m.contains("max_terms")) cfg.ml.max_terms = m["max_terms"];
    }
    if (j.contains("quad")) {
        const json& m = j["quad"];
        if (m.contains("rel_tol")) cfg.quad.rel_tol = m["rel_tol"];
        if (m.contains("abs_tol")) cfg.quad.abs_tol = m["abs_tol"];
        if (m.contains("tail_start")) cfg.quad.tail_start = m["tail_start"];
        if (m.contains("max_subdivisions")) cfg.quad.max_subdivisions = m["max_subdivisions"];
    }
    if (j.contains("ode")) {
        const json& m = j["ode"];
        if (m.contains("rel_tol")) cfg.ode.rel_tol = m["rel_tol"];
        if (m.contains("abs_tol")) cfg.ode.abs_tol = m["abs_tol"];
        if (m.contains("t_start_offset")) cfg.ode.t_start_offset = m["t_start_offset"];
        if (m.contains("max_steps")) cfg.ode.max_steps = m["max_steps"];
    }
    if (j.contains("grids")) {
        const json& g = j["grids"];
        if (g.contains("figure1_points")) cfg.grids.figure1_points = g["figure1_points"];
        if (g.contains("figure2_points")) cfg.grids.figure2_points = g["figure2_points"];
        if (g.contains("figure2_t_max")) cfg.grids.figure2_t_max = g["figure2_t_max"];
        if (g.contains("relax_points")) cfg.grids.relax_points = g["relax_points"];
        if (g.contains("relax_t_max")) cfg.grids.relax_t_max = g["relax_t_max"];
    }
    if (j.contains("output_dir")) cfg.output_dir = j["output_dir"];
}

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        v[static_cast<std::size_t>(i)] = a + (b - a) * i / (n - 1);
    v.back() = b;
    return v;
}

std::vector<double> logspace(double a, double b, int n) {
    std::vector<double> v(static_cast<std::size_t>(n));
    double la = std::log(a), lb = std::log(b);
    for (int i = 0; i < n; ++i)
        v[static_cast<std::size_t>(i)] = std::exp(la + (lb - la) * i / (n - 1));
    v.back() = b;
    return v;
}

std::vector<std::pair<std::string, std::string>> provenance(const RunConfig& cfg,
                                                            const std::string& cmd) {
    return {{"command", cmd},
            {"alpha", format_full(cfg.material.alpha)},
            {"tau0", format_full(cfg.material.tau0)},
            {"k0", format_full(cfg.material.k0)},
            {"rho_mu", format_full(cfg.material.rho_mu())},
            {"sigma0", format_full(cfg.sigma0)}};
}

// append provenance entries whose keys the curve metadata does not carry yet
void merge_provenance(SampledCurve& curve, const RunConfig& cfg, const std::string& cmd) {
    for (auto& [key, value] : provenance(cfg, cmd)) {
        bool present = false;
        for (const auto& [k, v] : curve.meta)
            if (k == key) present = true;
        if (!present) curve.meta.emplace_back(key, value);
    }
}

// short numeric tag for report names (full precision stays in the CSV data)
std::string label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

void write_text_atomic(const fs::path& path, const std::string& text) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp);
        out << text;
    }
    fs::rename(tmp, path);
}

int cmd_ml_eval(const RunConfig& cfg, double beta, const std::vector<double>& zs) {
    std::printf("alpha,beta,z,value\n");
    for (double z : zs) {
        double v = ml_two(cfg.material.alpha, beta, z, cfg.ml);
        std::printf("%s,%s,%s,%s\n", format_full(cfg.material.alpha).c_str(),
                    format_full(beta).c_str(), format_full(z).c_str(),
                    format_full(v).c_str());
    }
    return 0;
}

int cmd_figure1(const RunConfig& cfg) {
    const MaterialParams& p = cfg.material;
    p.require_energy_domain(); // alpha <= 1/2 is a domain error here
    std::vector<double> grid = linspace(0.005, 1.0, cfg.grids.figure1_points);
    EnergyTauCurves curves = sample_energy_and_tau(p, grid, cfg.quad, cfg.ml);
    fs::create_directories(cfg.output_dir);

    SampledCurve tau = curves.tau;
    merge_provenance(tau, cfg, "figure1");
    write_csv(fs::path(cfg.output_dir) / "fig1_tau.csv", tau);

    SampledCurve energy = curves.energy.as_curve();
    merge_provenance(energy, cfg, "figure1");
    write_csv(fs::path(cfg.output_dir) / "fig1_energy.csv", energy);
    std::printf("wrote %s and %s\n",
                (fs::path(cfg.output_dir) / "fig1_tau.csv").string().c_str(),
                (fs::path(cfg.output_dir) / "fig1_energy.csv").string().c_str());
    return 0;
}

int cmd_figure2(const RunConfig& cfg) {
    const MaterialParams& p = cfg.material;
    p.validate();
    if (!(cfg.sigma0 < p.k0))
        throw domain_error("figure2: requires sigma0 < k0");
    double c = offset_c(cfg.sigma0, p, 1e-12, default_sigma_floor, cfg.ml);
    std::vector<double> tbar = linspace(0.0, cfg.grids.figure2_t_max,
                                        cfg.grids.figure2_points);
    CsvTable t;
    t.meta = provenance(cfg, "figure2");
    t.meta.push_back({"offset_c_over_tau0", format_full(c / p.tau0)});
    t.columns = {"t_over_tau0", "sigma_R", "sigma_F", "sigma_ub"};
    const double s0bar = cfg.sigma0 / p.k0;
    for (double tb : tbar) {
        double kernel = ml_relax(p.alpha, tb, cfg.ml);
        double sR = ml_relax(p.alpha, tb + c / p.tau0, cfg.ml);
        double sF = s0bar * kernel;
        t.rows.push_back({tb, sR, sF, kernel});
    }
    fs::create_directories(cfg.output_dir);
    write_csv(fs::path(cfg.output_dir) / "fig2.csv", t);
    std::printf("wrote %s\n", (fs::path(cfg.output_dir) / "fig2.csv").string().c_str());
    return 0;
}

int cmd_relax(const RunConfig& cfg, bool with_ode) {
    const MaterialParams& p = cfg.material;
    p.validate();
    std::vector<double> t_grid =
        linspace(0.0, cfg.grids.relax_t_max * p.tau0, cfg.grids.relax_points);
    fs::create_directories(cfg.output_dir);

    RelaxationCurve frac = sample_fractional(t_grid, cfg.sigma0, p, cfg.ml);
    SampledCurve fc = frac.as_curve();
    merge_provenance(fc, cfg, "relax");
    write_csv(fs::path(cfg.output_dir) / "relax_fractional.csv", fc);

    RelaxationCurve ret = sample_ret_closed(t_grid, cfg.sigma0, p, 1e-12, cfg.ml);
    SampledCurve rc = ret.as_curve();
    merge_provenance(rc, cfg, "relax");
    write_csv(fs::path(cfg.output_dir) / "relax_ret_closed.csv", rc);

    if (with_ode) {
        RelaxationCurve ode = sigma_ret_ode(t_grid, cfg.sigma0, p, cfg.ode, cfg.ml);
        SampledCurve oc = ode.as_curve();
        merge_provenance(oc, cfg, "relax");
        write_csv(fs::path(cfg.output_dir) / "relax_ret_ode.csv", oc);
    }
    std::printf("wrote relaxation curves to %s\n", cfg.output_dir.c_str());
    return 0;
}

int cmd_energy(const RunConfig& cfg, int points) {
    const MaterialParams& p = cfg.material;
    p.require_energy_domain();
    std::vector<double> grid = linspace(0.005, 1.0, points);
    EnergyTauCurves curves = sample_energy_and_tau(p, grid, cfg.quad, cfg.ml);
    fs::create_directories(cfg.output_dir);
    SampledCurve energy = curves.energy.as_curve();
    merge_provenance(energy, cfg, "energy");
    write_csv(fs::path(cfg.output_dir) / "energy.csv", energy);
    std::printf("wrote %s\n", (fs::path(cfg.output_dir) / "energy.csv").string().c_str());
    return 0;
}

int cmd_tau(const RunConfig& cfg, int points) {
    const MaterialParams& p = cfg.material;
    p.validate();
    std::vector<double> grid = linspace(0.005, 1.0, points);
    CsvTable t;
    t.meta = provenance(cfg, "tau");
    t.meta.push_back({"normalization", "tau/tau0"});
    t.columns = {"sigma_over_k0", "value"};
    for (double sb : grid) {
        TauOfSigma r = relaxation_time_of_sigma(sb * p.k0, p, 1e-12,
                                                default_sigma_floor, cfg.ml);
        t.rows.push_back({sb, r.tau / p.tau0});
    }
    fs::create_directories(cfg.output_dir);
    write_csv(fs::path(cfg.output_dir) / "tau.csv", t);
    std::printf("wrote %s\n", (fs::path(cfg.output_dir) / "tau.csv").string().c_str());
    return 0;
}

// The verification matrix: every check appends a report; the command fails
// (exit 1) if any report fails.
int cmd_verify(const RunConfig& cfg) {
    std::vector<VerificationReport> reports;
    const double tau0 = cfg.material.tau0;

    // Mittag-Leffler self-checks
    {
        VerificationReport rep;
        rep.check = "ml_derivative_consistency";
        rep.tolerance = 1e-6;
        double worst = 0.0, worst_x = 0.0;
        for (double x = 0.1; x <= 10.0; x *= 1.25) {
            double h = 1e-6 * std::max(x, 1.0);
            double fd = (ml_relax(0.6, x + h, cfg.ml) - ml_relax(0.6, x - h, cfg.ml)) /
                        (2.0 * h);
            double an = ml_relax_deriv(0.6, x, cfg.ml);
            double rel = std::fabs(fd - an) / std::fabs(an);
            if (rel > worst) {
                worst = rel;
                worst_x = x;
            }
        }
        rep.pass = worst <= rep.tolerance;
        rep.worst_violation = worst;
        rep.worst_location = worst_x;
        reports.push_back(rep);
    }
    {
        VerificationReport rep;
        rep.check = "ml_exponential_reduction";
        rep.tolerance = 1e-12;
        double worst = 0.0, worst_z = 0.0;
        for (double z = -20.0; z <= 0.0; z += 0.5) {
            double rel = std::fabs(ml_one(1.0, z, cfg.ml) - std::exp(z)) /
                         std::exp(z);
            if (rel > worst) {
                worst = rel;
                worst_z = z;
            }
        }
        rep.pass = worst <= rep.tolerance;
        rep.worst_violation = worst;
        rep.worst_location = worst_z;
        reports.push_back(rep);
    }

    // boundedness dichotomy
    for (double a : {0.5, 0.6, 0.75, 0.9, 1.0}) {
        VerificationReport rep;
        rep.check = "energy_boundedness_alpha_" + label(a);
        rep.tolerance = 1e-6;
        MaterialParams p = cfg.material;
        p.alpha = a;
        if (a <= 0.5) {
            // the negative branch: the non-integrability error is the pass
            try {
                (void)e0_constant(p, cfg.quad, cfg.ml);
                rep.pass = false;
                rep.note = "expected non_integrable_error was not raised";
            } catch (const non_integrable_error&) {
                rep.pass = true;
                rep.note = "non-integrable as required for alpha <= 1/2";
            }
        } else {
            QuadratureConfig q2 = cfg.quad;
            q2.tail_start = 2.0 * cfg.quad.tail_start;
            double v1 = e0_constant(p, cfg.quad, cfg.ml);
            double v2 = e0_constant(p, q2, cfg.ml);
            double rel = std::fabs(v1 - v2) / std::fabs(v2);
            rep.pass = rel <= rep.tolerance;
            rep.worst_violation = rel;
            rep.note = "e0 stable under tail_start doubling";
        }
        reports.push_back(rep);
    }

    // coincident solution at sigma0 = k0
    {
        MaterialParams p = cfg.material;
        VerificationReport rep;
        rep.check = "coincident_solution_sigma0_k0";
        rep.tolerance = 1e-12;
        double worst = 0.0, worst_t = 0.0;
        double c = offset_c(p.k0, p, 1e-13, default_sigma_floor, cfg.ml);
        for (double tb : logspace(1e-3, 100.0, 80)) {
            double sR = ml_relax(p.alpha, tb + c / tau0, cfg.ml);
            double sF = ml_relax(p.alpha, tb, cfg.ml);
            double rel = std::fabs(sR - sF) / sF;
            if (rel > worst) {
                worst = rel;
                worst_t = tb;
            }
        }
        rep.pass = worst <= rep.tolerance;
        rep.worst_violation = worst;
        rep.worst_location = worst_t;
        reports.push_back(rep);
    }

    // envelope bounds across the (alpha, sigma0) matrix
    for (double a : {0.6, 0.75, 0.9})
        for (double s0 : {0.25, 0.5, 0.9}) {
            MaterialParams p = cfg.material;
            p.alpha = a;
            std::vector<double> grid = linspace(0.05 * tau0, 10.0 * tau0, 200);
            VerificationReport rep =
                verify_envelope_bounds(s0 * p.k0, p, grid, 1e-12, cfg.ml);
            rep.check += "_alpha_" + label(a) + "_s0_" + label(s0);
            reports.push_back(rep);
        }

    // ODE route against the closed form
    for (double a : {0.6, 0.9}) {
        MaterialParams p = cfg.material;
        p.alpha = a;
        std::vector<double> grid = linspace(0.0, 10.0 * tau0, 101);
        RelaxationCurve ode = sigma_ret_ode(grid, 0.5 * p.k0, p, cfg.ode, cfg.ml);
        RelaxationCurve closed = sample_ret_closed(grid, 0.5 * p.k0, p, 1e-13, cfg.ml);
        VerificationReport rep;
        rep.check = "ode_vs_closed_alpha_" + label(a);
        rep.tolerance = std::max(10.0 * cfg.ode.rel_tol, 1e-6);
        double worst = 0.0, worst_t = 0.0;
        for (std::size_t i = 1; i < grid.size(); ++i) {
            double rel = std::fabs(ode.sigma_over_k0[i] - closed.sigma_over_k0[i]) /
                         closed.sigma_over_k0[i];
            if (rel > worst) {
                worst = rel;
                worst_t = grid[i];
            }
        }
        rep.pass = worst <= rep.tolerance;
        rep.worst_violation = worst;
        rep.worst_location = worst_t;
        reports.push_back(rep);
    }

    // dissipation identity; log-spaced through the singular layer, uniform
    // beyond so the finite-difference truncation stays flat in t
    for (double s0 : {1.0, 0.5}) {
        MaterialParams p = cfg.material;
        std::vector<double> grid{0.0};
        for (double t : logspace(1e-3 * tau0, tau0, 800)) grid.push_back(t);
        for (int i = 1; i <= 2600; ++i) grid.push_back(tau0 * (1.0 + 9.0 * i / 2600.0));
        RelaxationCurve curve = sample_ret_closed(grid, s0 * p.k0, p, 1e-13, cfg.ml);
        VerificationReport rep = dissipation_check(curve, p, cfg.quad, 1e-4, cfg.ml);
        rep.check += "_s0_" + label(s0);
        reports.push_back(rep);
    }

    // fractional residual: the fractional modulus satisfies the equation,
    // the nonlinear one (sigma0 < k0) must not
    {
        MaterialParams p = cfg.material;
        CaputoMesh mesh = CaputoMesh::graded(10.0 * tau0, 1000, 2.0);
        RelaxationCurve cf = sample_fractional(mesh.nodes, 0.5 * p.k0, p, cfg.ml);
        VerificationReport rep = residual_fractional(cf, p, mesh, 1e-2);
        reports.push_back(rep);
        RelaxationCurve cr = sample_ret_closed(mesh.nodes, 0.5 * p.k0, p, 1e-12, cfg.ml);
        VerificationReport rep2 = residual_fractional(cr, p, mesh, 1e-2);
        VerificationReport distinct;
        distinct.check = "nonlinear_curve_not_fractional_solution";
        distinct.tolerance = 10.0 * rep.worst_violation;
        distinct.worst_violation = rep2.worst_violation;
        distinct.pass = rep2.worst_violation > 10.0 * rep.worst_violation;
        distinct.note = "nonlinear-model residual must stay above 10x the "
                        "fractional-model residual";
        reports.push_back(distinct);
    }

    fs::create_directories(cfg.output_dir);
    bool all_pass = true;
    std::string summary;
    for (const VerificationReport& rep : reports) {
        all_pass = all_pass && rep.pass;
        std::printf("%-52s %s\n", rep.check.c_str(), rep.pass ? "PASS" : "FAIL");
        summary += rep.to_text() + "\n";
        write_text_atomic(fs::path(cfg.output_dir) / ("report_" + rep.check + ".txt"),
                          rep.to_text());
        write_text_atomic(fs::path(cfg.output_dir) / ("report_" + rep.check + ".kv"),
                          rep.to_key_value());
    }
    write_text_atomic(fs::path(cfg.output_dir) / "verify_summary.txt", summary);
    std::printf("%s\n", all_pass ? "all checks passed" : "SOME CHECKS FAILED");
    return all_pass ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"fractional and nonlinear viscoelastic relaxation toolkit"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_file;
    double alpha_flag = 0, tau0_flag = 0, k0_flag = 0, rho_mu_flag = 0, sigma0_flag = 0;
    std::string out_dir_flag;
    app.add_option("--config", config_file, "JSON configuration file");
    auto* o_alpha = app.add_option("--alpha", alpha_flag, "fractional order");
    auto* o_tau0 = app.add_option("--tau0", tau0_flag, "relaxation time constant");
    auto* o_k0 = app.add_option("--k0", k0_flag, "structural stress constant");
    auto* o_rhomu = app.add_option("--rho-mu", rho_mu_flag, "product rho* mu(eps0)");
    auto* o_sigma0 = app.add_option("--sigma0", sigma0_flag, "initial stress");
    auto* o_outdir = app.add_option("--out-dir", out_dir_flag, "output directory");

    auto* ml_eval = app.add_subcommand("ml-eval", "evaluate E_{alpha,beta}(z)");
    double beta = 1.0;
    std::vector<double> zs;
    ml_eval->add_option("--beta", beta, "second parameter (default 1)");
    ml_eval->add_option("--z", zs, "arguments z <= 0")->required();

    auto* figure1 = app.add_subcommand(
        "figure1", "normalized relaxation time and viscous energy vs sigma/k0");
    auto* figure2 = app.add_subcommand(
        "figure2", "relaxation moduli sigma_R, sigma_F and the upper bound vs t/tau0");
    auto* relax = app.add_subcommand("relax", "relaxation curves as CSV");
    bool with_ode = false;
    relax->add_flag("--with-ode", with_ode, "also integrate the ODE route");
    auto* energy = app.add_subcommand("energy", "viscous energy curve as CSV");
    auto* tau = app.add_subcommand("tau", "nonlinear relaxation time curve as CSV");
    int points = 200;
    energy->add_option("--points", points, "grid points");
    tau->add_option("--points", points, "grid points");
    auto* verify = app.add_subcommand("verify", "run the verification suite");

    CLI11_PARSE(app, argc, argv);

    try {
        RunConfig cfg;
        if (!config_file.empty()) apply_json(cfg, config_file);
        if (*o_alpha) cfg.material.alpha = alpha_flag;
        if (*o_tau0) cfg.material.tau0 = tau0_flag;
        if (*o_k0) cfg.material.k0 = k0_flag;
        if (*o_rhomu) {
            cfg.material.rho_star = 1.0;
            cfg.material.mu0 = rho_mu_flag;
        }
        if (*o_sigma0) cfg.sigma0 = sigma0_flag;
        if (*o_outdir) cfg.output_dir = out_dir_flag;
        cfg.material.validate();
        cfg.ml.validate();
        cfg.quad.validate();
        cfg.ode.validate();

        if (*ml_eval) return cmd_ml_eval(cfg, beta, zs);
        if (*figure1) return cmd_figure1(cfg);
        if (*figure2) return cmd_figure2(cfg);
        if (*relax) return cmd_relax(cfg, with_ode);
        if (*energy) return cmd_energy(cfg, points);
        if (*tau) return cmd_tau(cfg, points);
        if (*verify) return cmd_verify(cfg);
    } catch (const domain_error& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return 2;
    } catch (const convergence_error& e) {
        std::cerr << "convergence error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
