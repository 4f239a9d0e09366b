// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Each criterion carries its runtime budget; exceeding it fails the
// criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "fracvisc/fracvisc.hpp"
#include "oracle/ml_reference.hpp"

namespace fs = std::filesystem;
using namespace fracvisc;

namespace {

struct Checker {
    bool ok = true;
    std::string detail;

    void require(bool cond, const std::string& what) {
        if (!cond && ok) {
            ok = false;
            detail = what;
        }
    }
};

double rel_err(double got, double want) {
    return std::fabs(got - want) / std::fabs(want);
}

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = a + (b - a) * i / (n - 1);
    v.back() = b;
    return v;
}

std::vector<double> logspace(double a, double b, int n) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        v[static_cast<std::size_t>(i)] =
            std::exp(std::log(a) + (std::log(b) - std::log(a)) * i / (n - 1));
    v.back() = b;
    return v;
}

MaterialParams params(double alpha) {
    MaterialParams p;
    p.alpha = alpha;
    return p;
}

int failures = 0;

void run_criterion(int id, const std::string& label, double budget_seconds,
                   const std::function<void(Checker&)>& body) {
    Checker c;
    auto start = std::chrono::steady_clock::now();
    try {
        body(c);
    } catch (const std::exception& e) {
        c.require(false, std::string("exception: ") + e.what());
    }
    double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    c.require(seconds < budget_seconds,
              "runtime " + std::to_string(seconds) + "s exceeds budget");
    if (!c.ok) ++failures;
    std::printf("criterion %d [%s]: %s (%.2fs)%s%s\n", id, label.c_str(),
                c.ok ? "PASS" : "FAIL", seconds, c.ok ? "" : " -- ",
                c.ok ? "" : c.detail.c_str());
    std::fflush(stdout);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

int main() {
    // 1. kernel accuracy against the extended-precision oracle, plus the
    //    monotone approach to the algebraic large-argument branch
    run_criterion(1, "mittag-leffler accuracy", 5.0, [](Checker& c) {
        for (double a : {0.51, 0.55, 0.6, 0.65, 0.7, 0.75, 0.8, 0.85, 0.9, 0.95, 1.0}) {
            for (int i = 0; i <= 40; ++i) {
                double z = -5.0 + 5.0 * i / 40.0;
                if (z > 0.0) z = 0.0;
                double got = ml_one(a, z);
                double want = ml_reference::ml(a, 1.0, z);
                c.require(rel_err(got, want) <= 1e-10,
                          "oracle deviation at alpha=" + std::to_string(a) +
                              " z=" + std::to_string(z));
            }
            for (double z : {-1e-3, -1e-6}) {
                c.require(rel_err(ml_one(a, z), ml_reference::ml(a, 1.0, z)) <= 1e-10,
                          "oracle deviation near zero");
            }
        }
        for (double a : {0.51, 0.55, 0.6, 0.65, 0.7, 0.75, 0.8, 0.85, 0.9, 0.95}) {
            double prev = 1e300;
            for (double x : {1e2, 1e3, 1e4}) {
                double lead = std::pow(x, -a) / detail::gamma_fn(1.0 - a);
                double dev = std::fabs(ml_relax(a, x) / lead - 1.0);
                c.require(dev < prev, "large-argument deviation not improving");
                prev = dev;
            }
        }
    });

    // 2. the classical limit: constant relaxation time and quadratic energy
    run_criterion(2, "alpha=1 classical reduction", 5.0, [](Checker& c) {
        MaterialParams p;
        p.alpha = 1.0;
        p.tau0 = 1.7;
        p.k0 = 2.0;
        p.rho_star = 1.0;
        p.mu0 = 3.0;
        for (double sb : linspace(0.01, 1.0, 100)) {
            double tau = relaxation_time_of_sigma(sb * p.k0, p).tau;
            c.require(rel_err(tau, p.tau0) <= 1e-10, "tau(sigma) != tau0");
            double e = viscous_energy(sb * p.k0, p);
            double want = p.tau0 * sb * sb * p.k0 * p.k0 / (2.0 * p.rho_mu());
            c.require(rel_err(e, want) <= 1e-8, "energy quadratic law");
        }
        double e0 = e0_constant(p);
        c.require(rel_err(e0, p.tau0 * p.k0 * p.k0 / (2.0 * p.rho_mu())) <= 1e-8,
                  "e0 closed form");
    });

    // 3. bounded energy iff alpha > 1/2, stable under tail_start doubling
    run_criterion(3, "energy boundedness dichotomy", 30.0, [](Checker& c) {
        for (double a : {0.51, 0.6, 0.75, 0.9}) {
            QuadratureConfig q1;
            QuadratureConfig q2;
            q2.tail_start = 2.0 * q1.tail_start;
            double v1 = e0_constant(params(a), q1);
            double v2 = e0_constant(params(a), q2);
            c.require(rel_err(v1, v2) <= 1e-6,
                      "tail_start doubling unstable at alpha=" + std::to_string(a));
        }
        for (double a : {0.3, 0.5}) {
            bool threw = false;
            try {
                (void)e0_constant(params(a));
            } catch (const non_integrable_error&) {
                threw = true;
            }
            c.require(threw, "non-integrability not signaled at alpha=" +
                                 std::to_string(a));
        }
    });

    // 4. the coincident solution at sigma0 = k0, including the ODE route
    run_criterion(4, "coincident solution at sigma0=k0", 10.0, [](Checker& c) {
        MaterialParams p = params(0.6);
        std::vector<double> grid = logspace(1e-3, 100.0, 150);
        grid.insert(grid.begin(), 0.0);
        for (double t : grid) {
            double sR = sigma_ret_closed(t, p.k0, p, 1e-13);
            double sF = sigma_fractional(t, p.k0, p);
            c.require(rel_err(sR, sF) <= 1e-12, "closed forms diverge");
        }
        std::vector<double> ogrid = linspace(0.0, 100.0, 201);
        RelaxationCurve ode = sigma_ret_ode(ogrid, p.k0, p);
        for (std::size_t i = 0; i < ogrid.size(); ++i) {
            double want = sigma_fractional(ogrid[i], p.k0, p);
            c.require(rel_err(ode.sigma_over_k0[i] * p.k0, want) <= 1e-6,
                      "ODE route deviates at t=" + std::to_string(ogrid[i]));
        }
    });

    // 5. strict two-sided envelope and the monotone ratio limit
    run_criterion(5, "relaxation envelope bounds", 10.0, [](Checker& c) {
        for (double a : {0.6, 0.75, 0.9})
            for (double s0 : {0.25, 0.5, 0.9}) {
                MaterialParams p = params(a);
                std::vector<double> grid = linspace(10.0 / 400.0, 10.0, 400);
                VerificationReport rep = verify_envelope_bounds(s0, p, grid);
                c.require(rep.pass, "envelope violated at alpha=" + std::to_string(a) +
                                        " sigma0=" + std::to_string(s0) + ": " +
                                        rep.note);
            }
        MaterialParams p = params(0.6);
        double cshift = offset_c(0.5, p, 1e-13);
        double ratio = p.k0 * ml_relax(0.6, 100.0 + cshift) /
                       sigma_fractional(100.0, 0.5, p);
        c.require(std::fabs(ratio - 2.0) / 2.0 <= 0.02,
                  "ratio at t=100 tau0 outside 2% of k0/sigma0");
    });

    // 6. dissipation identity along every generated nonlinear trajectory
    run_criterion(6, "dissipation identity", 10.0, [](Checker& c) {
        // log-spaced through the singular layer, uniform beyond (log steps
        // would let the finite-difference truncation grow like t^2 on
        // exponential-decay stretches)
        std::vector<double> grid{0.0};
        for (double t : logspace(1e-3, 1.0, 800)) grid.push_back(t);
        for (int i = 1; i <= 2600; ++i) grid.push_back(1.0 + 9.0 * i / 2600.0);
        struct Case {
            double alpha, sigma0;
        };
        for (Case k : {Case{0.6, 1.0}, Case{0.6, 0.5}, Case{0.75, 0.5}, Case{0.9, 0.9}}) {
            MaterialParams p = params(k.alpha);
            RelaxationCurve curve = sample_ret_closed(grid, k.sigma0, p, 1e-13);
            VerificationReport rep = dissipation_check(curve, p, {}, 1e-4);
            c.require(rep.pass, "dissipation identity failed at alpha=" +
                                    std::to_string(k.alpha) + " sigma0=" +
                                    std::to_string(k.sigma0) + " worst=" +
                                    std::to_string(rep.worst_violation));
        }
    });

    // 7. fractional residual: small for the fractional modulus, shrinking
    //    with refinement, and bounded away from zero for the nonlinear one
    run_criterion(7, "fractional equation residual", 60.0, [](Checker& c) {
        double res_frac_06 = 0.0;
        for (double a : {0.6, 0.75, 0.9}) {
            MaterialParams p = params(a);
            CaputoMesh m2000 = CaputoMesh::graded(10.0, 2000, 2.0);
            RelaxationCurve f2000 = sample_fractional(m2000.nodes, 0.5, p);
            VerificationReport r2000 = residual_fractional(f2000, p, m2000, 1e-2);
            c.require(r2000.pass, "residual above 1e-2 at alpha=" + std::to_string(a));
            CaputoMesh m4000 = CaputoMesh::graded(10.0, 4000, 2.0);
            RelaxationCurve f4000 = sample_fractional(m4000.nodes, 0.5, p);
            VerificationReport r4000 = residual_fractional(f4000, p, m4000, 1e-2);
            c.require(r4000.worst_violation < r2000.worst_violation,
                      "residual did not decrease when N doubled");
            if (a == 0.6) res_frac_06 = r2000.worst_violation;
        }
        MaterialParams p = params(0.6);
        CaputoMesh mesh = CaputoMesh::graded(10.0, 2000, 2.0);
        RelaxationCurve ret = sample_ret_closed(mesh.nodes, 0.5, p, 1e-12);
        double res_ret = residual_fractional(ret, p, mesh).worst_violation;
        c.require(res_ret > 10.0 * res_frac_06,
                  "nonlinear-curve residual not bounded away from zero");
    });

    // 8. figure reproduction through the CLI: row-wise shape constraints
    run_criterion(8, "figure reproduction", 10.0, [](Checker& c) {
        fs::path dir = fs::temp_directory_path() / "fracvisc_acceptance";
        fs::remove_all(dir);
        fs::create_directories(dir);
        auto cli = [&](const std::string& args) {
            std::string cmd = std::string(FRACVISC_CLI_PATH) + " " + args + " > " +
                              (dir / "log.txt").string();
            return WEXITSTATUS(std::system(cmd.c_str()));
        };
        c.require(cli("figure1 --out-dir " + dir.string()) == 0, "figure1 failed");
        c.require(cli("figure2 --out-dir " + dir.string()) == 0, "figure2 failed");

        CsvTable tau = read_csv(dir / "fig1_tau.csv");
        CsvTable energy = read_csv(dir / "fig1_energy.csv");
        c.require(tau.rows.size() == 200 && energy.rows.size() == 200,
                  "figure1 grids must have 200 points");
        for (std::size_t i = 1; i < tau.rows.size(); ++i) {
            c.require(tau.rows[i][1] < tau.rows[i - 1][1],
                      "relaxation time not decreasing in stress");
            c.require(energy.rows[i][1] > energy.rows[i - 1][1],
                      "energy not increasing in stress");
        }
        MaterialParams p06 = params(0.6);
        double ebar_k0 = e0_constant(p06) / (p06.tau0 * p06.k0 * p06.k0 /
                                             p06.rho_mu());
        c.require(rel_err(energy.rows.back()[1], ebar_k0) <= 1e-8,
                  "energy endpoint != normalized e0");

        // alpha = 1 run: quadratic energy with a vanishing first grid value
        c.require(cli("figure1 --alpha 1.0 --out-dir " + dir.string()) == 0,
                  "figure1 alpha=1 failed");
        CsvTable tau1 = read_csv(dir / "fig1_tau.csv");
        CsvTable energy1 = read_csv(dir / "fig1_energy.csv");
        for (const auto& row : tau1.rows)
            c.require(std::fabs(row[1] - 1.0) <= 1e-10, "tau/tau0 != 1 at alpha=1");
        for (const auto& row : energy1.rows)
            c.require(rel_err(row[1], 0.5 * row[0] * row[0]) <= 1e-8,
                      "energy != (sigma/k0)^2/2 at alpha=1");
        c.require(energy1.rows.front()[1] <= 1e-3 * energy1.rows.back()[1],
                  "first energy value not negligible at alpha=1");

        CsvTable fig2 = read_csv(dir / "fig2.csv");
        c.require(fig2.rows.size() == 400, "figure2 grid must have 400 points");
        c.require(std::fabs(fig2.rows[0][1] - 0.5) <= 1e-12 &&
                      std::fabs(fig2.rows[0][2] - 0.5) <= 1e-12 &&
                      std::fabs(fig2.rows[0][3] - 1.0) <= 1e-12,
                  "figure2 initial row must be (0.5, 0.5, 1)");
        for (std::size_t i = 1; i < fig2.rows.size(); ++i) {
            const auto& row = fig2.rows[i];
            c.require(row[2] < row[1] && row[1] < row[3],
                      "envelope ordering violated in figure2 row");
            const auto& prev = fig2.rows[i - 1];
            c.require(row[1] < prev[1] && row[2] < prev[2] && row[3] < prev[3],
                      "figure2 columns must decrease strictly");
        }
    });

    std::printf("%d criterion(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
