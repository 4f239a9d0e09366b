#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "fracvisc/curve.hpp"

namespace fs = std::filesystem;
using namespace fracvisc;

namespace {

fs::path temp_dir(const std::string& tag) {
    fs::path dir = fs::temp_directory_path() / ("fracvisc_test_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

int run_cli(const std::string& args, const fs::path& stdout_file = {}) {
    std::string cmd = std::string(FRACVISC_CLI_PATH) + " " + args;
    if (!stdout_file.empty()) cmd += " > " + stdout_file.string();
    int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_SUITE("cli_csv") {
    TEST_CASE("17-significant-digit formatting round-trips doubles") {
        for (double v : {1.0 / 3.0, 0.4133273409431063, 1e-300, 123456.789012345}) {
            double back = std::stod(format_full(v));
            CHECK(back == v);
        }
    }

    TEST_CASE("csv write/read round trip with provenance header") {
        fs::path dir = temp_dir("csv");
        CsvTable t;
        t.meta = {{"alpha", "0.6"}, {"k0", "1"}};
        t.columns = {"x", "y"};
        t.rows = {{0.1, 0.4133273409431063}, {0.2, 1.0 / 3.0}};
        fs::path file = dir / "t.csv";
        write_csv(file, t);
        CHECK(fs::exists(file));
        CHECK_FALSE(fs::exists(dir / "t.csv.tmp")); // rename left no temp file
        std::string text = slurp(file);
        CHECK(text.find("# alpha=0.6, k0=1") != std::string::npos);
        CsvTable back = read_csv(file);
        REQUIRE(back.columns.size() == 2);
        REQUIRE(back.rows.size() == 2);
        CHECK(back.rows[0][1] == 0.4133273409431063);
        CHECK(back.rows[1][1] == 1.0 / 3.0);
    }

    TEST_CASE("ml-eval prints trivial values and honors exit codes") {
        fs::path dir = temp_dir("mleval");
        fs::path out = dir / "out.txt";
        CHECK(run_cli("ml-eval --alpha 1 --z -1", out) == 0);
        CHECK(slurp(out).find("0.36787944117144233") != std::string::npos);
        CHECK(run_cli("ml-eval --alpha 0.6 --z 0", out) == 0);
        CHECK(slurp(out).find("0,1\n") != std::string::npos);
        // domain errors map to exit code 2
        CHECK(run_cli("ml-eval --alpha 0.6 --z 1 2> /dev/null", out) == 2);
        CHECK(run_cli("ml-eval --alpha 1.7 --z -1 2> /dev/null", out) == 2);
    }

    TEST_CASE("figure commands write CSVs; out-of-domain orders exit 2") {
        fs::path dir = temp_dir("figs");
        CHECK(run_cli("figure2 --out-dir " + dir.string(), dir / "log.txt") == 0);
        CsvTable fig2 = read_csv(dir / "fig2.csv");
        REQUIRE(fig2.rows.size() == 400);
        REQUIRE(fig2.columns.size() == 4);
        CHECK(fig2.rows[0][0] == 0.0);
        CHECK(fig2.rows[0][1] == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(fig2.rows[0][2] == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(fig2.rows[0][3] == doctest::Approx(1.0).epsilon(1e-12));
        // alpha at or below 1/2 has no bounded energy: usage error
        CHECK(run_cli("figure1 --alpha 0.5 --out-dir " + dir.string() +
                          " 2> /dev/null",
                      dir / "log.txt") == 2);
        // sigma0 >= k0 rejected for figure2
        CHECK(run_cli("figure2 --sigma0 1.0 --out-dir " + dir.string() +
                          " 2> /dev/null",
                      dir / "log.txt") == 2);
    }

    TEST_CASE("figure output is byte-identical across runs") {
        fs::path d1 = temp_dir("det1");
        fs::path d2 = temp_dir("det2");
        REQUIRE(run_cli("figure2 --out-dir " + d1.string(), d1 / "log.txt") == 0);
        REQUIRE(run_cli("figure2 --out-dir " + d2.string(), d2 / "log.txt") == 0);
        CHECK(slurp(d1 / "fig2.csv") == slurp(d2 / "fig2.csv"));
    }

    TEST_CASE("config file sets values, flags override") {
        fs::path dir = temp_dir("cfg");
        {
            std::ofstream cfg(dir / "cfg.json");
            cfg << R"({"material": {"alpha": 0.75}, "sigma0": 0.25,
                       "grids": {"figure2_points": 100}})";
        }
        CHECK(run_cli("figure2 --config " + (dir / "cfg.json").string() +
                          " --out-dir " + dir.string(),
                      dir / "log.txt") == 0);
        CsvTable fig2 = read_csv(dir / "fig2.csv");
        REQUIRE(fig2.rows.size() == 100);
        CHECK(fig2.rows[0][1] == doctest::Approx(0.25).epsilon(1e-12));
        // flag wins over the file
        CHECK(run_cli("figure2 --config " + (dir / "cfg.json").string() +
                          " --sigma0 0.5 --out-dir " + dir.string(),
                      dir / "log.txt") == 0);
        fig2 = read_csv(dir / "fig2.csv");
        CHECK(fig2.rows[0][1] == doctest::Approx(0.5).epsilon(1e-12));
    }

    TEST_CASE("relax/energy/tau commands emit their curves") {
        fs::path dir = temp_dir("relax");
        CHECK(run_cli("relax --with-ode --out-dir " + dir.string(), dir / "log.txt") ==
              0);
        CHECK(fs::exists(dir / "relax_fractional.csv"));
        CHECK(fs::exists(dir / "relax_ret_closed.csv"));
        CsvTable ret = read_csv(dir / "relax_ret_closed.csv");
        CHECK(ret.rows[0][1] == doctest::Approx(0.5).epsilon(1e-12));
        CsvTable ode = read_csv(dir / "relax_ret_ode.csv");
        REQUIRE(ode.rows.size() == ret.rows.size());
        for (std::size_t i = 0; i < ode.rows.size(); ++i)
            CHECK(std::fabs(ode.rows[i][1] - ret.rows[i][1]) < 1e-6);
        CHECK(run_cli("energy --points 50 --out-dir " + dir.string(),
                      dir / "log.txt") == 0);
        CHECK(fs::exists(dir / "energy.csv"));
        CHECK(run_cli("tau --points 50 --out-dir " + dir.string(), dir / "log.txt") ==
              0);
        CsvTable tau = read_csv(dir / "tau.csv");
        // nonlinear relaxation time decreases with stress
        for (std::size_t i = 1; i < tau.rows.size(); ++i)
            CHECK(tau.rows[i][1] < tau.rows[i - 1][1]);
    }

    TEST_CASE("verify command passes on the default configuration") {
        fs::path dir = temp_dir("verify");
        fs::path log = dir / "log.txt";
        CHECK(run_cli("verify --out-dir " + dir.string(), log) == 0);
        std::string text = slurp(log);
        CHECK(text.find("all checks passed") != std::string::npos);
        // the alpha = 0.5 matrix row passes through its negative branch
        CHECK(slurp(dir / "report_energy_boundedness_alpha_0.5.txt")
                  .find("pass: yes") != std::string::npos);
        CHECK(fs::exists(dir / "verify_summary.txt"));
        CHECK(fs::exists(dir / "report_coincident_solution_sigma0_k0.kv"));
    }
}
