#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

#include "levyma/kernel.hpp"
#include "levyma/limit_laws.hpp"

using namespace levyma;
using nlohmann::json;

namespace {

struct RunResult {
    int code = -1;
    std::string output;  // stdout and stderr combined
};

// Shell out to the installed binary; the harness passes its location in.
RunResult run_cli(const std::string& args) {
    const std::string cmd = std::string(LEVYMA_CLI_PATH) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunResult r;
    char buf[4096];
    while (std::fgets(buf, sizeof buf, pipe)) r.output += buf;
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string slurp(const std::string& file) {
    std::ifstream in(file);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json slurp_json(const std::string& file) { return json::parse(slurp(file)); }

void write_file(const std::string& file, const std::string& text) {
    std::ofstream out(file);
    REQUIRE(out.good());
    out << text;
}

std::vector<std::string> split_csv_row(const std::string& row) {
    std::vector<std::string> cells;
    std::string cell;
    for (char c : row) {
        if (c == ',') {
            cells.push_back(cell);
            cell.clear();
        } else {
            cell += c;
        }
    }
    cells.push_back(cell);
    return cells;
}

} // namespace

TEST_CASE("help: golden output for the tool and every subcommand") {
    auto main_help = run_cli("--help");
    CHECK(main_help.code == 0);
    CHECK(main_help.output == R"HELP(Simulation and inference toolkit for Levy-driven moving averages.
Usage: levyma [OPTIONS] SUBCOMMAND

Options:
  --help                      Print this help message and exit

Subcommands:
  simulate                    Simulate a moving-average path to CSV.
  powervar                    Power-variation statistics of a path CSV.
  estimate                    Fit (alpha, beta, H) estimators to a path CSV.
  limits                      Classify the limit regime and its constants.
  verify                      Run a replicated experiment from a config file.
)HELP");

    auto sim = run_cli("simulate --help");
    CHECK(sim.code == 0);
    CHECK(sim.output == R"HELP(Simulate a moving-average path to CSV.
Usage: levyma simulate [OPTIONS]

Options:
  --help                      Print this help message and exit
  --kernel TEXT:{pure_power,gamma_damped} [pure_power] 
                              Kernel family
  --alpha FLOAT REQUIRED      Kernel exponent
  --c0 FLOAT [1]              Kernel amplitude
  --lambda FLOAT [1]          Damping rate (gamma_damped only)
  --driver TEXT:{symmetric_stable,compound_poisson,tempered_stable} [symmetric_stable] 
                              Driving noise
  --beta FLOAT [1.5]          Stability index of the stable drivers
  --sigma FLOAT [1]           Scale of the stable drivers
  --intensity FLOAT [1]       Jump intensity (compound_poisson)
  --jump-law TEXT:{unit_symmetric,gaussian,pareto_symmetric} [unit_symmetric] 
                              Jump-size law (compound_poisson)
  --jump-scale FLOAT [1]      Jump-size scale
  --jump-index FLOAT [2.5]    Pareto jump tail index
  --cutoff FLOAT [1]          Jump truncation (tempered_stable)
  --n INT:INT in [2 - 16777216] [1024] 
                              Observation intervals per unit time
  --seed UINT [1]             RNG seed
  --stream UINT [0]           RNG stream index
  --truncation FLOAT [1]      Kernel window length M
  --refine INT [8]            Sub-mesh refinements per interval
  --out TEXT [path.csv]       Output CSV path
)HELP");

    auto pow = run_cli("powervar --help");
    CHECK(pow.code == 0);
    CHECK(pow.output == R"HELP(Power-variation statistics of a path CSV.
Usage: levyma powervar [OPTIONS]

Options:
  --help                      Print this help message and exit
  --input TEXT:FILE REQUIRED  Path CSV (schema i,t,X)
  --p FLOAT REQUIRED          Power
  --k INT [1]                 Increment order
  --alpha FLOAT Needs: --beta Kernel exponent (enables normalization)
  --beta FLOAT Needs: --alpha Driver activity index (enables normalization)
  --theta FLOAT [2]           Kernel moment order for classification
  --out TEXT [stats.csv]      Output CSV path
)HELP");

    auto est = run_cli("estimate --help");
    CHECK(est.code == 0);
    CHECK(est.output == R"HELP(Fit (alpha, beta, H) estimators to a path CSV.
Usage: levyma estimate [OPTIONS]

Options:
  --help                      Print this help message and exit
  --input TEXT:FILE REQUIRED  Path CSV (schema i,t,X)
  --p FLOAT [0.5]             Power for the span-ratio H estimate, in (0,1]
  --out TEXT [estimate.json]  Output JSON path
)HELP");

    auto lim = run_cli("limits --help");
    CHECK(lim.code == 0);
    CHECK(lim.output == R"HELP(Classify the limit regime and its constants.
Usage: levyma limits [OPTIONS]

Options:
  --help                      Print this help message and exit
  --alpha FLOAT REQUIRED      Kernel exponent
  --beta FLOAT REQUIRED       Driver activity index
  --p FLOAT REQUIRED          Power
  --k INT [1]                 Increment order
  --theta FLOAT [2]           Kernel moment order
  --c0 FLOAT [1]              Kernel amplitude
  --sigma FLOAT [1]           Driver scale
  --out TEXT [limits.json]    Output JSON path
)HELP");

    auto ver = run_cli("verify --help");
    CHECK(ver.code == 0);
    CHECK(ver.output == R"HELP(Run a replicated experiment from a config file.
Usage: levyma verify [OPTIONS]

Options:
  --help                      Print this help message and exit
  --config TEXT:FILE REQUIRED Experiment config JSON
  --seed UINT                 Override the config file's seed
  --reps INT                  Override the config file's replications
  --workers INT               Worker threads (default: config file, else logical cores)
  --out TEXT [verify_summary.json] 
                              Summary JSON path (CSV companion alongside)
)HELP");
}

TEST_CASE("limits: ergodic point reports the regime, exponent, and mean") {
    auto r = run_cli("limits --alpha 0.2 --beta 1.5 --p 0.5 --k 1 --out cli_limits.json");
    CHECK(r.code == 0);
    CHECK(r.output.find("resolved config:") != std::string::npos);

    const json j = slurp_json("cli_limits.json");
    CHECK(j.at("schema_version") == 1);
    CHECK(j.at("regime") == "ergodic");
    CHECK(j.at("second_order") == "stable_correction");
    CHECK(j.at("normalization_exponent").get<double>() ==
          doctest::Approx(-1.0 + 0.5 * (0.2 + 1.0 / 1.5)).epsilon(1e-12));
    const double mp_expected =
        limits::m_p(kernel::KernelSpec::pure_power(0.2, 1.0), 1.5, 1.0, 0.5, 1);
    CHECK(j.at("m_p").get<double>() == doctest::Approx(mp_expected).epsilon(1e-12));
    CHECK(j.at("conditions").is_array());
    CHECK(j.at("conditions").size() > 0);
    std::remove("cli_limits.json");
}

TEST_CASE("powervar: constant path yields zero raw variation") {
    std::string csv = "i,t,X\n";
    for (int i = 0; i <= 64; ++i)
        csv += std::to_string(i) + "," + std::to_string(i / 64.0) + ",2.5\n";
    write_file("cli_const.csv", csv);

    auto r = run_cli("powervar --input cli_const.csv --p 2 --k 1 --out cli_stats.csv");
    CHECK(r.code == 0);
    const std::string stats = slurp("cli_stats.csv");
    CHECK(stats.substr(0, stats.find('\n')) == "n,p,k,regime,raw,exponent,normalized");
    const auto row = split_csv_row(
        stats.substr(stats.find('\n') + 1, stats.rfind('\n') - stats.find('\n') - 1));
    REQUIRE(row.size() == 7);
    CHECK(row[0] == "64");
    CHECK(row[3] == "unclassified");
    CHECK(std::stod(row[4]) == 0.0);
    CHECK(std::stod(row[6]) == 0.0);

    // Numeric flags echo back at full precision.
    auto echo = run_cli(
        "powervar --input cli_const.csv --p 0.5 --k 1 "
        "--alpha 0.2000000000000001 --beta 1.5 --out cli_stats.csv");
    CHECK(echo.code == 0);
    CHECK(echo.output.find("0.2000000000000001") != std::string::npos);
    std::remove("cli_const.csv");
    std::remove("cli_stats.csv");
}

TEST_CASE("simulate, powervar, estimate: round trip through the file formats") {
    auto sim = run_cli(
        "simulate --alpha 0.2 --beta 1.5 --n 2048 --seed 3 --truncation 0.5 "
        "--out cli_path.csv");
    CHECK(sim.code == 0);
    CHECK(sim.output.find("resolved config:") != std::string::npos);
    CHECK(sim.output.find("wrote cli_path.csv") != std::string::npos);

    const std::string path_csv = slurp("cli_path.csv");
    CHECK(path_csv.substr(0, 6) == "i,t,X\n");
    CHECK(std::count(path_csv.begin(), path_csv.end(), '\n') == 2050);  // header + 2049 rows

    auto pow = run_cli(
        "powervar --input cli_path.csv --p 0.5 --k 1 --alpha 0.2 --beta 1.5 "
        "--out cli_stats2.csv");
    CHECK(pow.code == 0);
    const std::string stats = slurp("cli_stats2.csv");
    const auto row = split_csv_row(
        stats.substr(stats.find('\n') + 1, stats.rfind('\n') - stats.find('\n') - 1));
    REQUIRE(row.size() == 7);
    CHECK(row[3] == "ergodic");
    CHECK(std::stod(row[4]) > 0.0);         // raw variation
    CHECK(std::stod(row[6]) > 0.0);         // normalized
    CHECK(std::stod(row[5]) == doctest::Approx(-1.0 + 0.5 * (0.2 + 1.0 / 1.5)).epsilon(1e-12));

    auto est = run_cli("estimate --input cli_path.csv --p 0.5 --out cli_est.json");
    CHECK(est.code == 0);
    const json j = slurp_json("cli_est.json");
    CHECK(j.at("schema_version") == 1);
    CHECK(j.at("n") == 2048);
    const double a = j.at("alpha_hat").get<double>();
    const double b = j.at("beta_hat").get<double>();
    const double h = j.at("H_hat").get<double>();
    CHECK(a > 0.0);
    CHECK(a < 1.0);
    CHECK(b > 1.0);
    CHECK(b <= 2.0);
    CHECK(h == doctest::Approx(a + 1.0 / b).epsilon(1e-12));
    CHECK(j.at("H_hat_ratio").get<double>() > 0.0);
    CHECK(j.at("H_hat_ratio").get<double>() < 1.5);
    CHECK(j.at("p_grid").size() == j.at("observed_scale").size());

    std::remove("cli_path.csv");
    std::remove("cli_stats2.csv");
    std::remove("cli_est.json");
}

TEST_CASE("verify: determinism, flag-over-file precedence, and failure exit") {
    // Smoke scale: 30 replications leave a few percent of Monte Carlo noise
    // around the ergodic limit, so the config carries its own band. The tight
    // default band is exercised at acceptance scale.
    const std::string cfg = R"({
  "experiment": "ergodic_mean",
  "kernel": {"family": "pure_power", "alpha": 0.2, "c0": 1.0},
  "driver": {"kind": "symmetric_stable", "beta": 1.5, "sigma": 1.0},
  "p": 0.5, "k": 1, "n_ladder": [1024], "replications": 30,
  "seed": 7, "truncation_M": 0.25, "refinement_r": 8, "workers": 1,
  "tolerances": {"mean_rel_dev": 0.06}
})";
    write_file("cli_cfg.json", cfg);

    auto v1 = run_cli("verify --config cli_cfg.json --out cli_v1.json");
    CHECK(v1.code == 0);
    CHECK(v1.output.find("[PASS]") != std::string::npos);
    CHECK(v1.output.find("\nPASS\n") != std::string::npos);

    auto v2 = run_cli("verify --config cli_cfg.json --out cli_v2.json");
    CHECK(v2.code == 0);
    CHECK(slurp("cli_v1.json") == slurp("cli_v2.json"));
    CHECK(slurp("cli_v1.csv") == slurp("cli_v2.csv"));

    // Command-line overrides beat the file values.
    auto v3 = run_cli("verify --config cli_cfg.json --reps 25 --seed 9 --out cli_v3.json");
    CHECK(v3.code == 0);
    const json j3 = slurp_json("cli_v3.json");
    CHECK(j3.at("replications") == 25);
    CHECK(j3.at("seed") == 9);

    // Same run with an unreachable tolerance: finishes, reports, exits 1.
    std::string tight = cfg;
    tight.replace(tight.find("0.06"), 4, "1e-9");
    write_file("cli_cfg_tight.json", tight);
    auto v4 = run_cli("verify --config cli_cfg_tight.json --out cli_v4.json");
    CHECK(v4.code == 1);
    CHECK(v4.output.find("[FAIL]") != std::string::npos);
    CHECK(v4.output.find("\nFAIL\n") != std::string::npos);

    for (const char* f : {"cli_cfg.json", "cli_cfg_tight.json", "cli_v1.json", "cli_v1.csv",
                          "cli_v2.json", "cli_v2.csv", "cli_v3.json", "cli_v3.csv",
                          "cli_v4.json", "cli_v4.csv"})
        std::remove(f);
}

TEST_CASE("usage and configuration errors exit with code 2") {
    CHECK(run_cli("simulate --alpha 0.2 --frobnicate 1").code == 2);  // unknown flag
    CHECK(run_cli("powervar --p 2").code == 2);                       // missing required
    CHECK(run_cli("powervar --input no_such_file.csv --p 2").code == 2);
    CHECK(run_cli("limits --alpha 0.2 --beta 2.5 --p 0.5").code == 2);  // beta out of range
    CHECK(run_cli("").code == 2);  // subcommand required

    // --alpha without --beta violates the pairing.
    write_file("cli_tiny.csv", "i,t,X\n0,0,0\n1,1,1\n");
    CHECK(run_cli("powervar --input cli_tiny.csv --p 2 --alpha 0.5").code == 2);

    // Wrong CSV header.
    write_file("cli_bad.csv", "x,y,z\n0,0,1\n");
    CHECK(run_cli("powervar --input cli_bad.csv --p 2").code == 2);

    // Config file with a misspelled key is rejected, not silently ignored.
    write_file("cli_bad_cfg.json", R"({
  "experiment": "ergodic_mean",
  "kernel": {"family": "pure_power", "alpha": 0.2},
  "driver": {"kind": "symmetric_stable", "beta": 1.5},
  "p": 0.5, "k": 1, "n_ladder": [1024], "replications": 30,
  "relications": 2
})");
    auto bad = run_cli("verify --config cli_bad_cfg.json");
    CHECK(bad.code == 2);
    CHECK(bad.output.find("relications") != std::string::npos);

    std::remove("cli_tiny.csv");
    std::remove("cli_bad.csv");
    std::remove("cli_bad_cfg.json");
}
