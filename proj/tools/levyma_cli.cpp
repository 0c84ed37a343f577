// Command-line front end for the moving-average toolkit: simulate paths,
// compute power-variation statistics, run the estimators, report limit
// regimes, and verify replicated experiments against their acceptance
// criteria.
//
// Exit codes: 0 on success, 1 when a verification run finishes but fails its
// criteria, 2 on usage or configuration errors.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "levyma/estimators.hpp"
#include "levyma/kernel.hpp"
#include "levyma/levy.hpp"
#include "levyma/limit_laws.hpp"
#include "levyma/mc.hpp"
#include "levyma/path.hpp"
#include "levyma/power_variation.hpp"

namespace {

using nlohmann::json;
namespace lv = levyma;

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

// Every run echoes the configuration it actually uses, resolved from flags
// (and, for verify, the config file) with full numeric precision.
void echo_resolved(const json& resolved) {
    std::cout << "resolved config:\n" << resolved.dump(2) << "\n";
}

std::ofstream open_output(const std::string& file) {
    std::ofstream out(file);
    if (!out) throw std::runtime_error("cannot open output file: " + file);
    return out;
}

// Path CSV as written by `simulate`: header i,t,X, one row per grid point.
std::vector<double> read_path_csv(const std::string& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot open input file: " + file);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty input file: " + file);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "i,t,X")
        throw std::runtime_error("unexpected CSV header in " + file + " (expected i,t,X)");
    std::vector<double> values;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto c1 = line.find(',');
        const auto c2 = c1 == std::string::npos ? c1 : line.find(',', c1 + 1);
        if (c2 == std::string::npos)
            throw std::runtime_error("malformed row " + std::to_string(values.size() + 1) +
                                     " in " + file);
        try {
            values.push_back(std::stod(line.substr(c2 + 1)));
        } catch (const std::exception&) {
            throw std::runtime_error("non-numeric X value in row " +
                                     std::to_string(values.size() + 1) + " of " + file);
        }
    }
    if (values.size() < 2)
        throw std::runtime_error("input path needs at least two samples: " + file);
    return values;
}

const json& need(const json& j, const char* key, const char* where) {
    const auto it = j.find(key);
    if (it == j.end())
        throw std::runtime_error(std::string("missing key \"") + key + "\" in " + where);
    return *it;
}

void check_keys(const json& j, const char* where,
                std::initializer_list<const char*> allowed) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        for (const char* a : allowed)
            if (it.key() == a) { known = true; break; }
        if (!known)
            throw std::runtime_error("unknown key \"" + it.key() + "\" in " + where);
    }
}

const char* to_string(lv::levy::JumpKind kind) {
    switch (kind) {
        case lv::levy::JumpKind::unit_symmetric: return "unit_symmetric";
        case lv::levy::JumpKind::gaussian: return "gaussian";
        case lv::levy::JumpKind::pareto_symmetric: return "pareto_symmetric";
    }
    return "unit_symmetric";
}

lv::levy::JumpKind jump_kind_from_string(const std::string& name) {
    if (name == "unit_symmetric") return lv::levy::JumpKind::unit_symmetric;
    if (name == "gaussian") return lv::levy::JumpKind::gaussian;
    if (name == "pareto_symmetric") return lv::levy::JumpKind::pareto_symmetric;
    throw std::runtime_error("unknown jump law: " + name);
}

json kernel_json(const lv::kernel::KernelSpec& ker) {
    return json{{"family", ker.family == lv::kernel::KernelFamily::pure_power
                               ? "pure_power"
                               : "gamma_damped"},
                {"alpha", ker.alpha},
                {"c0", ker.c0},
                {"lambda", ker.lambda}};
}

json driver_json(const lv::levy::LevySpec& spec) {
    switch (spec.kind) {
        case lv::levy::DriverKind::symmetric_stable:
            return json{{"kind", "symmetric_stable"}, {"beta", spec.beta}, {"sigma", spec.sigma}};
        case lv::levy::DriverKind::compound_poisson:
            return json{{"kind", "compound_poisson"},
                        {"intensity", spec.intensity},
                        {"jump_law",
                         {{"kind", to_string(spec.jumps.kind)},
                          {"scale", spec.jumps.scale},
                          {"index", spec.jumps.index}}}};
        case lv::levy::DriverKind::tempered_stable:
            return json{{"kind", "tempered_stable"},
                        {"beta", spec.beta},
                        {"sigma", spec.sigma},
                        {"cutoff", spec.cutoff}};
    }
    throw std::logic_error("driver_json: unhandled driver kind");
}

json tolerances_json(const lv::mc::Tolerances& t) {
    return json{{"mean_rel_dev", t.mean_rel_dev},
                {"ks_level", t.ks_level},
                {"ks_batches", t.ks_batches},
                {"batch_pass_fraction", t.batch_pass_fraction},
                {"hill_band", t.hill_band},
                {"hill_top_fraction", t.hill_top_fraction},
                {"rate_se_multiple", t.rate_se_multiple},
                {"h_abs_dev", t.h_abs_dev},
                {"alpha_abs_dev", t.alpha_abs_dev},
                {"beta_abs_dev", t.beta_abs_dev}};
}

json experiment_json(const lv::mc::ExperimentConfig& c) {
    return json{{"experiment", lv::mc::to_string(c.kind)},
                {"kernel", kernel_json(c.kernel)},
                {"driver", driver_json(c.levy)},
                {"p", c.p},
                {"k", c.k},
                {"theta", c.theta},
                {"n_ladder", c.n_ladder},
                {"replications", c.replications},
                {"seed", c.seed},
                {"truncation_M", c.truncation_M},
                {"refinement_r", c.refinement_r},
                {"workers", c.workers},
                {"eta_lag_cutoff", c.eta_lag_cutoff},
                {"tolerances", tolerances_json(c.tol)}};
}

// Experiment description for `verify`. Flags given on the command line take
// precedence over file values; missing optional keys fall back to the
// defaults of the in-memory config. workers = 0 means "logical cores".
lv::mc::ExperimentConfig parse_config_file(const std::string& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot open config file: " + file);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw std::runtime_error("config parse error in " + file + ": " + e.what());
    }
    check_keys(j, "config",
               {"schema_version", "experiment", "kernel", "driver", "p", "k", "theta",
                "n_ladder", "replications", "seed", "truncation_M", "refinement_r",
                "workers", "eta_lag_cutoff", "tolerances"});
    const int version = j.value("schema_version", 1);
    if (version != 1)
        throw std::runtime_error("config schema_version " + std::to_string(version) +
                                 " is not supported (expected 1)");

    lv::mc::ExperimentConfig c;
    c.kind = lv::mc::experiment_kind_from_string(
        need(j, "experiment", "config").get<std::string>());

    const json& jk = need(j, "kernel", "config");
    check_keys(jk, "config.kernel", {"family", "alpha", "c0", "lambda"});
    const auto family = need(jk, "family", "config.kernel").get<std::string>();
    const double k_alpha = need(jk, "alpha", "config.kernel").get<double>();
    const double k_c0 = jk.value("c0", 1.0);
    if (family == "pure_power")
        c.kernel = lv::kernel::KernelSpec::pure_power(k_alpha, k_c0);
    else if (family == "gamma_damped")
        c.kernel = lv::kernel::KernelSpec::gamma_damped(k_alpha, k_c0, jk.value("lambda", 1.0));
    else
        throw std::runtime_error("config.kernel.family must be pure_power or gamma_damped");

    const json& jd = need(j, "driver", "config");
    const auto kind = need(jd, "kind", "config.driver").get<std::string>();
    if (kind == "symmetric_stable") {
        check_keys(jd, "config.driver", {"kind", "beta", "sigma"});
        c.levy = lv::levy::LevySpec::symmetric_stable_spec(
            need(jd, "beta", "config.driver").get<double>(), jd.value("sigma", 1.0));
    } else if (kind == "compound_poisson") {
        check_keys(jd, "config.driver", {"kind", "intensity", "jump_law"});
        lv::levy::JumpLaw law;
        if (jd.contains("jump_law")) {
            const json& jl = jd["jump_law"];
            check_keys(jl, "config.driver.jump_law", {"kind", "scale", "index"});
            law.kind = jump_kind_from_string(jl.value("kind", "unit_symmetric"));
            law.scale = jl.value("scale", 1.0);
            law.index = jl.value("index", 2.5);
        }
        c.levy = lv::levy::LevySpec::compound_poisson_spec(
            need(jd, "intensity", "config.driver").get<double>(), law);
    } else if (kind == "tempered_stable") {
        check_keys(jd, "config.driver", {"kind", "beta", "sigma", "cutoff"});
        c.levy = lv::levy::LevySpec::tempered_stable_spec(
            need(jd, "beta", "config.driver").get<double>(), jd.value("sigma", 1.0),
            jd.value("cutoff", 1.0));
    } else {
        throw std::runtime_error(
            "config.driver.kind must be symmetric_stable, compound_poisson, or "
            "tempered_stable");
    }

    c.p = need(j, "p", "config").get<double>();
    c.k = need(j, "k", "config").get<int>();
    c.theta = j.value("theta", c.theta);
    c.n_ladder = need(j, "n_ladder", "config").get<std::vector<long>>();
    c.replications = need(j, "replications", "config").get<int>();
    c.seed = j.value("seed", c.seed);
    c.truncation_M = j.value("truncation_M", c.truncation_M);
    c.refinement_r = j.value("refinement_r", c.refinement_r);
    c.workers = j.value("workers", 0);
    c.eta_lag_cutoff = j.value("eta_lag_cutoff", c.eta_lag_cutoff);

    if (j.contains("tolerances")) {
        const json& jt = j["tolerances"];
        check_keys(jt, "config.tolerances",
                   {"mean_rel_dev", "ks_level", "ks_batches", "batch_pass_fraction",
                    "hill_band", "hill_top_fraction", "rate_se_multiple", "h_abs_dev",
                    "alpha_abs_dev", "beta_abs_dev"});
        lv::mc::Tolerances& t = c.tol;
        t.mean_rel_dev = jt.value("mean_rel_dev", t.mean_rel_dev);
        t.ks_level = jt.value("ks_level", t.ks_level);
        t.ks_batches = jt.value("ks_batches", t.ks_batches);
        t.batch_pass_fraction = jt.value("batch_pass_fraction", t.batch_pass_fraction);
        t.hill_band = jt.value("hill_band", t.hill_band);
        t.hill_top_fraction = jt.value("hill_top_fraction", t.hill_top_fraction);
        t.rate_se_multiple = jt.value("rate_se_multiple", t.rate_se_multiple);
        t.h_abs_dev = jt.value("h_abs_dev", t.h_abs_dev);
        t.alpha_abs_dev = jt.value("alpha_abs_dev", t.alpha_abs_dev);
        t.beta_abs_dev = jt.value("beta_abs_dev", t.beta_abs_dev);
    }
    return c;
}

int default_workers() {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

// ---------------------------------------------------------------------------
// Subcommand state and actions.

struct SimulateArgs {
    std::string kernel_family = "pure_power";
    double alpha = 0.5;
    double c0 = 1.0;
    double lambda = 1.0;
    std::string driver = "symmetric_stable";
    double beta = 1.5;
    double sigma = 1.0;
    double intensity = 1.0;
    std::string jump_law = "unit_symmetric";
    double jump_scale = 1.0;
    double jump_index = 2.5;
    double cutoff = 1.0;
    long n = 1024;
    std::uint64_t seed = 1;
    std::uint64_t stream = 0;
    double truncation = 1.0;
    int refine = 8;
    std::string out = "path.csv";
};

int run_simulate(const SimulateArgs& a) {
    lv::kernel::KernelSpec ker =
        a.kernel_family == "gamma_damped"
            ? lv::kernel::KernelSpec::gamma_damped(a.alpha, a.c0, a.lambda)
            : lv::kernel::KernelSpec::pure_power(a.alpha, a.c0);
    lv::levy::LevySpec drv;
    if (a.driver == "symmetric_stable") {
        drv = lv::levy::LevySpec::symmetric_stable_spec(a.beta, a.sigma);
    } else if (a.driver == "compound_poisson") {
        lv::levy::JumpLaw law;
        law.kind = jump_kind_from_string(a.jump_law);
        law.scale = a.jump_scale;
        law.index = a.jump_index;
        drv = lv::levy::LevySpec::compound_poisson_spec(a.intensity, law);
    } else {
        drv = lv::levy::LevySpec::tempered_stable_spec(a.beta, a.sigma, a.cutoff);
    }

    lv::path::SimConfig cfg;
    cfg.n = a.n;
    cfg.truncation_M = a.truncation;
    cfg.refinement_r = a.refine;
    cfg.seed = a.seed;
    cfg.stream = a.stream;

    echo_resolved(json{{"subcommand", "simulate"},
                       {"kernel", kernel_json(ker)},
                       {"driver", driver_json(drv)},
                       {"n", cfg.n},
                       {"seed", cfg.seed},
                       {"stream", cfg.stream},
                       {"truncation", cfg.truncation_M},
                       {"refine", cfg.refinement_r},
                       {"out", a.out}});

    const auto sample = lv::path::simulate_moving_average(ker, drv, cfg);
    auto out = open_output(a.out);
    out << "i,t,X\n";
    for (long i = 0; i <= sample.n; ++i)
        out << i << ',' << fmt17(static_cast<double>(i) / sample.n) << ','
            << fmt17(sample.values[static_cast<std::size_t>(i)]) << '\n';
    std::cout << "wrote " << a.out << "\n";
    return 0;
}

struct PowervarArgs {
    std::string input;
    double p = 1.0;
    int k = 1;
    double alpha = 0.0;
    double beta = 0.0;
    double theta = 2.0;
    std::string out = "stats.csv";
    bool classify = false;  // set when --alpha/--beta were given
};

int run_powervar(const PowervarArgs& a) {
    json resolved{{"subcommand", "powervar"}, {"input", a.input}, {"p", a.p},
                  {"k", a.k},                 {"out", a.out}};
    if (a.classify) {
        resolved["alpha"] = a.alpha;
        resolved["beta"] = a.beta;
        resolved["theta"] = a.theta;
    }
    echo_resolved(resolved);

    const auto values = read_path_csv(a.input);
    auto result = lv::pv::power_variation(values, a.p, a.k);
    std::string regime = "unclassified";
    if (a.classify) {
        const auto report = lv::limits::classify_regime(a.alpha, a.beta, a.p, a.k, a.theta);
        regime = lv::limits::to_string(report.regime);
        result = lv::pv::normalize(result, report, a.alpha, a.beta);
    }

    auto out = open_output(a.out);
    out << "n,p,k,regime,raw,exponent,normalized\n";
    out << result.n << ',' << fmt17(result.p) << ',' << result.k << ',' << regime << ','
        << fmt17(result.raw) << ',' << fmt17(result.normalization_exponent) << ','
        << fmt17(result.normalized) << '\n';
    std::cout << "wrote " << a.out << "\n";
    return 0;
}

struct EstimateArgs {
    std::string input;
    double p = 0.5;
    std::string out = "estimate.json";
};

int run_estimate(const EstimateArgs& a) {
    echo_resolved(json{{"subcommand", "estimate"}, {"input", a.input}, {"p", a.p},
                       {"out", a.out}});
    const auto values = read_path_csv(a.input);
    const auto fit = lv::est::scale_function_fit(values);
    const double h_ratio = lv::est::estimate_H_ratio(values, a.p);

    json j{{"schema_version", 1},
           {"n", values.size() - 1},
           {"p_ratio", a.p},
           {"alpha_hat", fit.alpha_hat},
           {"beta_hat", fit.beta_hat},
           {"H_hat", fit.H_hat},
           {"H_hat_ratio", h_ratio},
           {"objective_value", fit.objective_value},
           {"p_grid", fit.p_grid},
           {"observed_scale", fit.observed_scale},
           {"objective_trace", fit.objective_trace}};
    open_output(a.out) << j.dump(2) << '\n';
    std::cout << "wrote " << a.out << "\n";
    return 0;
}

struct LimitsArgs {
    double alpha = 0.0;
    double beta = 0.0;
    double p = 0.0;
    int k = 1;
    double theta = 2.0;
    double c0 = 1.0;
    double sigma = 1.0;
    std::string out = "limits.json";
};

int run_limits(const LimitsArgs& a) {
    echo_resolved(json{{"subcommand", "limits"},
                       {"alpha", a.alpha},
                       {"beta", a.beta},
                       {"p", a.p},
                       {"k", a.k},
                       {"theta", a.theta},
                       {"c0", a.c0},
                       {"sigma", a.sigma},
                       {"out", a.out}});

    const auto report = lv::limits::classify_regime(a.alpha, a.beta, a.p, a.k, a.theta);
    json conditions = json::array();
    for (const auto& [what, holds] : report.conditions_checked)
        conditions.push_back(json{{"condition", what}, {"holds", holds}});

    json j{{"schema_version", 1},
           {"alpha", a.alpha},
           {"beta", a.beta},
           {"p", a.p},
           {"k", a.k},
           {"theta", a.theta},
           {"regime", lv::limits::to_string(report.regime)},
           {"second_order", lv::limits::to_string(report.second_order)},
           {"normalization_exponent", report.normalization_exponent},
           {"limit_description", report.limit_description},
           {"needs_log_refinement", report.needs_log_refinement},
           {"conditions", conditions}};
    if (report.regime == lv::limits::Regime::ergodic) {
        j["m_p"] = lv::limits::m_p(lv::kernel::KernelSpec::pure_power(a.alpha, a.c0), a.beta,
                                   a.sigma, a.p, a.k);
        if (report.second_order == lv::limits::SecondOrder::stable_correction) {
            j["kappa"] = lv::limits::kappa(a.alpha, a.beta, a.p, a.k);
            j["sigma_tilde"] =
                lv::limits::sigma_tilde(a.alpha, a.beta, a.p, a.k, a.c0, a.sigma);
        }
    }
    open_output(a.out) << j.dump(2) << '\n';
    std::cout << "wrote " << a.out << "\n";
    return 0;
}

struct VerifyArgs {
    std::string config;
    std::uint64_t seed = 0;
    int reps = 0;
    int workers = 0;
    std::string out = "verify_summary.json";
    bool seed_given = false;
    bool reps_given = false;
    bool workers_given = false;
};

std::string csv_companion(const std::string& json_path) {
    const std::string suffix = ".json";
    if (json_path.size() > suffix.size() &&
        json_path.compare(json_path.size() - suffix.size(), suffix.size(), suffix) == 0)
        return json_path.substr(0, json_path.size() - suffix.size()) + ".csv";
    return json_path + ".csv";
}

int run_verify(const VerifyArgs& a) {
    auto cfg = parse_config_file(a.config);
    if (a.seed_given) cfg.seed = a.seed;
    if (a.reps_given) cfg.replications = a.reps;
    if (a.workers_given) cfg.workers = a.workers;
    if (cfg.workers <= 0) cfg.workers = default_workers();
    cfg.validate();

    json resolved = experiment_json(cfg);
    resolved["subcommand"] = "verify";
    resolved["config"] = a.config;
    resolved["out"] = a.out;
    echo_resolved(resolved);

    const auto summary = lv::mc::run_experiment(cfg);
    lv::mc::persist(summary, a.out);
    std::cout << "wrote " << a.out << " and " << csv_companion(a.out) << "\n";
    for (const auto& c : summary.criteria) {
        std::printf("[%s] %s: observed=%.10g reference=%.10g tolerance=%.10g\n",
                    c.pass ? "PASS" : "FAIL", c.name.c_str(), c.observed, c.reference,
                    c.tolerance);
    }
    std::cout << (summary.pass ? "PASS" : "FAIL") << "\n";
    return summary.pass ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Simulation and inference toolkit for Levy-driven moving averages.",
                 "levyma"};
    app.require_subcommand(1);
    // All flags are long-only, including help.
    app.set_help_flag("--help", "Print this help message and exit");

    SimulateArgs sim;
    CLI::App* simulate = app.add_subcommand("simulate", "Simulate a moving-average path to CSV.");
    simulate->set_help_flag("--help", "Print this help message and exit");
    simulate->add_option("--kernel", sim.kernel_family, "Kernel family")
        ->check(CLI::IsMember({"pure_power", "gamma_damped"}))
        ->capture_default_str();
    simulate->add_option("--alpha", sim.alpha, "Kernel exponent")->required();
    simulate->add_option("--c0", sim.c0, "Kernel amplitude")->capture_default_str();
    simulate->add_option("--lambda", sim.lambda, "Damping rate (gamma_damped only)")
        ->capture_default_str();
    simulate->add_option("--driver", sim.driver, "Driving noise")
        ->check(CLI::IsMember({"symmetric_stable", "compound_poisson", "tempered_stable"}))
        ->capture_default_str();
    simulate->add_option("--beta", sim.beta, "Stability index of the stable drivers")
        ->capture_default_str();
    simulate->add_option("--sigma", sim.sigma, "Scale of the stable drivers")
        ->capture_default_str();
    simulate->add_option("--intensity", sim.intensity, "Jump intensity (compound_poisson)")
        ->capture_default_str();
    simulate->add_option("--jump-law", sim.jump_law, "Jump-size law (compound_poisson)")
        ->check(CLI::IsMember({"unit_symmetric", "gaussian", "pareto_symmetric"}))
        ->capture_default_str();
    simulate->add_option("--jump-scale", sim.jump_scale, "Jump-size scale")
        ->capture_default_str();
    simulate->add_option("--jump-index", sim.jump_index, "Pareto jump tail index")
        ->capture_default_str();
    simulate->add_option("--cutoff", sim.cutoff, "Jump truncation (tempered_stable)")
        ->capture_default_str();
    simulate->add_option("--n", sim.n, "Observation intervals per unit time")
        ->check(CLI::Range(2L, 1L << 24))
        ->capture_default_str();
    simulate->add_option("--seed", sim.seed, "RNG seed")->capture_default_str();
    simulate->add_option("--stream", sim.stream, "RNG stream index")->capture_default_str();
    simulate->add_option("--truncation", sim.truncation, "Kernel window length M")
        ->capture_default_str();
    simulate->add_option("--refine", sim.refine, "Sub-mesh refinements per interval")
        ->capture_default_str();
    simulate->add_option("--out", sim.out, "Output CSV path")->capture_default_str();

    PowervarArgs pow;
    CLI::App* powervar =
        app.add_subcommand("powervar", "Power-variation statistics of a path CSV.");
    powervar->set_help_flag("--help", "Print this help message and exit");
    powervar->add_option("--input", pow.input, "Path CSV (schema i,t,X)")
        ->required()
        ->check(CLI::ExistingFile);
    powervar->add_option("--p", pow.p, "Power")->required();
    powervar->add_option("--k", pow.k, "Increment order")->capture_default_str();
    CLI::Option* pov_alpha =
        powervar->add_option("--alpha", pow.alpha, "Kernel exponent (enables normalization)");
    CLI::Option* pov_beta =
        powervar->add_option("--beta", pow.beta, "Driver activity index (enables normalization)");
    pov_alpha->needs(pov_beta);
    pov_beta->needs(pov_alpha);
    powervar->add_option("--theta", pow.theta, "Kernel moment order for classification")
        ->capture_default_str();
    powervar->add_option("--out", pow.out, "Output CSV path")->capture_default_str();

    EstimateArgs est;
    CLI::App* estimate =
        app.add_subcommand("estimate", "Fit (alpha, beta, H) estimators to a path CSV.");
    estimate->set_help_flag("--help", "Print this help message and exit");
    estimate->add_option("--input", est.input, "Path CSV (schema i,t,X)")
        ->required()
        ->check(CLI::ExistingFile);
    estimate->add_option("--p", est.p, "Power for the span-ratio H estimate, in (0,1]")
        ->capture_default_str();
    estimate->add_option("--out", est.out, "Output JSON path")->capture_default_str();

    LimitsArgs lim;
    CLI::App* limits =
        app.add_subcommand("limits", "Classify the limit regime and its constants.");
    limits->set_help_flag("--help", "Print this help message and exit");
    limits->add_option("--alpha", lim.alpha, "Kernel exponent")->required();
    limits->add_option("--beta", lim.beta, "Driver activity index")->required();
    limits->add_option("--p", lim.p, "Power")->required();
    limits->add_option("--k", lim.k, "Increment order")->capture_default_str();
    limits->add_option("--theta", lim.theta, "Kernel moment order")->capture_default_str();
    limits->add_option("--c0", lim.c0, "Kernel amplitude")->capture_default_str();
    limits->add_option("--sigma", lim.sigma, "Driver scale")->capture_default_str();
    limits->add_option("--out", lim.out, "Output JSON path")->capture_default_str();

    VerifyArgs ver;
    CLI::App* verify =
        app.add_subcommand("verify", "Run a replicated experiment from a config file.");
    verify->set_help_flag("--help", "Print this help message and exit");
    verify->add_option("--config", ver.config, "Experiment config JSON")
        ->required()
        ->check(CLI::ExistingFile);
    CLI::Option* v_seed =
        verify->add_option("--seed", ver.seed, "Override the config file's seed");
    CLI::Option* v_reps =
        verify->add_option("--reps", ver.reps, "Override the config file's replications");
    CLI::Option* v_workers = verify->add_option(
        "--workers", ver.workers, "Worker threads (default: config file, else logical cores)");
    verify->add_option("--out", ver.out, "Summary JSON path (CSV companion alongside)")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    ver.seed_given = v_seed->count() > 0;
    ver.reps_given = v_reps->count() > 0;
    ver.workers_given = v_workers->count() > 0;
    pow.classify = pov_alpha->count() > 0;

    try {
        if (app.got_subcommand(simulate)) return run_simulate(sim);
        if (app.got_subcommand(powervar)) return run_powervar(pow);
        if (app.got_subcommand(estimate)) return run_estimate(est);
        if (app.got_subcommand(limits)) return run_limits(lim);
        if (app.got_subcommand(verify)) return run_verify(ver);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    std::cerr << "error: no subcommand selected\n";
    return 2;
}
