#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "levyma/kernel.hpp"
#include "levyma/levy.hpp"

namespace levyma::mc {

// What a replicated experiment is meant to demonstrate.
enum class ExperimentKind {
    jump_sum_law,          // law of the jump-regime limit (two-sample KS)
    ergodic_mean,          // replication mean against the ergodic limit m_p
    smooth_mean,           // convergence to the coupled derivative integral
    stable_fluctuation,    // skewed-stable correction: tail index + skewness
    gaussian_fluctuation,  // CLT: KS against N(0, eta2)
    estimator_study,       // H-ratio and scale-fit recovery
    rate_study,            // log-log slope of the raw statistic
};

const char* to_string(ExperimentKind kind);
ExperimentKind experiment_kind_from_string(const std::string& name);

// Acceptance thresholds; each criterion in the summary echoes the value used.
struct Tolerances {
    double mean_rel_dev = 0.02;       // mean-convergence checks
    double ks_level = 0.01;           // KS significance level
    int ks_batches = 10;              // independent batches for KS checks
    double batch_pass_fraction = 0.8; // fraction of batches that must pass
    double hill_band = 0.15;          // |hill index - (k-alpha)beta| bound
    double hill_top_fraction = 0.05;  // upper order statistics used by Hill
    double rate_se_multiple = 2.0;    // rate study: |slope - ref| <= m * SE
    double h_abs_dev = 0.02;          // estimator study: median |H_hat - H|
    double alpha_abs_dev = 0.05;      //                  median |alpha_hat - alpha|
    double beta_abs_dev = 0.15;       //                  median |beta_hat - beta|
};

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::ergodic_mean;
    kernel::KernelSpec kernel;
    levy::LevySpec levy;
    double p = 0.5;
    int k = 1;
    // Decay/moment order fed to the regime classifier's refinement flags.
    double theta = 2.0;
    std::vector<long> n_ladder{1 << 10};
    int replications = 200;
    std::uint64_t seed = 1;
    double truncation_M = 1.0;
    int refinement_r = 8;
    int workers = 1;
    long eta_lag_cutoff = 0;  // 0 -> floor(n^{1/3})
    Tolerances tol;

    // Parameter sanity, resource caps, and the regime-consistency check: the
    // classified regime must support the declared experiment kind.
    void validate() const;
};

struct CriterionResult {
    std::string name;
    double observed = 0.0;
    double reference = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

struct ExperimentSummary {
    int schema_version = 1;
    ExperimentKind kind = ExperimentKind::ergodic_mean;
    double p = 0.0;
    int k = 0;
    std::uint64_t seed = 0;
    int replications = 0;
    std::vector<long> n_ladder;
    // Reference value per ladder point (m_p, expected slope, ...); empty when
    // the experiment has no single theory number.
    std::vector<double> theory;
    // Per-replication values, outer index = ladder point. statistics is the
    // primary quantity; aux/aux2 carry experiment-specific companions
    // (coupled integrals, limit draws, eta2 estimates, alpha/beta fits).
    std::vector<std::vector<double>> statistics;
    std::vector<std::vector<double>> aux;
    std::vector<std::vector<double>> aux2;
    std::vector<CriterionResult> criteria;
    bool pass = false;
    // Wall-clock cost. Deliberately not persisted: summary files must be
    // byte-identical across reruns of the same (config, seed).
    double runtime_seconds = 0.0;
};

// Run `replications` independent simulations per ladder point (random stream
// = replication index, identical for any worker count) and evaluate the
// experiment's acceptance criteria.
ExperimentSummary run_experiment(const ExperimentConfig& config);

// Kolmogorov-Smirnov sup-distances; both forms require >= 20 samples.
double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf);
double ks_statistic(std::vector<double> first, std::vector<double> second);

// Asymptotic critical values sqrt(-ln(level/2)/2) scaled by the sample sizes.
double ks_critical_value(std::size_t n, double level);
double ks_critical_value_two_sample(std::size_t n, std::size_t m, double level);

// Hill estimator (index, standard error) on the largest top_fraction of the
// positive part of the sample; top_fraction in (0, 0.2].
std::pair<double, double> hill_tail_index(const std::vector<double>& samples,
                                          double top_fraction);

// Least-squares slope (slope, SE) of log(statistic) on log(n); >= 4 points.
std::pair<double, double> rate_regression(const std::vector<long>& n_ladder,
                                          const std::vector<double>& statistics);

// JSON persistence (schema_version checked on load) plus a CSV companion
// with one row per (ladder point, replication) next to the JSON file.
void persist(const ExperimentSummary& summary, const std::string& json_path);
ExperimentSummary load(const std::string& json_path);

} // namespace levyma::mc
