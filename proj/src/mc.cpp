#include "levyma/mc.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "levyma/common.hpp"
#include "levyma/estimators.hpp"
#include "levyma/limit_laws.hpp"
#include "levyma/path.hpp"
#include "levyma/power_variation.hpp"
#include "levyma/rng.hpp"

namespace levyma::mc {

namespace {

// Auxiliary draws (e.g. the independent limit sample) live on their own
// stream block so they never collide with the path streams, which are keyed
// by the bare replication index.
constexpr std::uint64_t kAuxStreamBase = std::uint64_t(1) << 32;

// The classifier wants a strictly positive activity index; finite-activity
// drivers sit at 0, and any tiny positive proxy produces the same regime
// decisions for the powers used in practice.
double classification_beta(const levy::LevySpec& spec) {
    return std::max(spec.activity_index(), 1e-6);
}

limits::RegimeReport classify(const ExperimentConfig& c) {
    return limits::classify_regime(c.kernel.alpha, classification_beta(c.levy), c.p, c.k,
                                   c.theta);
}

void parallel_for(int workers, int count, const std::function<void(int)>& body) {
    if (workers <= 1 || count <= 1) {
        for (int i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= count || failed.load()) return;
            try {
                body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                failed.store(true);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

double mean_of(const std::vector<double>& v) {
    KahanSum s;
    for (double x : v) s.add(x);
    return s.value() / double(v.size());
}

double median_of(std::vector<double> v) {
    const std::size_t n = v.size();
    std::sort(v.begin(), v.end());
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double skewness_of(const std::vector<double>& v) {
    const double m = mean_of(v);
    KahanSum s2, s3;
    for (double x : v) {
        const double d = x - m;
        s2.add(d * d);
        s3.add(d * d * d);
    }
    const double var = s2.value() / double(v.size());
    return s3.value() / double(v.size()) / std::pow(var, 1.5);
}

path::SimConfig sim_config(const ExperimentConfig& c, long n, int rep) {
    path::SimConfig sim;
    sim.n = n;
    sim.truncation_M = c.truncation_M;
    sim.refinement_r = c.refinement_r;
    sim.seed = c.seed;
    sim.stream = std::uint64_t(rep);
    return sim;
}

// Normalized statistic n^{-1 + p(alpha + 1/beta)} V(p;k)_n for a symmetric
// stable driver, via the unit-scale increment simulator.
double stable_normalized_statistic(const ExperimentConfig& c, long n, int rep,
                                   std::vector<double>* increments = nullptr) {
    const auto y = path::simulate_scaled_increments(c.kernel, c.levy.beta, c.levy.sigma, n,
                                                    c.k, sim_config(c, n, rep));
    KahanSum acc;
    for (double v : y) acc.add(pow_abs(v, c.p));
    if (increments) *increments = y;
    return acc.value() / double(n);
}

bool uses_stable_increments(ExperimentKind kind) {
    return kind == ExperimentKind::ergodic_mean || kind == ExperimentKind::stable_fluctuation ||
           kind == ExperimentKind::gaussian_fluctuation;
}

CriterionResult relative_criterion(std::string name, double observed, double reference,
                                   double rel_tol) {
    CriterionResult c;
    c.name = std::move(name);
    c.observed = observed;
    c.reference = reference;
    c.tolerance = rel_tol;
    c.pass = std::fabs(observed - reference) <= rel_tol * std::fabs(reference);
    return c;
}

void append_ks_criteria(ExperimentSummary& s, const std::vector<double>& ks_values,
                        double critical, double pass_fraction) {
    std::size_t below = 0;
    for (double d : ks_values)
        if (d < critical) ++below;
    CriterionResult frac;
    frac.name = "fraction of KS batches below the critical value";
    frac.observed = double(below) / double(ks_values.size());
    frac.reference = critical;
    frac.tolerance = pass_fraction;
    frac.pass = frac.observed >= pass_fraction;
    s.criteria.push_back(frac);

    CriterionResult med;
    med.name = "median batch KS below the critical value";
    med.observed = median_of(ks_values);
    med.reference = critical;
    med.tolerance = critical;
    med.pass = med.observed < critical;
    s.criteria.push_back(med);
}

std::vector<std::pair<std::size_t, std::size_t>> batch_ranges(std::size_t count, int batches) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (int b = 0; b < batches; ++b)
        out.emplace_back(count * std::size_t(b) / batches, count * std::size_t(b + 1) / batches);
    return out;
}

} // namespace

const char* to_string(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::jump_sum_law: return "jump_sum_law";
        case ExperimentKind::ergodic_mean: return "ergodic_mean";
        case ExperimentKind::smooth_mean: return "smooth_mean";
        case ExperimentKind::stable_fluctuation: return "stable_fluctuation";
        case ExperimentKind::gaussian_fluctuation: return "gaussian_fluctuation";
        case ExperimentKind::estimator_study: return "estimator_study";
        case ExperimentKind::rate_study: return "rate_study";
    }
    throw std::logic_error("unreachable experiment kind");
}

ExperimentKind experiment_kind_from_string(const std::string& name) {
    for (auto kind : {ExperimentKind::jump_sum_law, ExperimentKind::ergodic_mean,
                      ExperimentKind::smooth_mean, ExperimentKind::stable_fluctuation,
                      ExperimentKind::gaussian_fluctuation, ExperimentKind::estimator_study,
                      ExperimentKind::rate_study})
        if (name == to_string(kind)) return kind;
    throw std::invalid_argument("unknown experiment kind: " + name);
}

void ExperimentConfig::validate() const {
    kernel.validate();
    levy.validate();
    require(p > 0.0, "experiment config: p must be positive");
    require(k >= 1, "experiment config: k must be at least 1");
    require(theta > 0.0 && theta <= 2.0, "experiment config: theta must lie in (0, 2]");
    require(!n_ladder.empty(), "experiment config: n_ladder must not be empty");
    for (std::size_t i = 0; i < n_ladder.size(); ++i) {
        require(n_ladder[i] >= k + 1, "experiment config: every n must exceed k");
        if (i > 0)
            require(n_ladder[i] > n_ladder[i - 1], "experiment config: n_ladder must increase");
    }
    require(replications >= 1, "experiment config: need at least one replication");
    require(workers >= 1 && workers <= 256, "experiment config: workers must lie in [1, 256]");
    require(eta_lag_cutoff >= 0, "experiment config: eta_lag_cutoff must be non-negative");

    // Desk-scale resource caps: refuse configurations whose path count or
    // total sample volume could not finish interactively.
    require(n_ladder.back() <= (1L << 24), "experiment config: resource cap exceeded (n)");
    require(replications <= 1'000'000,
            "experiment config: resource cap exceeded (replications)");
    const double volume = double(replications) * double(n_ladder.size()) *
                          double(n_ladder.back()) * double(refinement_r);
    require(volume <= 4e10, "experiment config: resource cap exceeded (total samples)");

    require(tol.mean_rel_dev > 0.0, "experiment config: mean_rel_dev must be positive");
    require(tol.ks_level > 0.0 && tol.ks_level <= 0.2,
            "experiment config: ks_level must lie in (0, 0.2]");
    require(tol.ks_batches >= 1, "experiment config: ks_batches must be positive");
    require(tol.batch_pass_fraction > 0.0 && tol.batch_pass_fraction <= 1.0,
            "experiment config: batch_pass_fraction must lie in (0, 1]");
    require(tol.hill_band > 0.0, "experiment config: hill_band must be positive");
    require(tol.hill_top_fraction > 0.0 && tol.hill_top_fraction <= 0.2,
            "experiment config: hill_top_fraction must lie in (0, 0.2]");
    require(tol.rate_se_multiple > 0.0, "experiment config: rate_se_multiple must be positive");
    require(tol.h_abs_dev > 0.0 && tol.alpha_abs_dev > 0.0 && tol.beta_abs_dev > 0.0,
            "experiment config: estimator tolerances must be positive");

    const auto rr = classify(*this);
    const bool stable_driver = levy.kind == levy::DriverKind::symmetric_stable;
    switch (kind) {
        case ExperimentKind::jump_sum_law:
            require(rr.regime == limits::Regime::jump_sum,
                    "experiment config: declared jump_sum_law but the regime is not jump_sum");
            require(levy.kind != levy::DriverKind::symmetric_stable,
                    "experiment config: jump_sum_law needs a finite-activity driver");
            require(replications >= 20 * tol.ks_batches,
                    "experiment config: jump_sum_law needs >= 20 replications per KS batch");
            break;
        case ExperimentKind::ergodic_mean:
            require(rr.regime == limits::Regime::ergodic,
                    "experiment config: declared ergodic_mean but the regime is not ergodic");
            require(stable_driver, "experiment config: ergodic_mean needs a stable driver");
            break;
        case ExperimentKind::smooth_mean:
            require(rr.regime == limits::Regime::smooth,
                    "experiment config: declared smooth_mean but the regime is not smooth");
            break;
        case ExperimentKind::stable_fluctuation:
            require(rr.regime == limits::Regime::ergodic &&
                        rr.second_order == limits::SecondOrder::stable_correction,
                    "experiment config: declared stable_fluctuation but the second-order "
                    "window does not give the stable correction");
            require(stable_driver,
                    "experiment config: stable_fluctuation needs a stable driver");
            require(replications >= 200,
                    "experiment config: stable_fluctuation needs >= 200 replications");
            break;
        case ExperimentKind::gaussian_fluctuation:
            require(rr.regime == limits::Regime::ergodic &&
                        rr.second_order == limits::SecondOrder::gaussian_clt,
                    "experiment config: declared gaussian_fluctuation but the second-order "
                    "window does not give the CLT");
            require(stable_driver,
                    "experiment config: gaussian_fluctuation needs a stable driver");
            require(replications >= 20 * tol.ks_batches,
                    "experiment config: gaussian_fluctuation needs >= 20 replications per "
                    "KS batch");
            break;
        case ExperimentKind::estimator_study: {
            require(stable_driver, "experiment config: estimator_study needs a stable driver");
            require(levy.beta > 1.0 && levy.beta < 2.0,
                    "experiment config: estimator_study needs beta in (1,2)");
            const double H = kernel.alpha + 1.0 / levy.beta;
            require(H > 0.5 && H < 1.0,
                    "experiment config: estimator_study needs alpha + 1/beta in (1/2,1)");
            require(p > 0.0 && p <= 1.0,
                    "experiment config: the H-ratio statistic needs p in (0,1]");
            break;
        }
        case ExperimentKind::rate_study:
            require(rr.regime == limits::Regime::jump_sum ||
                        rr.regime == limits::Regime::ergodic ||
                        rr.regime == limits::Regime::smooth,
                    "experiment config: rate_study needs a non-critical regime");
            require(n_ladder.size() >= 4, "experiment config: rate_study needs >= 4 ladder points");
            break;
    }
}

ExperimentSummary run_experiment(const ExperimentConfig& config) {
    const auto start = std::chrono::steady_clock::now();
    config.validate();
    const auto regime = classify(config);

    ExperimentSummary s;
    s.kind = config.kind;
    s.p = config.p;
    s.k = config.k;
    s.seed = config.seed;
    s.replications = config.replications;
    s.n_ladder = config.n_ladder;

    const int reps = config.replications;
    const double alpha = config.kernel.alpha;
    const double beta = config.levy.beta;

    double mp = 0.0;
    if (uses_stable_increments(config.kind))
        mp = limits::m_p(config.kernel, beta, config.levy.sigma, config.p, config.k);

    for (long n : config.n_ladder) {
        std::vector<double> stat(reps), aux1, aux2;
        switch (config.kind) {
            case ExperimentKind::ergodic_mean:
                parallel_for(config.workers, reps, [&](int rep) {
                    stat[rep] = stable_normalized_statistic(config, n, rep);
                });
                s.theory.push_back(mp);
                break;

            case ExperimentKind::gaussian_fluctuation:
                aux1.resize(reps);
                aux2.resize(reps);
                parallel_for(config.workers, reps, [&](int rep) {
                    std::vector<double> y;
                    stat[rep] = stable_normalized_statistic(config, n, rep, &y);
                    aux1[rep] = pv::empirical_eta2(y, config.p, config.eta_lag_cutoff);
                    aux2[rep] = std::sqrt(double(n)) * (stat[rep] - mp);
                });
                s.theory.push_back(mp);
                break;

            case ExperimentKind::stable_fluctuation: {
                aux1.resize(reps);
                const double rate = 1.0 - 1.0 / ((config.k - alpha) * beta);
                parallel_for(config.workers, reps, [&](int rep) {
                    stat[rep] = stable_normalized_statistic(config, n, rep);
                    aux1[rep] = std::pow(double(n), rate) * (stat[rep] - mp);
                });
                s.theory.push_back(mp);
                break;
            }

            case ExperimentKind::jump_sum_law:
                aux1.resize(reps);
                parallel_for(config.workers, reps, [&](int rep) {
                    double raw = 0.0;
                    if (config.levy.kind == levy::DriverKind::compound_poisson) {
                        rng::RngStream rs(config.seed, std::uint64_t(rep));
                        const auto jumps =
                            levy::sample_jumps(config.levy, -config.truncation_M, 1.0, rs);
                        const auto xp = path::simulate_compound_poisson_X(config.kernel, jumps, n);
                        raw = pv::power_variation(xp.values, config.p, config.k).raw;
                    } else {
                        const auto xp = path::simulate_moving_average(config.kernel, config.levy,
                                                                      sim_config(config, n, rep));
                        raw = pv::power_variation(xp.values, config.p, config.k).raw;
                    }
                    stat[rep] = std::pow(double(n), alpha * config.p) * raw;
                    rng::RngStream limit_rs(config.seed, kAuxStreamBase + std::uint64_t(rep));
                    aux1[rep] = limits::sample_limit_jump_sum(config.levy, alpha, config.p,
                                                              config.k, config.kernel.c0,
                                                              limit_rs);
                });
                break;

            case ExperimentKind::smooth_mean:
                aux1.resize(reps);
                parallel_for(config.workers, reps, [&](int rep) {
                    const auto sim = sim_config(config, n, rep);
                    const auto xp = path::simulate_moving_average(config.kernel, config.levy, sim);
                    auto pv_res = pv::power_variation(xp.values, config.p, config.k);
                    stat[rep] = pv::normalize(pv_res, regime, alpha,
                                              classification_beta(config.levy))
                                    .normalized;
                    const auto f = path::simulate_derivative_process(config.kernel, config.levy,
                                                                     config.p, config.k, sim);
                    aux1[rep] = f.integral_p;
                });
                break;

            case ExperimentKind::estimator_study:
                aux1.resize(reps);
                aux2.resize(reps);
                parallel_for(config.workers, reps, [&](int rep) {
                    const auto xp = path::simulate_moving_average(config.kernel, config.levy,
                                                                  sim_config(config, n, rep));
                    stat[rep] = est::estimate_H_ratio(xp.values, config.p);
                    const auto fit = est::scale_function_fit(xp.values);
                    aux1[rep] = fit.alpha_hat;
                    aux2[rep] = fit.beta_hat;
                });
                s.theory.push_back(alpha + 1.0 / beta);
                break;

            case ExperimentKind::rate_study:
                parallel_for(config.workers, reps, [&](int rep) {
                    if (config.levy.kind == levy::DriverKind::symmetric_stable) {
                        // Unit-scale increments, rescaled back to the raw sum.
                        const double normalized = stable_normalized_statistic(config, n, rep);
                        stat[rep] =
                            normalized * std::pow(double(n), 1.0 - config.p * (alpha + 1.0 / beta));
                    } else {
                        const auto xp = path::simulate_moving_average(
                            config.kernel, config.levy, sim_config(config, n, rep));
                        stat[rep] = pv::power_variation(xp.values, config.p, config.k).raw;
                    }
                });
                break;
        }
        s.statistics.push_back(std::move(stat));
        if (!aux1.empty()) s.aux.push_back(std::move(aux1));
        if (!aux2.empty()) s.aux2.push_back(std::move(aux2));
    }

    // Acceptance criteria; distributional checks use the last ladder point.
    const auto& final_stat = s.statistics.back();
    switch (config.kind) {
        case ExperimentKind::ergodic_mean:
            s.criteria.push_back(relative_criterion(
                "replication mean within relative tolerance of the ergodic limit",
                mean_of(final_stat), mp, config.tol.mean_rel_dev));
            break;

        case ExperimentKind::smooth_mean: {
            std::vector<double> rel_dev_per_n;
            for (std::size_t li = 0; li < s.statistics.size(); ++li) {
                std::vector<double> dev(reps);
                for (int r = 0; r < reps; ++r)
                    dev[r] = std::fabs(s.statistics[li][r] / s.aux[li][r] - 1.0);
                rel_dev_per_n.push_back(median_of(dev));
            }
            CriterionResult final_dev;
            final_dev.name = "median relative deviation from the coupled integral at final n";
            final_dev.observed = rel_dev_per_n.back();
            final_dev.reference = 0.0;
            final_dev.tolerance = config.tol.mean_rel_dev;
            final_dev.pass = final_dev.observed <= final_dev.tolerance;
            s.criteria.push_back(final_dev);
            if (rel_dev_per_n.size() >= 2) {
                CriterionResult shrink;
                shrink.name = "deviation shrinks along the n ladder";
                shrink.observed = rel_dev_per_n.back();
                shrink.reference = rel_dev_per_n.front();
                shrink.tolerance = 0.0;
                shrink.pass = shrink.observed < shrink.reference;
                s.criteria.push_back(shrink);
            }
            break;
        }

        case ExperimentKind::jump_sum_law: {
            const auto& limit_draws = s.aux.back();
            std::vector<double> ks_values;
            double critical = 0.0;
            for (auto [lo, hi] : batch_ranges(final_stat.size(), config.tol.ks_batches)) {
                std::vector<double> a(final_stat.begin() + lo, final_stat.begin() + hi);
                std::vector<double> b(limit_draws.begin() + lo, limit_draws.begin() + hi);
                critical = ks_critical_value_two_sample(a.size(), b.size(), config.tol.ks_level);
                ks_values.push_back(ks_statistic(std::move(a), std::move(b)));
            }
            append_ks_criteria(s, ks_values, critical, config.tol.batch_pass_fraction);
            break;
        }

        case ExperimentKind::gaussian_fluctuation: {
            const double eta2_bar = mean_of(s.aux.back());
            const auto law = limits::clt_reference(eta2_bar);
            const auto& z = s.aux2.back();
            std::vector<double> ks_values;
            double critical = 0.0;
            for (auto [lo, hi] : batch_ranges(z.size(), config.tol.ks_batches)) {
                std::vector<double> batch(z.begin() + lo, z.begin() + hi);
                critical = ks_critical_value(batch.size(), config.tol.ks_level);
                ks_values.push_back(
                    ks_statistic(std::move(batch), [&law](double x) { return law.cdf(x); }));
            }
            append_ks_criteria(s, ks_values, critical, config.tol.batch_pass_fraction);
            break;
        }

        case ExperimentKind::stable_fluctuation: {
            const auto& fluct = s.aux.back();
            const double target = (config.k - alpha) * beta;
            const auto [index, se] = hill_tail_index(fluct, config.tol.hill_top_fraction);
            CriterionResult hill;
            hill.name = "Hill tail index matches the stable fluctuation order";
            hill.observed = index;
            hill.reference = target;
            hill.tolerance = config.tol.hill_band;
            hill.pass = std::fabs(index - target) <= config.tol.hill_band;
            s.criteria.push_back(hill);

            CriterionResult skew;
            skew.name = "fluctuations are right-skewed";
            skew.observed = skewness_of(fluct);
            skew.reference = 0.0;
            skew.tolerance = 0.0;
            skew.pass = skew.observed > 0.0;
            s.criteria.push_back(skew);
            break;
        }

        case ExperimentKind::estimator_study: {
            const double H = alpha + 1.0 / beta;
            CriterionResult h;
            h.name = "median H-ratio estimate near alpha + 1/beta";
            h.observed = median_of(final_stat);
            h.reference = H;
            h.tolerance = config.tol.h_abs_dev;
            h.pass = std::fabs(h.observed - H) <= h.tolerance;
            s.criteria.push_back(h);

            CriterionResult a;
            a.name = "median fitted alpha near the kernel exponent";
            a.observed = median_of(s.aux.back());
            a.reference = alpha;
            a.tolerance = config.tol.alpha_abs_dev;
            a.pass = std::fabs(a.observed - alpha) <= a.tolerance;
            s.criteria.push_back(a);

            CriterionResult b;
            b.name = "median fitted beta near the driver index";
            b.observed = median_of(s.aux2.back());
            b.reference = beta;
            b.tolerance = config.tol.beta_abs_dev;
            b.pass = std::fabs(b.observed - beta) <= b.tolerance;
            s.criteria.push_back(b);
            break;
        }

        case ExperimentKind::rate_study: {
            std::vector<double> means;
            for (const auto& col : s.statistics) means.push_back(mean_of(col));
            const auto [slope, se] = rate_regression(config.n_ladder, means);
            CriterionResult rate;
            rate.name = "log-log slope of the raw statistic matches the regime exponent";
            rate.observed = slope;
            rate.reference = -regime.normalization_exponent;
            rate.tolerance = config.tol.rate_se_multiple * se;
            rate.pass = std::fabs(slope - rate.reference) <= rate.tolerance;
            s.criteria.push_back(rate);
            break;
        }
    }

    s.pass = std::all_of(s.criteria.begin(), s.criteria.end(),
                         [](const CriterionResult& c) { return c.pass; });
    s.runtime_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return s;
}

double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf) {
    require(samples.size() >= 20, "ks_statistic: need at least 20 samples");
    std::sort(samples.begin(), samples.end());
    const double n = double(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double F = cdf(samples[i]);
        d = std::max({d, F - double(i) / n, double(i + 1) / n - F});
    }
    return d;
}

double ks_statistic(std::vector<double> first, std::vector<double> second) {
    require(first.size() >= 20 && second.size() >= 20,
            "ks_statistic: need at least 20 samples on both sides");
    std::sort(first.begin(), first.end());
    std::sort(second.begin(), second.end());
    const double na = double(first.size()), nb = double(second.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < first.size() && j < second.size()) {
        const double x = std::min(first[i], second[j]);
        while (i < first.size() && first[i] == x) ++i;
        while (j < second.size() && second[j] == x) ++j;
        d = std::max(d, std::fabs(double(i) / na - double(j) / nb));
    }
    return d;
}

double ks_critical_value(std::size_t n, double level) {
    require(n > 0, "ks_critical_value: empty sample");
    require(level > 0.0 && level < 1.0, "ks_critical_value: level must lie in (0,1)");
    return std::sqrt(-0.5 * std::log(level / 2.0)) / std::sqrt(double(n));
}

double ks_critical_value_two_sample(std::size_t n, std::size_t m, double level) {
    require(n > 0 && m > 0, "ks_critical_value_two_sample: empty sample");
    require(level > 0.0 && level < 1.0,
            "ks_critical_value_two_sample: level must lie in (0,1)");
    return std::sqrt(-0.5 * std::log(level / 2.0)) *
           std::sqrt(double(n + m) / (double(n) * double(m)));
}

std::pair<double, double> hill_tail_index(const std::vector<double>& samples,
                                          double top_fraction) {
    require(top_fraction > 0.0 && top_fraction <= 0.2,
            "hill_tail_index: top_fraction must lie in (0, 0.2]");
    std::vector<double> positive;
    for (double x : samples)
        if (x > 0.0) positive.push_back(x);
    std::sort(positive.begin(), positive.end(), std::greater<double>());
    const std::size_t m = std::size_t(std::floor(top_fraction * double(positive.size())));
    if (m < 5 || m >= positive.size())
        throw std::invalid_argument("hill_tail_index: insufficient tail points");
    const double threshold = positive[m];
    KahanSum logs;
    for (std::size_t i = 0; i < m; ++i) logs.add(std::log(positive[i] / threshold));
    const double index = double(m) / logs.value();
    return {index, index / std::sqrt(double(m))};
}

std::pair<double, double> rate_regression(const std::vector<long>& n_ladder,
                                          const std::vector<double>& statistics) {
    require(n_ladder.size() == statistics.size(),
            "rate_regression: ladder and statistics lengths differ");
    require(n_ladder.size() >= 4, "rate_regression: need at least 4 ladder points");
    const std::size_t m = n_ladder.size();
    std::vector<double> x(m), y(m);
    for (std::size_t i = 0; i < m; ++i) {
        require(n_ladder[i] > 0, "rate_regression: n must be positive");
        if (statistics[i] <= 0.0)
            throw std::domain_error("rate_regression: non-positive statistic in the log");
        x[i] = std::log(double(n_ladder[i]));
        y[i] = std::log(statistics[i]);
    }
    const double xb = mean_of(x), yb = mean_of(y);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        sxx += (x[i] - xb) * (x[i] - xb);
        sxy += (x[i] - xb) * (y[i] - yb);
    }
    const double slope = sxy / sxx;
    const double intercept = yb - slope * xb;
    double rss = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double r = y[i] - intercept - slope * x[i];
        rss += r * r;
    }
    const double se = std::sqrt(rss / double(m - 2) / sxx);
    return {slope, se};
}

namespace {

nlohmann::json criteria_to_json(const std::vector<CriterionResult>& criteria) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& c : criteria)
        arr.push_back({{"name", c.name},
                       {"observed", c.observed},
                       {"reference", c.reference},
                       {"tolerance", c.tolerance},
                       {"pass", c.pass}});
    return arr;
}

std::string csv_companion_path(const std::string& json_path) {
    const std::string suffix = ".json";
    if (json_path.size() > suffix.size() &&
        json_path.compare(json_path.size() - suffix.size(), suffix.size(), suffix) == 0)
        return json_path.substr(0, json_path.size() - suffix.size()) + ".csv";
    return json_path + ".csv";
}

void write_csv(const ExperimentSummary& s, const std::string& csv_path) {
    std::ofstream out(csv_path);
    if (!out) throw std::runtime_error("cannot write " + csv_path);
    out << "n,replication,statistic,aux1,aux2\n";
    char buf[64];
    auto cell = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        out << buf;
    };
    for (std::size_t li = 0; li < s.statistics.size(); ++li) {
        for (std::size_t r = 0; r < s.statistics[li].size(); ++r) {
            out << s.n_ladder[li] << ',' << r << ',';
            cell(s.statistics[li][r]);
            out << ',';
            if (li < s.aux.size()) cell(s.aux[li][r]);
            out << ',';
            if (li < s.aux2.size()) cell(s.aux2[li][r]);
            out << '\n';
        }
    }
}

} // namespace

void persist(const ExperimentSummary& summary, const std::string& json_path) {
    nlohmann::json j;
    j["schema_version"] = summary.schema_version;
    j["experiment"] = to_string(summary.kind);
    j["p"] = summary.p;
    j["k"] = summary.k;
    j["seed"] = summary.seed;
    j["replications"] = summary.replications;
    j["n_ladder"] = summary.n_ladder;
    j["theory"] = summary.theory;
    j["statistics"] = summary.statistics;
    j["aux"] = summary.aux;
    j["aux2"] = summary.aux2;
    j["criteria"] = criteria_to_json(summary.criteria);
    j["pass"] = summary.pass;
    std::ofstream out(json_path);
    if (!out) throw std::runtime_error("cannot write " + json_path);
    out << j.dump(2) << '\n';
    write_csv(summary, csv_companion_path(json_path));
}

ExperimentSummary load(const std::string& json_path) {
    std::ifstream in(json_path);
    if (!in) throw std::runtime_error("cannot read " + json_path);
    nlohmann::json j;
    in >> j;
    ExperimentSummary s;
    const int version = j.at("schema_version").get<int>();
    if (version != s.schema_version)
        throw std::runtime_error("schema version mismatch in " + json_path + ": file has " +
                                 std::to_string(version) + ", this build expects " +
                                 std::to_string(s.schema_version));
    s.kind = experiment_kind_from_string(j.at("experiment").get<std::string>());
    s.p = j.at("p").get<double>();
    s.k = j.at("k").get<int>();
    s.seed = j.at("seed").get<std::uint64_t>();
    s.replications = j.at("replications").get<int>();
    s.n_ladder = j.at("n_ladder").get<std::vector<long>>();
    s.theory = j.at("theory").get<std::vector<double>>();
    s.statistics = j.at("statistics").get<std::vector<std::vector<double>>>();
    s.aux = j.at("aux").get<std::vector<std::vector<double>>>();
    s.aux2 = j.at("aux2").get<std::vector<std::vector<double>>>();
    for (const auto& c : j.at("criteria")) {
        CriterionResult cr;
        cr.name = c.at("name").get<std::string>();
        cr.observed = c.at("observed").get<double>();
        cr.reference = c.at("reference").get<double>();
        cr.tolerance = c.at("tolerance").get<double>();
        cr.pass = c.at("pass").get<bool>();
        s.criteria.push_back(cr);
    }
    s.pass = j.at("pass").get<bool>();
    return s;
}

} // namespace levyma::mc
