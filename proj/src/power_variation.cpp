#include "levyma/power_variation.hpp"

#include <cmath>
#include <stdexcept>

#include "levyma/common.hpp"

namespace levyma::pv {

std::vector<double> kth_increments(const std::vector<double>& path, int k) {
    require(k >= 1, "kth_increments: k must be at least 1");
    require(path.size() >= static_cast<std::size_t>(k) + 1,
            "kth_increments: path needs at least k + 1 points");
    std::vector<double> coef(static_cast<std::size_t>(k) + 1);
    for (int j = 0; j <= k; ++j) coef[j] = (j % 2 == 0 ? 1.0 : -1.0) * binom(k, j);
    std::vector<double> out(path.size() - static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < out.size(); ++i) {
        double d = 0.0;
        for (int j = 0; j <= k; ++j) d += coef[j] * path[i + static_cast<std::size_t>(k - j)];
        out[i] = d;
    }
    return out;
}

std::vector<double> kth_increments(const path::PathSample& sample, int k) {
    return kth_increments(sample.values, k);
}

PowerVariationResult power_variation(const std::vector<double>& path, double p, int k) {
    require(p > 0.0, "power_variation: p must be positive");
    const auto incr = kth_increments(path, k);
    KahanSum acc;
    for (double d : incr) acc.add(pow_abs(d, p));
    PowerVariationResult r;
    r.raw = acc.value();
    r.normalized = r.raw;
    r.normalization_exponent = 0.0;
    r.p = p;
    r.k = k;
    r.n = static_cast<long>(path.size()) - 1;
    return r;
}

PowerVariationResult power_variation(const path::PathSample& sample, double p, int k) {
    return power_variation(sample.values, p, k);
}

PowerVariationResult normalize(const PowerVariationResult& result,
                               const limits::RegimeReport& regime, double alpha, double beta) {
    require(result.n >= 1, "normalize: result must come from a nonempty path");
    require(beta > 0.0, "normalize: beta must be positive");
    double e = 0.0;
    switch (regime.regime) {
        case limits::Regime::jump_sum:
            e = alpha * result.p;
            break;
        case limits::Regime::ergodic:
            e = -1.0 + result.p * (alpha + 1.0 / beta);
            break;
        case limits::Regime::smooth:
            e = -1.0 + result.p * result.k;
            break;
        case limits::Regime::critical:
        case limits::Regime::undefined_case:
            throw std::domain_error(
                "normalize: no normalization applies in a critical or undefined regime");
    }
    PowerVariationResult out = result;
    out.normalization_exponent = e;
    out.normalized = result.raw * std::pow(static_cast<double>(result.n), e);
    return out;
}

std::pair<double, double> ratio_statistic(const std::vector<double>& path, double p) {
    require(p > 0.0 && p <= 1.0, "ratio_statistic: p must lie in (0, 1]");
    require(path.size() >= 3, "ratio_statistic: path needs at least 3 points");
    KahanSum num;
    for (std::size_t i = 2; i < path.size(); ++i) num.add(pow_abs(path[i] - path[i - 2], p));
    KahanSum den;
    for (std::size_t i = 1; i < path.size(); ++i) den.add(pow_abs(path[i] - path[i - 1], p));
    if (den.value() <= 0.0)
        throw std::domain_error("ratio_statistic: degenerate path (no span-1 variation)");
    if (num.value() <= 0.0)
        throw std::domain_error("ratio_statistic: degenerate path (no span-2 variation)");
    const double ratio = num.value() / den.value();
    const double index = std::log(ratio) / (p * std::log(2.0));
    return {ratio, index};
}

std::pair<double, double> ratio_statistic(const path::PathSample& sample, double p) {
    return ratio_statistic(sample.values, p);
}

double log_scale_statistic(const std::vector<double>& path, double p) {
    require(path.size() >= 3, "log_scale_statistic: path needs at least 3 points");
    const auto r = power_variation(path, p, 1);
    if (r.raw <= 0.0)
        throw std::domain_error("log_scale_statistic: the power variation vanishes");
    return -std::log(r.raw) / std::log(static_cast<double>(r.n));
}

double empirical_eta2(const std::vector<double>& scaled_increments, double p, long lag_cutoff) {
    require(p > 0.0, "empirical_eta2: p must be positive");
    const long n = static_cast<long>(scaled_increments.size());
    require(n >= 2, "empirical_eta2: need at least 2 observations");
    long cutoff = lag_cutoff;
    if (cutoff <= 0) cutoff = static_cast<long>(std::floor(std::cbrt(static_cast<double>(n))));
    require(cutoff < n, "empirical_eta2: lag cutoff must be below the sample length");

    std::vector<double> a(scaled_increments.size());
    KahanSum mean_acc;
    for (std::size_t i = 0; i < a.size(); ++i) {
        a[i] = pow_abs(scaled_increments[i], p);
        mean_acc.add(a[i]);
    }
    const double mean = mean_acc.value() / static_cast<double>(n);
    for (double& v : a) v -= mean;

    auto gamma = [&a, n](long lag) {
        KahanSum acc;
        for (long i = 0; i + lag < n; ++i)
            acc.add(a[static_cast<std::size_t>(i)] * a[static_cast<std::size_t>(i + lag)]);
        return acc.value() / static_cast<double>(n);
    };

    double eta2 = gamma(0);
    for (long l = 1; l <= cutoff; ++l) eta2 += 2.0 * gamma(l);
    return eta2;
}

} // namespace levyma::pv
