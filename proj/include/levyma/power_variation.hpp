#pragma once

#include <utility>
#include <vector>

#include "levyma/limit_laws.hpp"
#include "levyma/path.hpp"

namespace levyma::pv {

struct PowerVariationResult {
    double raw = 0.0;         // sum_{i=k}^{n} |k-th increment|^p
    double normalized = 0.0;  // raw * n^normalization_exponent
    double normalization_exponent = 0.0;
    double p = 0.0;
    int k = 0;
    long n = 0;  // number of observation intervals (path length - 1)
};

// Iterated backward differences over an equally spaced sample:
// out[i] = sum_{j=0}^{k} (-1)^j binom(k,j) path[i+k-j], i = 0..len-1-k.
// Annihilates polynomials of degree < k.
std::vector<double> kth_increments(const std::vector<double>& path, int k);
std::vector<double> kth_increments(const path::PathSample& sample, int k);

// Unnormalized p-th power variation of order k; normalized == raw until
// normalize() is applied.
PowerVariationResult power_variation(const std::vector<double>& path, double p, int k);
PowerVariationResult power_variation(const path::PathSample& sample, double p, int k);

// Attach the regime-appropriate n^e factor. Critical or undefined regimes
// have no sanctioned normalization and raise a domain error.
PowerVariationResult normalize(const PowerVariationResult& result,
                               const limits::RegimeReport& regime, double alpha, double beta);

// Span-2 over span-1 ratio of first-difference p-th powers, and the implied
// scaling index log2(R)/p. Requires p in (0,1]; degenerate paths (a zero
// numerator or denominator) raise a domain error.
std::pair<double, double> ratio_statistic(const std::vector<double>& path, double p);
std::pair<double, double> ratio_statistic(const path::PathSample& sample, double p);

// S(n,p) = -log V(p;1)_n / log n; finite only when the variation is positive.
double log_scale_statistic(const std::vector<double>& path, double p);

// Long-run variance of |Y_i|^p from one stretch of (already scaled)
// increments: biased sample variance plus twice the first lag_cutoff biased
// autocovariances. lag_cutoff <= 0 selects floor(n^{1/3}).
double empirical_eta2(const std::vector<double>& scaled_increments, double p,
                      long lag_cutoff = 0);

} // namespace levyma::pv
