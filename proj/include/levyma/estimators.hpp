#pragma once

#include <vector>

#include "levyma/path.hpp"

namespace levyma::est {

// Knobs for the scale-curve fit: coarse grid resolution over (alpha, 1/beta),
// the simplex iteration cap, and how many of the best grid cells seed a
// simplex run.
struct FitConfig {
    int grid_points = 41;
    int max_iterations = 200;
    int restarts = 3;
};

struct EstimatorResult {
    double alpha_hat = 0.0;
    double beta_hat = 0.0;
    double H_hat = 0.0;  // alpha_hat + 1/beta_hat
    double objective_value = 0.0;
    std::vector<double> p_grid;
    std::vector<double> observed_scale;    // S(n,p) per grid point
    std::vector<double> objective_trace;   // incumbent objective per optimizer step
};

// Limiting scale exponent of -log V(p;1)_n / log n for a self-similar
// stable-driven path: alpha*p, p*H-1, or p-1 depending on which of
// (alpha, beta, p) dominates; continuous across the branch boundaries.
// Requires p in (1,2), beta in (1,2), alpha > 0, alpha + 1/beta in (1/2,1).
double theoretical_scale_function(double alpha, double beta, double p);

// 33 equally spaced powers in [1.05, 1.95]; endpoints trimmed away from the
// p = 1, 2 boundaries where the scale curve loses identifiability.
std::vector<double> default_p_grid();

// Least-squares fit of the theoretical scale curve to an observed one:
// trapezoid-weighted squared distance over p_grid, minimized over the
// feasible (alpha, 1/beta) triangle by a coarse grid pass plus Nelder-Mead
// refinement started from the best cells. The observed curve is taken as
// given; use scale_function_fit to derive it from a path.
EstimatorResult fit_scale_curve(const std::vector<double>& p_grid,
                                const std::vector<double>& observed_scale,
                                const FitConfig& cfg = {});

// End-to-end (alpha, beta) estimation: S(n,p) on the grid, then the curve fit.
EstimatorResult scale_function_fit(const std::vector<double>& path,
                                   const std::vector<double>& p_grid = default_p_grid(),
                                   const FitConfig& cfg = {});
EstimatorResult scale_function_fit(const path::PathSample& sample,
                                   const std::vector<double>& p_grid = default_p_grid(),
                                   const FitConfig& cfg = {});

// Self-similarity index from the span-2 / span-1 ratio statistic,
// log2(R(n,p)) / p; requires p in (0,1].
double estimate_H_ratio(const std::vector<double>& path, double p);
double estimate_H_ratio(const path::PathSample& sample, double p);

} // namespace levyma::est
