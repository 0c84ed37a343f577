#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "levyma/kernel.hpp"
#include "levyma/levy.hpp"

namespace levyma::path {

// Discretization plan for one path: observations at i/n for i = 0..n, driver
// increments on the sub-mesh 1/(n r), integration window [-M, 1].
struct SimConfig {
    long n = 1024;
    double truncation_M = 1.0;
    int refinement_r = 8;
    std::uint64_t seed = 1;
    std::uint64_t stream = 0;

    void validate(int k = 1) const;  // n >= k+1, M > 0, r >= 1
};

struct PathSample {
    std::vector<double> values;  // X_{i/n}, i = 0..n
    long n = 0;
    kernel::KernelSpec kernel_spec;
    levy::LevySpec levy_spec;
    std::map<std::string, double> bias_report;
};

// Moving-average path X_t = int {g(t-s) - g0(-s)} dL_s on [-M, 1].
// Finite-activity drivers are evaluated exactly on their jumps; infinite-
// activity drivers by a midpoint Riemann sum on the sub-mesh (FFT-accelerated).
// The kernel must pass the regularity report at a moment order the driver
// actually has, and the kernel difference must be beta-integrable.
PathSample simulate_moving_average(const kernel::KernelSpec& ker,
                                   const levy::LevySpec& levy_spec, const SimConfig& cfg);

// The scaled k-th increment sequence {Y_i, i = k..n}: equal in law to
// {n^{alpha+1/beta} (k-th increments of X)} for a symmetric beta-stable driver,
// simulated at unit scale so no precision is lost to differencing.
// Within the window each Y_i has its exact marginal stable scale (the cell
// coefficients carry the L^beta mass of the kernel cell); the truncated far
// field enters as one shared stable draw with the exact tail scale.
std::vector<double> simulate_scaled_increments(const kernel::KernelSpec& ker, double beta,
                                               double sigma, long n, int k,
                                               const SimConfig& cfg);

// Linear fractional stable motion with H = alpha + 1/beta on {i/n}; alpha = 0
// degenerates to the stable Levy path itself.
PathSample simulate_lfsm(double alpha, double beta, double sigma, long n,
                         const SimConfig& cfg);

// Exact finite-jump path: X_{i/n} = sum_m {g(i/n - T_m) - g0(-T_m)} size_m.
PathSample simulate_compound_poisson_X(const kernel::KernelSpec& ker,
                                       const std::vector<levy::Jump>& jumps, long n);

struct DerivativeSample {
    std::vector<double> f_values;   // F_{i/n} = int g^{(k)}(i/n - s) dL_s, i = 0..n
    double integral_p = 0.0;        // trapezoid of |F_u|^p over [0, 1]
    double integral_p_winsorized = 0.0;  // same with the top 0.1% of |F| clipped
};

// The derivative-kernel process F paired with the X of the same seed/stream:
// running simulate_moving_average and simulate_derivative_process with an
// identical config couples (X, F) through the same driver realization.
DerivativeSample simulate_derivative_process(const kernel::KernelSpec& ker,
                                             const levy::LevySpec& levy_spec, double p,
                                             int k, const SimConfig& cfg);

} // namespace levyma::path
