#pragma once

#include <functional>
#include <limits>
#include <map>
#include <string>
#include <vector>

namespace levyma::kernel {

enum class KernelFamily { pure_power, gamma_damped };

// Moving-average kernel g(t) = c0 t^alpha e^{-lambda t} on t >= 0, zero on
// t < 0. PurePower is the lambda = 0 member; its natural pairing is the
// fractional-Levy convention g0 = g (the kernel difference g(t-s) - g0(-s)
// stays integrable). GammaDamped defaults to the plain moving-average
// convention g0 = 0.
struct KernelSpec {
    KernelFamily family = KernelFamily::pure_power;
    double alpha = 0.5;
    double c0 = 1.0;
    double lambda = 0.0;
    bool g0_equals_g = true;
    int k_max = 4;

    static KernelSpec pure_power(double alpha, double c0);
    static KernelSpec gamma_damped(double alpha, double c0, double lambda);

    void validate() const;
};

// g^{(order)}(t), analytic via the Leibniz expansion of t^alpha e^{-lambda t}.
// Returns 0 for t < 0. Singular evaluations (t = 0, order >= 1, alpha <= order)
// return quiet NaN as the singularity signal; the caller decides.
double eval_g(const KernelSpec& spec, double t, int order = 0);

// h_k(x) = sum_{j=0}^k (-1)^j binom(k,j) (x-j)_+^alpha; 0 for x <= 0.
double h_k(double alpha, int k, double x);

// h_k evaluated without catastrophic cancellation for large x, switching to
// the asymptotic form k_alpha (x - k/2)^{alpha-k} (1 + c2/x^2) past a
// k-dependent threshold. Used by series tails and norm quadrature.
double h_k_stable(double alpha, int k, double x);

// Leading asymptotic constant k_alpha = alpha (alpha-1) ... (alpha-k+1).
double hk_asymptotic_constant(double alpha, int k);

// k-th backward difference with unit lag: sum_j (-1)^j binom(k,j) phi(x-j).
double dk_apply(const std::function<double(double)>& phi, int k, double x);

// phi_r^n(s) = D^k g_n(r-s) with g_n(x) = n^alpha g(x/n); the kernel of the
// rescaled increment process.
double scaled_kernel_phi_n(const KernelSpec& spec, long n, int k, double r, double s);

// g_{i,n}(x) = sum_j (-1)^j binom(k,j) g((i-j)/n - x), the exact kernel of the
// k-th increment over the observation grid.
double increment_kernel_g_in(const KernelSpec& spec, int k, long i, long n, double x);

// Integration domain: [a, b] when finite, [a, infinity) otherwise.
struct Domain {
    double a = 0.0;
    double b = 0.0;
    bool half_line = false;

    static Domain interval(double a, double b) { return {a, b, false}; }
    static Domain from(double a) { return {a, 0.0, true}; }
};

// int_domain |f|^beta dx to relative tolerance tol. Interior kinks may be
// passed to pin the subdivision. On a half-line the tail beyond a finite
// cutoff is extrapolated as a power law; the exponent is fitted from probes
// unless a hint is supplied. Fitted-or-hinted exponent e with e*beta >= -1
// raises the divergent-integral error.
double lbeta_norm(const std::function<double(double)>& f, double beta, Domain domain,
                  double tol, const std::vector<double>& kinks = {},
                  double tail_exponent_hint = std::numeric_limits<double>::quiet_NaN());

// ||h_k||_{L^beta([0,inf))}^beta with exact kink splitting and the exact
// asymptotic tail; throws the divergent-integral error iff (k-alpha)beta <= 1.
double hk_lbeta_norm_pow(double alpha, int k, double beta, double tol);

// Fitted constant K = 1.05 * sup probe |h_k(x)| x^{k-alpha} over a log grid;
// realizes the existential constant of the kernel-tail bound.
double hk_tail_constant(double alpha, int k);

// V(U) = sum_{l>=0} |h_k(l+U)|^p. Explicit compensated summation to a
// tolerance-chosen cutoff plus an Euler-Maclaurin tail on the asymptotic form.
// Requires the strict convergence condition alpha < k - 1/p.
double vm_series(double alpha, int k, double p, double U, double tol);

// Numerical Assumption-(A)-style report for a kernel spec at a given theta.
struct AssumptionReport {
    bool smooth_on_positive_axis = false;       // (a) C^k probes
    bool power_limit_at_zero = false;           // (b) g(t) t^{-alpha} -> c0
    bool derivative_bound_near_zero = false;    // (c) |g^(k)| <= K t^{alpha-k} on (0, delta)
    bool integrable_decreasing_tail = false;    // (d) |g'|, |g^(k)| in L^theta(delta, inf), decreasing
    bool log_integral_finite = false;           // (e) the (A-log) refinement
    bool all_pass = false;
    double fitted_K = 0.0;
    double delta = 0.0;
    double smallest_passing_theta = 0.0;        // 0 when none on the probe grid
    std::map<std::string, double> diagnostics;
};

AssumptionReport validate_assumption_A(const KernelSpec& spec, double theta, int k);

} // namespace levyma::kernel
