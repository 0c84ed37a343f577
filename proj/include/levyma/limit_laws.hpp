#pragma once

#include <string>
#include <utility>
#include <vector>

#include "levyma/kernel.hpp"
#include "levyma/levy.hpp"
#include "levyma/rng.hpp"

namespace levyma::limits {

// First-order behaviour of the normalized power variation.
enum class Regime {
    jump_sum,        // dominated by the driver's largest jumps
    ergodic,         // law-of-large-numbers limit at the deterministic mean
    smooth,          // path differentiable a.e.; Riemann integral limit
    critical,        // on a boundary between regimes; no limit asserted
    undefined_case,  // parameters outside every supported regime
};

// Fluctuations around the ergodic mean, where applicable.
enum class SecondOrder { stable_correction, gaussian_clt, none };

const char* to_string(Regime regime);
const char* to_string(SecondOrder order);

struct RegimeReport {
    Regime regime = Regime::undefined_case;
    SecondOrder second_order = SecondOrder::none;
    // Exponent e such that n^e V(p;k)_n has the stated limit; NaN when the
    // regime is critical or undefined.
    double normalization_exponent = 0.0;
    std::string limit_description;
    // The amplitude-decay refinement of the kernel tail condition is needed on
    // two exact moment-order boundaries.
    bool needs_log_refinement = false;
    std::vector<std::pair<std::string, bool>> conditions_checked;
};

// Decide which limit applies for a kernel exponent alpha, driver activity
// index beta, power p, filter order k, and kernel moment order theta.
// Boundaries are flagged as critical within an absolute tolerance of 1e-12.
RegimeReport classify_regime(double alpha, double beta, double p, int k, double theta);

// E|Z|^p for Z symmetric beta-stable with unit scale; closed form, p < beta.
double stable_abs_moment(double beta, double p);

// The ergodic-regime mean: |c0|^p sigma^p (int |h_k|^beta)^{p/beta} E|Z|^p.
double m_p(const kernel::KernelSpec& ker, double beta, double sigma, double p, int k);

// tau(rho) = (rho - 1) / (Gamma(2 - rho) |cos(pi rho / 2)|), rho in (1, 2).
double tau(double rho);

// a_p = 2 Gamma(1-p) cos(pi p / 2) / p for p in (0,1); the normalizer of the
// fractional cosine transform below.
double a_p_constant(double p);

// Phi_rho(x) = E|W + x|^p - E|W|^p for W symmetric beta-stable with scale rho,
// evaluated through its cosine-transform representation.
double phi_rho(double rho, double beta, double p, double x);

// kappa = |k_alpha|^{1/(k-alpha)} / (k-alpha) * int_0^inf Phi(y) y^{-1-1/(k-alpha)} dy,
// with k_alpha = alpha (alpha-1) ... (alpha-k+1) and Phi at rho = ||h_k||_beta.
// y_max is the switch point to the analytic power tail (kept as a parameter so
// tail self-consistency is testable).
double kappa(double alpha, double beta, double p, int k, double y_max = 200.0);

// Scale of the totally right-skewed stable fluctuation limit:
// |c0|^p sigma^p (tau_beta / tau_{(k-alpha)beta})^{1/((k-alpha)beta)} kappa.
double sigma_tilde(double alpha, double beta, double p, int k, double c0, double sigma);

// One draw of the jump-regime limit |c0|^p sum_m |size_m|^p V_m, where each
// V_m = sum_{l>=0} |h_k(l + U_m)|^p with its own U_m ~ U[0,1).
double sample_limit_jump_sum(const std::vector<levy::Jump>& jumps, double alpha, double p,
                             int k, double c0, rng::RngStream& rs);

// Same, but sampling the jumps on [0,1] from a finite-activity driver first.
double sample_limit_jump_sum(const levy::LevySpec& spec, double alpha, double p, int k,
                             double c0, rng::RngStream& rs);

// N(0, eta2) reference law for the Gaussian fluctuation regime.
struct NormalLaw {
    double eta2 = 1.0;
    double cdf(double x) const;
    double operator()(double x) const { return cdf(x); }
};
NormalLaw clt_reference(double eta2);

} // namespace levyma::limits
