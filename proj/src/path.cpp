#include "levyma/path.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <stdexcept>

#include "levyma/common.hpp"
#include "levyma/fftconv.hpp"
#include "levyma/quadrature.hpp"
#include "levyma/rng.hpp"

namespace levyma::path {

void SimConfig::validate(int k) const {
    require(k >= 1, "SimConfig: increment order must be at least 1");
    require(n >= k + 1, "SimConfig: need at least k + 1 observation intervals");
    require(truncation_M > 0.0, "SimConfig: integration window must have positive length");
    require(refinement_r >= 1, "SimConfig: refinement factor must be at least 1");
}

namespace {

using kernel::KernelFamily;
using kernel::KernelSpec;
using levy::DriverKind;
using levy::LevySpec;

// ---------------------------------------------------------------------------
// Compatibility gate.  A kernel/driver pair is usable when the kernel's
// regularity report passes at a moment order the driver actually has: a
// beta-stable driver controls Levy-tail mass up to order beta, finite-activity
// and truncated drivers up to order 2.  The report is cached because the
// Monte Carlo layer re-validates on every replication.
// ---------------------------------------------------------------------------

double driver_moment_order(const LevySpec& levy_spec) {
    return levy_spec.kind == DriverKind::symmetric_stable ? levy_spec.beta : 2.0;
}

struct GateVerdict {
    bool ok = false;
    std::string message;
};

const GateVerdict& gate_verdict(const KernelSpec& ker, double theta, int k) {
    static std::mutex mu;
    static std::map<std::string, GateVerdict> cache;

    std::ostringstream os;
    os.precision(17);
    os << int(ker.family) << '|' << ker.alpha << '|' << ker.c0 << '|' << ker.lambda << '|'
       << ker.g0_equals_g << '|' << theta << '|' << k;
    std::string key = os.str();

    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;

    auto rep = kernel::validate_assumption_A(ker, theta, k);
    GateVerdict v;
    v.ok = rep.smooth_on_positive_axis && rep.power_limit_at_zero &&
           rep.derivative_bound_near_zero && rep.integrable_decreasing_tail;
    if (!v.ok) {
        std::ostringstream msg;
        msg << "kernel fails the regularity requirements at moment order " << theta
            << " (order-" << k << " derivative must be power-bounded near zero and decay"
            << " integrably): alpha = " << ker.alpha;
        v.message = msg.str();
    }
    return cache.emplace(std::move(key), std::move(v)).first->second;
}

void require_compatible(const KernelSpec& ker, const LevySpec& levy_spec, int k,
                        const char* where) {
    if (!ker.g0_equals_g) {
        // Without the centering term the kernel itself must be integrable at
        // infinity; a growing pure power makes the integral diverge.
        require(ker.family == KernelFamily::gamma_damped,
                std::string(where) + ": a pure power kernel needs the centered form (g0 = g)");
    }
    const GateVerdict& v = gate_verdict(ker, driver_moment_order(levy_spec), k);
    if (!v.ok) throw std::invalid_argument(std::string(where) + ": " + v.message);
}

// Second moment of a jump size; +inf when the law is too heavy-tailed.
double jump_second_moment(const levy::JumpLaw& law) {
    switch (law.kind) {
        case levy::JumpKind::unit_symmetric:
            return 1.0;
        case levy::JumpKind::gaussian:
            return law.scale * law.scale;
        case levy::JumpKind::pareto_symmetric:
            if (law.index <= 2.0) return std::numeric_limits<double>::infinity();
            return law.scale * law.scale * law.index / (law.index - 2.0);
    }
    return std::numeric_limits<double>::infinity();
}

// ---------------------------------------------------------------------------
// Exact finite-jump evaluation, shared by the compound Poisson branch of
// simulate_moving_average and by simulate_compound_poisson_X.
// ---------------------------------------------------------------------------

PathSample exact_jump_path(const KernelSpec& ker, const std::vector<levy::Jump>& jumps,
                           long n) {
    PathSample out;
    out.n = n;
    out.kernel_spec = ker;
    out.values.assign(std::size_t(n) + 1, 0.0);
    for (const auto& j : jumps) {
        // g vanishes on the negative axis, so the centering term is only
        // nonzero for jumps before time zero.
        double g0v = ker.g0_equals_g ? kernel::eval_g(ker, -j.time) : 0.0;
        for (long i = 0; i <= n; ++i) {
            double t = double(i) / double(n);
            out.values[std::size_t(i)] += (kernel::eval_g(ker, t - j.time) - g0v) * j.size;
        }
    }
    return out;
}

// Expected-variance bound on what truncating the window at -M discards, for a
// finite-activity driver with symmetric jumps (the discarded terms are a
// centered sum, so the standard deviation is the honest size).
double cp_truncation_sd_bound(const KernelSpec& ker, const LevySpec& levy_spec, double M) {
    double m2 = jump_second_moment(levy_spec.jumps);
    if (!std::isfinite(m2)) return std::numeric_limits<double>::infinity();
    double tail_var;
    if (ker.family == KernelFamily::pure_power) {
        // |g(x+t) - g(x)| <= c0 alpha x^{alpha-1} for t <= 1; square-integrable
        // over (M, inf) only when alpha < 1/2 (which the gate enforces).
        double a = ker.alpha;
        if (2.0 * a - 1.0 >= 0.0) return std::numeric_limits<double>::infinity();
        double c = ker.c0 * a;
        tail_var = c * c * std::pow(M, 2.0 * a - 1.0) / (1.0 - 2.0 * a);
    } else {
        // Damped kernels decay exponentially; bound the difference by
        // |g(x)| + |g(x+1)| and integrate numerically.
        auto f = [&](double x) {
            double d = std::fabs(kernel::eval_g(ker, x)) + std::fabs(kernel::eval_g(ker, x + 1.0));
            return d * d;
        };
        tail_var = quad::geometric_tail(f, M, 2.0, 1e-6);
    }
    return std::sqrt(levy_spec.intensity * m2 * tail_var);
}

// ---------------------------------------------------------------------------
// Cell plan for the unit-scale increment simulator.  Cell m carries the exact
// L^beta mass of the rescaled increment kernel over [m/r, (m+1)/r], so the
// lattice sum has the exact marginal stable scale; the discarded far field
// beyond W lag units enters as one shared draw with the exact tail scale.
// ---------------------------------------------------------------------------

struct CellPlan {
    std::vector<double> coef;  // signed cell coefficients, length W * r
    double tail_pow = 0.0;     // int_W^inf |phi|^beta
};

std::shared_ptr<const CellPlan> cell_plan(const KernelSpec& ker, double beta, int k, long W,
                                          int r, long n) {
    static std::mutex mu;
    static std::map<std::string, std::shared_ptr<const CellPlan>> cache;

    bool pure = ker.family == KernelFamily::pure_power;
    long n_eff = pure ? 0 : n;  // the pure power plan is mesh-independent

    std::ostringstream os;
    os.precision(17);
    os << int(ker.family) << '|' << ker.alpha << '|' << ker.c0 << '|' << ker.lambda << '|'
       << beta << '|' << k << '|' << W << '|' << r << '|' << n_eff;
    std::string key = os.str();

    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }

    auto phi = [&](double x) {
        return pure ? ker.c0 * kernel::h_k_stable(ker.alpha, k, x)
                    : kernel::scaled_kernel_phi_n(ker, n, k, x, 0.0);
    };
    auto abs_pow = [&](double x) { return pow_abs(phi(x), beta); };

    auto plan = std::make_shared<CellPlan>();
    plan->coef.resize(std::size_t(W) * std::size_t(r));
    double near_edge = double(k + 1);  // beyond the last kink the kernel is smooth
    for (long m = 0; m < W * r; ++m) {
        double lo = double(m) / r, hi = double(m + 1) / r;
        double err = 0.0;
        double cell = quad::gk15(abs_pow, lo, hi, err);
        if (lo < near_edge && err > 1e-10 * std::max(cell, 1e-12)) {
            cell = quad::adaptive(abs_pow, lo, hi, std::max(1e-13, 1e-10 * cell));
        }
        double s = phi(0.5 * (lo + hi)) < 0.0 ? -1.0 : 1.0;
        plan->coef[std::size_t(m)] = s * std::pow(double(r) * cell, 1.0 / beta);
    }

    if (pure) {
        require((k - ker.alpha) * beta > 1.0,
                "scaled increments: the kernel's L^beta mass diverges; need (k - alpha) beta > 1");
        plan->tail_pow = kernel::lbeta_norm(phi, beta, kernel::Domain::from(double(W)), 1e-9, {},
                                            ker.alpha - k);
    } else {
        plan->tail_pow =
            kernel::lbeta_norm(phi, beta, kernel::Domain::from(double(W)), 1e-9, {});
    }

    std::lock_guard<std::mutex> lock(mu);
    return cache.emplace(std::move(key), std::move(plan)).first->second;
}

}  // namespace

// ---------------------------------------------------------------------------

PathSample simulate_compound_poisson_X(const KernelSpec& ker,
                                       const std::vector<levy::Jump>& jumps, long n) {
    ker.validate();
    require(n >= 1, "simulate_compound_poisson_X: need at least one observation interval");
    PathSample out = exact_jump_path(ker, jumps, n);
    out.levy_spec.kind = DriverKind::compound_poisson;
    out.levy_spec.intensity = 0.0;  // jumps were supplied, not sampled
    out.bias_report["jumps_in_window"] = double(jumps.size());
    return out;
}

PathSample simulate_moving_average(const KernelSpec& ker, const LevySpec& levy_spec,
                                   const SimConfig& cfg) {
    ker.validate();
    levy_spec.validate();
    cfg.validate(1);
    require_compatible(ker, levy_spec, 1, "simulate_moving_average");

    rng::RngStream rs(cfg.seed, cfg.stream);
    const double M = cfg.truncation_M;

    if (levy_spec.kind == DriverKind::compound_poisson) {
        auto jumps = levy::sample_jumps(levy_spec, -M, 1.0, rs);
        PathSample out = exact_jump_path(ker, jumps, cfg.n);
        out.levy_spec = levy_spec;
        out.bias_report["jumps_in_window"] = double(jumps.size());
        out.bias_report["window_start"] = -M;
        out.bias_report["truncation_sd_bound"] = cp_truncation_sd_bound(ker, levy_spec, M);
        return out;
    }

    // Infinite-activity drivers: midpoint Riemann sum on the refined mesh,
    // evaluated for every observation at once as a linear convolution.
    const long n = cfg.n;
    const long m = n * cfg.refinement_r;  // cells per unit time
    const long below = std::max<long>(1, (long)std::ceil(M * double(m) - 1e-12));
    const long total = below + m;

    auto dl = levy::sample_levy_increments(levy_spec, 1.0 / double(m), std::size_t(total), rs);
    std::vector<double> lattice(std::size_t(total), 0.0);
    for (long d = 0; d < total; ++d) {
        lattice[std::size_t(d)] = kernel::eval_g(ker, (double(d) + 0.5) / double(m));
    }
    auto conv = fft::convolve_full(lattice, dl);

    double g0sum = 0.0;
    if (ker.g0_equals_g) {
        KahanSum acc;
        for (long j = 0; j < below; ++j) {
            acc.add(kernel::eval_g(ker, (double(below - j) - 0.5) / double(m)) *
                    dl[std::size_t(j)]);
        }
        g0sum = acc.value();
    }

    PathSample out;
    out.n = n;
    out.kernel_spec = ker;
    out.levy_spec = levy_spec;
    out.values.resize(std::size_t(n) + 1);
    for (long i = 0; i <= n; ++i) {
        out.values[std::size_t(i)] = conv[std::size_t(i * cfg.refinement_r + below - 1)] - g0sum;
    }

    // Diagnostics: how much beta-scale the window cut off, measured on the
    // kernel difference at the far end of the observation interval.
    double beta = levy_spec.beta;
    KahanSum body;
    for (long j = 0; j < total; ++j) {
        double f = lattice[std::size_t(total - 1 - j)];
        if (ker.g0_equals_g && j < below) {
            f -= kernel::eval_g(ker, (double(below - j) - 0.5) / double(m));
        }
        body.add(pow_abs(f, beta) / double(m));
    }
    double tail_pow;
    if (ker.family == KernelFamily::pure_power) {
        double a = ker.alpha, q = (1.0 - a) * beta;
        tail_pow = q > 1.0 ? pow_abs(ker.c0 * a, beta) * std::pow(M, 1.0 - q) / (q - 1.0)
                           : std::numeric_limits<double>::infinity();
    } else {
        auto f = [&](double x) { return pow_abs(2.0 * kernel::eval_g(ker, x), beta); };
        tail_pow = quad::geometric_tail(f, M, 2.0, 1e-6);
    }
    out.bias_report["mesh"] = 1.0 / double(m);
    out.bias_report["cells"] = double(total);
    out.bias_report["truncation_tail_scale_share"] =
        std::pow(tail_pow / std::max(tail_pow + body.value(), 1e-300), 1.0 / beta);
    return out;
}

std::vector<double> simulate_scaled_increments(const KernelSpec& ker, double beta, double sigma,
                                               long n, int k, const SimConfig& cfg) {
    ker.validate();
    require(beta > 0.0 && beta <= 2.0, "simulate_scaled_increments: beta must lie in (0,2]");
    require(sigma > 0.0, "simulate_scaled_increments: sigma must be positive");
    require(k >= 1, "simulate_scaled_increments: increment order must be at least 1");
    // n is taken from the argument; cfg contributes window, refinement, seed.
    require(n >= k + 1, "simulate_scaled_increments: need n >= k + 1");
    require(cfg.truncation_M > 0.0, "simulate_scaled_increments: window must be positive");
    require(cfg.refinement_r >= 1, "simulate_scaled_increments: refinement must be at least 1");

    const long W = std::max<long>((long)std::ceil(cfg.truncation_M * double(n) - 1e-12), 1);
    require(W >= k + 1,
            "simulate_scaled_increments: window shorter than the increment span; raise "
            "truncation_M above (k+1)/n");
    const int r = cfg.refinement_r;

    auto plan = cell_plan(ker, beta, k, W, r, n);

    rng::RngStream rs(cfg.seed, cfg.stream);
    // Draw order is fixed for reproducibility: the shared far-field term
    // first, then the cell lattice.
    double shared_tail = 0.0;
    if (plan->tail_pow > 0.0) {
        shared_tail = levy::sample_symmetric_stable(
            rs, beta, sigma * std::pow(plan->tail_pow, 1.0 / beta));
    }
    std::size_t count = std::size_t(n - k + W) * std::size_t(r);
    auto noise =
        levy::sample_symmetric_stable(beta, sigma * std::pow(double(r), -1.0 / beta), count, rs);

    auto conv = fft::convolve_full(plan->coef, noise);
    std::vector<double> out(std::size_t(n - k) + 1);
    for (long i = k; i <= n; ++i) {
        out[std::size_t(i - k)] =
            conv[std::size_t((i - k + W) * long(r) - 1)] + shared_tail;
    }
    return out;
}

PathSample simulate_lfsm(double alpha, double beta, double sigma, long n,
                         const SimConfig& cfg) {
    require(beta > 1.0 && beta <= 2.0, "simulate_lfsm: beta must lie in (1,2]");
    require(alpha >= 0.0 && alpha < 1.0 - 1.0 / beta,
            "simulate_lfsm: need 0 <= alpha < 1 - 1/beta so the self-similarity index "
            "lies in (0,1)");
    require(sigma > 0.0, "simulate_lfsm: sigma must be positive");
    require(n >= 2, "simulate_lfsm: need at least two observation intervals");
    const double H = alpha + 1.0 / beta;

    PathSample out;
    out.n = n;
    out.kernel_spec.family = KernelFamily::pure_power;
    out.kernel_spec.alpha = alpha;
    out.kernel_spec.c0 = 1.0;
    out.levy_spec = LevySpec::symmetric_stable_spec(beta, sigma);
    out.bias_report["hurst"] = H;
    out.values.assign(std::size_t(n) + 1, 0.0);

    if (alpha == 0.0) {
        // The kernel degenerates to an indicator: the path is the stable
        // process itself, sampled exactly.
        rng::RngStream rs(cfg.seed, cfg.stream);
        auto incr = levy::sample_symmetric_stable(beta, sigma, std::size_t(n), rs);
        double scale = std::pow(double(n), -1.0 / beta);
        for (long i = 1; i <= n; ++i) {
            out.values[std::size_t(i)] = out.values[std::size_t(i - 1)] +
                                         scale * incr[std::size_t(i - 1)];
        }
        return out;
    }

    auto y = simulate_scaled_increments(KernelSpec::pure_power(alpha, 1.0), beta, sigma, n, 1,
                                        cfg);
    double scale = std::pow(double(n), -H);
    for (long i = 1; i <= n; ++i) {
        out.values[std::size_t(i)] =
            out.values[std::size_t(i - 1)] + scale * y[std::size_t(i - 1)];
    }
    return out;
}

DerivativeSample simulate_derivative_process(const KernelSpec& ker, const LevySpec& levy_spec,
                                             double p, int k, const SimConfig& cfg) {
    ker.validate();
    levy_spec.validate();
    require(p > 0.0, "simulate_derivative_process: p must be positive");
    cfg.validate(k);

    double activity = levy_spec.activity_index();
    double denom = std::max(activity, p);
    require(denom > 0.0 && ker.alpha > double(k) - 1.0 / denom,
            "simulate_derivative_process: undefined unless alpha > k - 1/max(activity, p)");
    require_compatible(ker, levy_spec, k, "simulate_derivative_process");

    const long n = cfg.n;
    rng::RngStream rs(cfg.seed, cfg.stream);
    DerivativeSample out;
    out.f_values.assign(std::size_t(n) + 1, 0.0);

    if (levy_spec.kind == DriverKind::compound_poisson) {
        // Same stream position as simulate_moving_average, so the pair (X, F)
        // produced with an identical config shares its jumps.
        auto jumps = levy::sample_jumps(levy_spec, -cfg.truncation_M, 1.0, rs);
        for (const auto& j : jumps) {
            for (long i = 0; i <= n; ++i) {
                double t = double(i) / double(n);
                if (t <= j.time) continue;
                out.f_values[std::size_t(i)] += kernel::eval_g(ker, t - j.time, k) * j.size;
            }
        }
    } else {
        const long m = n * cfg.refinement_r;
        const long below =
            std::max<long>(1, (long)std::ceil(cfg.truncation_M * double(m) - 1e-12));
        const long total = below + m;
        auto dl =
            levy::sample_levy_increments(levy_spec, 1.0 / double(m), std::size_t(total), rs);
        std::vector<double> lattice(std::size_t(total), 0.0);
        for (long d = 0; d < total; ++d) {
            lattice[std::size_t(d)] = kernel::eval_g(ker, (double(d) + 0.5) / double(m), k);
        }
        auto conv = fft::convolve_full(lattice, dl);
        for (long i = 0; i <= n; ++i) {
            out.f_values[std::size_t(i)] =
                conv[std::size_t(i * cfg.refinement_r + below - 1)];
        }
    }

    // Trapezoid rule for int_0^1 |F_u|^p du, plus a winsorized variant that
    // clips the top 0.1% of |F| in case the path grazed a singularity.
    std::vector<double> mags(out.f_values.size());
    for (std::size_t i = 0; i < mags.size(); ++i) mags[i] = std::fabs(out.f_values[i]);
    std::vector<double> sorted = mags;
    std::sort(sorted.begin(), sorted.end());
    std::size_t nclip = std::size_t(0.001 * double(sorted.size()));
    double cap = sorted[sorted.size() - 1 - nclip];

    KahanSum raw, wins;
    for (std::size_t i = 0; i < mags.size(); ++i) {
        double w = (i == 0 || i + 1 == mags.size()) ? 0.5 : 1.0;
        raw.add(w * pow_abs(mags[i], p));
        wins.add(w * pow_abs(std::min(mags[i], cap), p));
    }
    out.integral_p = raw.value() / double(n);
    out.integral_p_winsorized = wins.value() / double(n);
    return out;
}

} // namespace levyma::path
