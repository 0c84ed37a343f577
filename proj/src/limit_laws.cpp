#include "levyma/limit_laws.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "levyma/common.hpp"
#include "levyma/quadrature.hpp"

namespace levyma::limits {

namespace {

constexpr double kBoundaryTol = 1e-12;

} // namespace

const char* to_string(Regime regime) {
    switch (regime) {
        case Regime::jump_sum: return "jump_sum";
        case Regime::ergodic: return "ergodic";
        case Regime::smooth: return "smooth";
        case Regime::critical: return "critical";
        case Regime::undefined_case: return "undefined";
    }
    return "undefined";
}

const char* to_string(SecondOrder order) {
    switch (order) {
        case SecondOrder::stable_correction: return "stable_correction";
        case SecondOrder::gaussian_clt: return "gaussian_clt";
        case SecondOrder::none: return "none";
    }
    return "none";
}

RegimeReport classify_regime(double alpha, double beta, double p, int k, double theta) {
    require(alpha > 0.0, "classify_regime: alpha must be positive");
    require(beta > 0.0 && beta < 2.0, "classify_regime: beta must lie in (0, 2)");
    require(p > 0.0, "classify_regime: p must be positive");
    require(k >= 1, "classify_regime: k must be at least 1");
    require(theta > 0.0 && theta <= 2.0, "classify_regime: theta must lie in (0, 2]");

    RegimeReport rep;
    auto note = [&rep](const char* what, bool holds) {
        rep.conditions_checked.emplace_back(what, holds);
        return holds;
    };

    const double thr_jump = k - 1.0 / p;
    const double thr_erg = k - 1.0 / beta;
    const double thr_smooth = k - 1.0 / std::max(beta, p);

    const bool crit_pb = std::fabs(p - beta) <= kBoundaryTol;
    const bool crit_jump = std::fabs(alpha - thr_jump) <= kBoundaryTol;
    const bool crit_erg = std::fabs(alpha - thr_erg) <= kBoundaryTol;
    note("p away from beta", !crit_pb);
    note("alpha away from k - 1/p", !crit_jump);
    note("alpha away from k - 1/beta", !crit_erg);

    const double nan = std::numeric_limits<double>::quiet_NaN();
    if (crit_pb || (p > beta && crit_jump) || (p < beta && crit_erg)) {
        rep.regime = Regime::critical;
        rep.normalization_exponent = nan;
        rep.limit_description = "boundary case between regimes; no limit asserted";
        return rep;
    }

    const bool heavy_power = note("p > beta", p > beta);
    const bool below_jump = note("alpha < k - 1/p", alpha < thr_jump);
    const bool light_power = note("p < beta", p < beta);
    const bool below_erg = note("alpha < k - 1/beta", alpha < thr_erg);
    const bool above_smooth = note("alpha > k - 1/max(beta, p)", alpha > thr_smooth);

    if (heavy_power && below_jump) {
        rep.regime = Regime::jump_sum;
        rep.normalization_exponent = alpha * p;
        rep.limit_description = "weighted p-th powers of the driver's jumps on the unit interval";
        rep.needs_log_refinement = std::fabs(theta - 1.0) <= kBoundaryTol;
        note("theta away from 1 (else amplitude-decay refinement needed)",
             !rep.needs_log_refinement);
        return rep;
    }

    if (light_power && below_erg) {
        rep.regime = Regime::ergodic;
        rep.normalization_exponent = -1.0 + p * (alpha + 1.0 / beta);
        rep.limit_description = "deterministic mean of the p-th absolute moment";

        const bool small_p = note("p < beta/2 (fluctuation theory)", p < beta / 2.0 - kBoundaryTol);
        if (small_p) {
            const double lo2 = k - 2.0 / beta;
            const bool in_window =
                alpha > lo2 + kBoundaryTol && alpha < thr_erg - kBoundaryTol;
            note("alpha in (k - 2/beta, k - 1/beta)", in_window);
            if (in_window) {
                bool extra = true;
                if (beta < 0.5) {
                    extra = alpha > k - 1.0 / (beta * (1.0 - beta)) + kBoundaryTol;
                    note("alpha > k - 1/(beta(1-beta)) (low-activity side condition)", extra);
                }
                if (extra) rep.second_order = SecondOrder::stable_correction;
            } else if (alpha < lo2 - kBoundaryTol) {
                note("alpha in (0, k - 2/beta)", true);
                rep.second_order = SecondOrder::gaussian_clt;
            }
        }
        return rep;
    }

    if (above_smooth) {
        const bool p_ok = note("p >= 1 (smooth regime)", p >= 1.0 - kBoundaryTol);
        if (p_ok) {
            rep.regime = Regime::smooth;
            rep.normalization_exponent = -1.0 + p * k;
            rep.limit_description = "Riemann integral of the p-th power of the derivative process";
            rep.needs_log_refinement = std::fabs(p - theta) <= kBoundaryTol;
            note("p away from theta (else amplitude-decay refinement needed)",
                 !rep.needs_log_refinement);
            return rep;
        }
    }

    rep.regime = Regime::undefined_case;
    rep.normalization_exponent = nan;
    rep.limit_description = "outside every supported regime";
    return rep;
}

double stable_abs_moment(double beta, double p) {
    require(beta > 0.0 && beta <= 2.0, "stable_abs_moment: beta must lie in (0, 2]");
    require(p >= 0.0, "stable_abs_moment: p must be nonnegative");
    if (p >= beta)
        throw std::domain_error("stable_abs_moment: E|Z|^p is infinite for p >= beta");
    const double num = std::pow(2.0, p) * std::tgamma(0.5 * (1.0 + p)) * std::tgamma(1.0 - p / beta);
    const double den = std::tgamma(1.0 - 0.5 * p) * std::sqrt(M_PI);
    return num / den;
}

double m_p(const kernel::KernelSpec& ker, double beta, double sigma, double p, int k) {
    ker.validate();
    require(sigma > 0.0, "m_p: sigma must be positive");
    require(k >= 1, "m_p: k must be at least 1");
    const double norm_pow = kernel::hk_lbeta_norm_pow(ker.alpha, k, beta, 1e-10);
    const double moment = stable_abs_moment(beta, p);
    return pow_abs(ker.c0, p) * std::pow(sigma, p) * std::pow(norm_pow, p / beta) * moment;
}

double tau(double rho) {
    if (!(rho >= 1.0 + 1e-6 && rho < 2.0))
        throw std::domain_error("tau: rho must lie in [1 + 1e-6, 2)");
    return (rho - 1.0) / (std::tgamma(2.0 - rho) * std::fabs(std::cos(0.5 * M_PI * rho)));
}

double a_p_constant(double p) {
    require(p > 0.0 && p < 1.0, "a_p_constant: p must lie in (0, 1)");
    return 2.0 * std::tgamma(1.0 - p) * std::cos(0.5 * M_PI * p) / p;
}

double phi_rho(double rho, double beta, double p, double x) {
    require(rho > 0.0, "phi_rho: rho must be positive");
    require(beta > 0.0 && beta <= 2.0, "phi_rho: beta must lie in (0, 2]");
    require(p > 0.0 && p < 1.0, "phi_rho: p must lie in (0, 1)");
    const double ax = std::fabs(x);
    if (ax == 0.0) return 0.0;

    // E|W + x|^p - E|W|^p = (2/a_p) |x|^p I(c) with
    // I(c) = int_0^inf (1 - cos t) e^{-c t^beta} t^{-1-p} dt, c = (rho/|x|)^beta.
    const double c = std::pow(rho / ax, beta);
    if (!std::isfinite(c)) return 0.0;  // |x| far below the noise scale

    // Everything beyond t_decay is killed by the exponential envelope.
    const double t_decay = std::pow(45.0 / c, 1.0 / beta);
    if (t_decay <= 0.01) {
        // The mass sits where 1 - cos t = t^2/2 - t^4/24 + O(t^6), giving a
        // closed form via int_0^inf t^(m-1) e^(-c t^beta) dt
        //   = Gamma(m/beta) / (beta c^(m/beta)).
        const double i2 = std::tgamma((2.0 - p) / beta) /
                          (2.0 * beta * std::pow(c, (2.0 - p) / beta));
        const double i4 = std::tgamma((4.0 - p) / beta) /
                          (24.0 * beta * std::pow(c, (4.0 - p) / beta));
        return 2.0 / a_p_constant(p) * std::pow(ax, p) * (i2 - i4);
    }

    auto integrand = [c, beta, p](double t) {
        const double st = std::sin(0.5 * t);
        return 2.0 * st * st * std::exp(-c * std::pow(t, beta)) * std::pow(t, -1.0 - p);
    };

    // Resolve oscillation on a pi grid out to where the exponential envelope
    // dies, capping the grid and correcting the rest analytically. When the
    // envelope dies inside the first pi interval, the integrand is a narrow
    // bump the coarse pass would miss entirely, so seed a geometric ladder of
    // points across the bump's scale.
    const double t_cap = 400.0 * M_PI;
    const double big_t = M_PI * std::ceil(std::min(std::max(t_decay, 4.0), t_cap) / M_PI);
    std::vector<double> pts;
    pts.reserve(static_cast<std::size_t>(big_t / M_PI) + 16);
    pts.push_back(0.0);
    if (t_decay < M_PI)
        for (double t = t_decay / 64.0; t < M_PI && t < 4.0 * t_decay; t *= 2.0)
            pts.push_back(t);
    for (double t = M_PI; t < big_t + 0.5 * M_PI; t += M_PI) pts.push_back(t);
    pts.back() = big_t;
    double value = quad::integrate_segments(integrand, pts, 1e-9);

    if (c * std::pow(big_t, beta) < 40.0) {
        // int_T^inf (1 - cos t) f(t) dt with f(t) = e^{-c t^beta} t^{-1-p}:
        // the monotone part by geometric extension, the oscillatory part by
        // two integrations by parts (residual O(f''(T))).
        auto envelope = [c, beta, p](double t) {
            return std::exp(-c * std::pow(t, beta)) * std::pow(t, -1.0 - p);
        };
        const double tail_pos = quad::geometric_tail(envelope, big_t, 2.0, 1e-9);
        const double f_t = envelope(big_t);
        const double fp_t =
            f_t * (-(1.0 + p) / big_t - c * beta * std::pow(big_t, beta - 1.0));
        const double tail_cos = -std::sin(big_t) * f_t - std::cos(big_t) * fp_t;
        value += tail_pos - tail_cos;
    }

    return 2.0 / a_p_constant(p) * std::pow(ax, p) * value;
}

double kappa(double alpha, double beta, double p, int k, double y_max) {
    require(k >= 1, "kappa: k must be at least 1");
    require(alpha > 0.0 && alpha < static_cast<double>(k), "kappa: alpha must lie in (0, k)");
    require(beta > 0.0 && beta < 2.0, "kappa: beta must lie in (0, 2)");
    require(p > 0.0 && p < 1.0, "kappa: p must lie in (0, 1)");
    require(y_max >= 10.0, "kappa: y_max must be at least 10");

    const double s = 1.0 / (k - alpha);
    if (s >= 2.0 - 1e-9)
        throw std::domain_error(
            "kappa: the integral diverges at the origin; need k - alpha > 1/2");
    if (s <= p + 1e-9)
        throw std::domain_error(
            "kappa: the integral diverges at infinity; need k - alpha < 1/p");

    const double b = kernel::hk_lbeta_norm_pow(alpha, k, beta, 1e-10);
    const double rho = std::pow(b, 1.0 / beta);
    const double ap = a_p_constant(p);

    // Near the origin Phi has the even expansion
    //   Phi(y) = (2/a_p) sum_{j>=1} (-1)^{j+1} M_j y^{2j} / (2j)!,
    //   M_j = Gamma((2j - p)/beta) / (beta b^{(2j-p)/beta}),
    // which integrates against y^{-1-s} in closed form. For beta < 1 the
    // expansion is asymptotic, so shrink delta until the terms are decreasing
    // and the truncation is negligible.
    double head = 0.0;
    double delta = 0.05;
    for (int attempt = 0; attempt < 8; ++attempt) {
        head = 0.0;
        double prev_mag = std::numeric_limits<double>::infinity();
        double last_mag = 0.0;
        bool ok = true;
        for (int j = 1; j <= 6; ++j) {
            const double m = 2.0 * j - p;
            const double mj = std::tgamma(m / beta) / (beta * std::pow(b, m / beta));
            double fact = 1.0;
            for (int i = 2; i <= 2 * j; ++i) fact *= i;
            const double term = (j % 2 == 1 ? 1.0 : -1.0) * mj *
                                std::pow(delta, 2.0 * j - s) / (fact * (2.0 * j - s));
            last_mag = std::fabs(term);
            if (last_mag > prev_mag) { ok = false; break; }
            head += term;
            prev_mag = last_mag;
        }
        head *= 2.0 / ap;
        if (ok && last_mag * (2.0 / ap) <= 1e-10 * std::fabs(head)) break;
        delta *= 0.5;
    }

    // Middle part on a doubling grid from delta to y_max.
    auto middle_f = [&](double y) { return phi_rho(rho, beta, p, y) * std::pow(y, -1.0 - s); };
    std::vector<double> pts{delta};
    double t = delta;
    while (t < y_max) {
        t = std::min(2.0 * t, y_max);
        pts.push_back(t);
    }
    const double middle = quad::integrate_segments(middle_f, pts, 1e-8);

    // Beyond y_max use Phi(y) = y^p - E|W|^p + R(y) with R decaying like
    // y^{p - beta}, matching R at y_max.
    const double q = (p < beta) ? std::pow(rho, p) * stable_abs_moment(beta, p) : 0.0;
    const double phi_y = phi_rho(rho, beta, p, y_max);
    const double resid = phi_y - (std::pow(y_max, p) - q);
    const double tail = std::pow(y_max, p - s) / (s - p) - q * std::pow(y_max, -s) / s +
                        resid * std::pow(y_max, -s) / (s + beta - p);

    const double j_int = head + middle + tail;
    const double k_alpha = std::fabs(falling_factorial(alpha, k));
    return std::pow(k_alpha, s) * s * j_int;
}

double sigma_tilde(double alpha, double beta, double p, int k, double c0, double sigma) {
    require(sigma > 0.0, "sigma_tilde: sigma must be positive");
    require(c0 != 0.0, "sigma_tilde: c0 must be nonzero");
    require(k >= 1, "sigma_tilde: k must be at least 1");
    const double rate = (k - alpha) * beta;
    if (!(beta > 1.0 && beta < 2.0))
        throw std::domain_error("sigma_tilde: beta must lie in (1, 2)");
    if (!(rate > 1.0 && rate < 2.0))
        throw std::domain_error("sigma_tilde: (k - alpha) beta must lie in (1, 2)");
    const double ratio = std::pow(tau(beta) / tau(rate), 1.0 / rate);
    return pow_abs(c0, p) * std::pow(sigma, p) * ratio * kappa(alpha, beta, p, k);
}

double sample_limit_jump_sum(const std::vector<levy::Jump>& jumps, double alpha, double p,
                             int k, double c0, rng::RngStream& rs) {
    require(p > 0.0, "sample_limit_jump_sum: p must be positive");
    require(k >= 1, "sample_limit_jump_sum: k must be at least 1");
    KahanSum acc;
    for (const auto& j : jumps) {
        const double u = rs.uniform01();
        acc.add(pow_abs(j.size, p) * kernel::vm_series(alpha, k, p, u, 1e-9));
    }
    return pow_abs(c0, p) * acc.value();
}

double sample_limit_jump_sum(const levy::LevySpec& spec, double alpha, double p, int k,
                             double c0, rng::RngStream& rs) {
    const auto jumps = levy::sample_jumps(spec, 0.0, 1.0, rs);
    return sample_limit_jump_sum(jumps, alpha, p, k, c0, rs);
}

double NormalLaw::cdf(double x) const {
    require(eta2 > 0.0, "NormalLaw: variance must be positive");
    return 0.5 * std::erfc(-x / std::sqrt(2.0 * eta2));
}

NormalLaw clt_reference(double eta2) {
    require(eta2 > 0.0, "clt_reference: variance must be positive");
    return NormalLaw{eta2};
}

} // namespace levyma::limits
