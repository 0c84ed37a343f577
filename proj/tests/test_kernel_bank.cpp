#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "levyma/kernel.hpp"
#include "levyma/rng.hpp"

using namespace levyma;
using kernel::Domain;
using kernel::KernelSpec;

TEST_CASE("kernel evaluation: closed forms and derivative probes") {
    auto pp = KernelSpec::pure_power(0.5, 1.0);
    CHECK(kernel::eval_g(pp, 4.0) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(kernel::eval_g(pp, -0.5) == 0.0);
    CHECK(kernel::eval_g(pp, 0.0) == 0.0);

    auto gd = KernelSpec::gamma_damped(1.0, 1.0, 1.0);
    // g = t e^{-t}: g' = (1-t) e^{-t}, g'' = (t-2) e^{-t}
    CHECK(kernel::eval_g(gd, 0.3, 1) == doctest::Approx(0.7 * std::exp(-0.3)).epsilon(1e-13));
    CHECK(kernel::eval_g(gd, 1.0, 1) == doctest::Approx(0.0));
    CHECK(kernel::eval_g(gd, 2.5, 2) == doctest::Approx(0.5 * std::exp(-2.5)).epsilon(1e-13));

    // Singular derivative at the origin is flagged, not invented.
    CHECK(std::isnan(kernel::eval_g(pp, 0.0, 1)));
    auto smooth = KernelSpec::gamma_damped(2.5, 1.0, 0.5);
    CHECK(kernel::eval_g(smooth, 0.0, 2) == 0.0);  // alpha > order: limit is 0

    // Finite differences validate every analytic order.
    auto probe = KernelSpec::gamma_damped(1.3, 0.7, 0.8);
    for (int m = 1; m <= 3; ++m) {
        for (double t : {0.4, 1.1, 2.9}) {
            double h = 1e-5 * t;
            double fd =
                (kernel::eval_g(probe, t + h, m - 1) - kernel::eval_g(probe, t - h, m - 1)) /
                (2 * h);
            CHECK(kernel::eval_g(probe, t, m) == doctest::Approx(fd).epsilon(1e-6));
        }
    }

    CHECK_THROWS_AS(kernel::eval_g(pp, 1.0, 5), std::invalid_argument);
    CHECK_THROWS_AS(KernelSpec::pure_power(0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(KernelSpec::pure_power(0.5, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(KernelSpec::gamma_damped(0.5, 1.0, -1.0), std::invalid_argument);
}

TEST_CASE("iterated difference kernel h_k: pinned values") {
    CHECK(kernel::h_k(0.5, 1, 0.3) == doctest::Approx(0.547722557505166).epsilon(1e-12));
    CHECK(kernel::h_k(0.5, 2, 1.5) == doctest::Approx(-0.189468690981506).epsilon(1e-12));
    CHECK(kernel::h_k(1.5, 3, 2.5) == doctest::Approx(-0.497844674271855).epsilon(1e-12));
    CHECK(kernel::h_k(0.25, 1, 7.25) == doctest::Approx(0.0597701873714559).epsilon(1e-12));
    CHECK(kernel::h_k(0.5, 1, 0.0) == 0.0);
    CHECK(kernel::h_k(0.5, 1, -2.0) == 0.0);
    // k-th differences annihilate polynomials of lower degree.
    CHECK(std::fabs(kernel::h_k(2.0, 3, 10.0)) < 1e-10);
}

TEST_CASE("cancellation-safe h_k matches high-precision references far out") {
    // Reference values computed at 30 significant digits.
    CHECK(kernel::h_k_stable(0.4, 1, 20000.0) ==
          doctest::Approx(0.00105062688134859).epsilon(1e-9));
    CHECK(kernel::h_k_stable(0.7, 2, 1000.0) ==
          doctest::Approx(-2.64718484880213e-05).epsilon(3e-9));
    CHECK(kernel::h_k_stable(1.3, 3, 5000.0) ==
          doctest::Approx(-1.40648522097628e-07).epsilon(1e-9));

    // Agreement with the direct sum across the overlap window.
    rng::RngStream rs(42, 0);
    for (int trial = 0; trial < 200; ++trial) {
        int k = 1 + int(rs.next_u64() % 3);
        double alpha = rs.uniform_open(0.05, 1.95);
        double lo = k + 1.0, hi = k == 1 ? 9000.0 : 180.0;
        double x = lo * std::pow(hi / lo, rs.uniform01());
        double direct = kernel::h_k(alpha, k, x);
        double safe = kernel::h_k_stable(alpha, k, x);
        CHECK(safe == doctest::Approx(direct).epsilon(1e-8));
    }
}

TEST_CASE("h_k tail bound: |h_k(x)| <= K x^{alpha-k} beyond the kinks") {
    rng::RngStream rs(43, 0);
    for (int trial = 0; trial < 50; ++trial) {
        int k = 1 + int(rs.next_u64() % 4);
        double alpha = rs.uniform_open(0.05, 2.5);
        double bigk = kernel::hk_tail_constant(alpha, k);
        for (int i = 0; i <= 60; ++i) {
            double x = (k + 1.0) * std::pow(1.0e4 / (k + 1.0), i / 60.0);
            double lhs = std::fabs(kernel::h_k_stable(alpha, k, x));
            REQUIRE(lhs <= bigk * std::pow(x, alpha - k) * (1.0 + 1e-12));
        }
    }
}

TEST_CASE("difference operator on plain functions") {
    auto e = [](double x) { return std::exp(x); };
    double expected = std::exp(0.3) * (1.0 - std::exp(-1.0)) * (1.0 - std::exp(-1.0));
    CHECK(kernel::dk_apply(e, 2, 0.3) == doctest::Approx(0.539371724045919).epsilon(1e-12));
    CHECK(kernel::dk_apply(e, 2, 0.3) == doctest::Approx(expected).epsilon(1e-12));

    auto quad_poly = [](double x) { return 3.0 * x * x - 2.0 * x + 7.0; };
    CHECK(std::fabs(kernel::dk_apply(quad_poly, 3, 1.7)) < 1e-10);
    auto cube = [](double x) { return x * x * x; };
    CHECK(kernel::dk_apply(cube, 3, 4.2) == doctest::Approx(6.0).epsilon(1e-9));
}

TEST_CASE("rescaled difference kernel: self-similarity and limits") {
    // Pure power: the rescaled kernel is n-free, c0 h_k(r - s) exactly.
    auto pp = KernelSpec::pure_power(0.6, 2.0);
    for (long n : {1L, 7L, 64L}) {
        for (double rs_gap : {0.4, 1.7, 3.6, 9.2}) {
            double got = kernel::scaled_kernel_phi_n(pp, n, 2, 5.0 + rs_gap, 5.0);
            CHECK(got == doctest::Approx(2.0 * kernel::h_k(0.6, 2, rs_gap)).epsilon(1e-12));
        }
    }
    // Zero ahead of the support.
    CHECK(kernel::scaled_kernel_phi_n(pp, 8, 2, 3.0, 3.0) == 0.0);
    CHECK(kernel::scaled_kernel_phi_n(pp, 8, 2, 3.0, 4.5) == 0.0);

    // Damped kernel: as n grows the damping washes out and the pure-power
    // shape reappears.
    auto gd = KernelSpec::gamma_damped(0.6, 2.0, 1.0);
    double big_n = kernel::scaled_kernel_phi_n(gd, 1000000, 2, 7.0, 4.5);
    CHECK(big_n == doctest::Approx(2.0 * kernel::h_k(0.6, 2, 2.5)).epsilon(1e-4));

    // n = 1 reduces to the plain difference of g.
    auto g0 = [&gd](double t) { return kernel::eval_g(gd, t); };
    CHECK(kernel::scaled_kernel_phi_n(gd, 1, 2, 4.3, 1.1) ==
          doctest::Approx(kernel::dk_apply(g0, 2, 3.2)).epsilon(1e-12));
}

TEST_CASE("increment kernel ties to the rescaled kernel") {
    auto gd = KernelSpec::gamma_damped(0.6, 1.5, 1.0);
    rng::RngStream rs(44, 0);
    for (int trial = 0; trial < 200; ++trial) {
        long n = 8L << (rs.next_u64() % 8);
        long i = long(rs.next_u64() % (4 * n)) + 1;
        double x = rs.uniform01() * double(i) / double(n);
        double lhs = kernel::increment_kernel_g_in(gd, 2, i, n, x);
        double rhs = std::pow(double(n), -0.6) *
                     kernel::scaled_kernel_phi_n(gd, n, 2, double(i), double(n) * x);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
    }
    // Nothing before the support starts.
    CHECK(kernel::increment_kernel_g_in(gd, 2, 5, 16, 0.40) == 0.0);
}

TEST_CASE("increment kernel obeys the power-decay envelope") {
    auto gd = KernelSpec::gamma_damped(0.6, 1.0, 1.0);
    int k = 2;
    double envelope = 10.0 * (kernel::hk_tail_constant(0.6, k) + 4.0);
    rng::RngStream rs(45, 0);
    for (int trial = 0; trial < 1000; ++trial) {
        long n = 8L << (rs.next_u64() % 10);
        double y = (k + 1.0) * std::pow(5.0 * double(n) / (k + 1.0), rs.uniform01());
        long i = long(y) + 1 + long(rs.next_u64() % 1000);
        double x = (double(i) - y) / double(n);
        double v = std::fabs(kernel::increment_kernel_g_in(gd, k, i, n, x));
        REQUIRE(v * std::pow(double(n), 0.6) * std::pow(y, k - 0.6) <= envelope);
    }
}

TEST_CASE("L^beta norms: closed cases and a pinned high-precision value") {
    auto one = [](double) { return 1.0; };
    CHECK(kernel::lbeta_norm(one, 1.7, Domain::interval(0.0, 1.0), 1e-10) ==
          doctest::Approx(1.0).epsilon(1e-9));
    auto step = [](double x) { return x < 1.0 ? 1.0 : 0.0; };
    CHECK(kernel::lbeta_norm(step, 1.3, Domain::interval(0.0, 2.0), 1e-9, {1.0}) ==
          doctest::Approx(1.0).epsilon(1e-7));
    CHECK(kernel::lbeta_norm(step, 0.8, Domain::from(0.0), 1e-9, {1.0}) ==
          doctest::Approx(1.0).epsilon(1e-7));

    // int_0^inf |h_1|^1.5 for alpha = 0.25, reference 1.85455392160747 (30-digit
    // computation, curvature-corrected tail).
    auto h1 = [](double x) { return kernel::h_k_stable(0.25, 1, x); };
    double hinted = kernel::lbeta_norm(h1, 1.5, Domain::from(0.0), 1e-7, {1.0}, -0.75);
    CHECK(hinted == doctest::Approx(1.85455392160747).epsilon(1e-4));
    double fitted = kernel::lbeta_norm(h1, 1.5, Domain::from(0.0), 1e-7, {1.0});
    CHECK(fitted == doctest::Approx(1.85455392160747).epsilon(2e-4));

    // alpha = 1, k = 1 has h identically 1 beyond the kink: divergent.
    auto plateau = [](double x) { return kernel::h_k(1.0, 1, x); };
    CHECK_THROWS_AS(kernel::lbeta_norm(plateau, 1.5, Domain::from(0.0), 1e-7, {1.0}),
                    std::domain_error);
}

TEST_CASE("h_k specific L^beta norm") {
    CHECK(kernel::hk_lbeta_norm_pow(0.25, 1, 1.5, 1e-8) ==
          doctest::Approx(1.85455392160747).epsilon(1e-5));

    // Cross-check against the generic path.
    auto h2 = [](double x) { return kernel::h_k_stable(0.8, 2, x); };
    double generic = kernel::lbeta_norm(h2, 1.4, Domain::from(0.0), 1e-8,
                                        {1.0, 2.0}, 0.8 - 2.0);
    CHECK(kernel::hk_lbeta_norm_pow(0.8, 2, 1.4, 1e-8) ==
          doctest::Approx(generic).epsilon(1e-4));

    // Divergence exactly at and past the boundary (k - alpha) beta <= 1.
    CHECK_THROWS_AS(kernel::hk_lbeta_norm_pow(0.5, 1, 2.0, 1e-8), std::domain_error);
    CHECK_THROWS_AS(kernel::hk_lbeta_norm_pow(0.9, 1, 1.5, 1e-8), std::domain_error);
    CHECK_THROWS_AS(kernel::hk_lbeta_norm_pow(-0.1, 1, 1.5, 1e-8), std::invalid_argument);
}

TEST_CASE("lag-power series: pinned references and the divergence wall") {
    // Slow decay (exponent 1.4): reference 0.745283702077761, two independent
    // 30-digit summation methods agreeing to 3e-16.
    CHECK(kernel::vm_series(0.3, 1, 2.0, 0.1, 1e-10) ==
          doctest::Approx(0.745283702077761).epsilon(1e-7));
    // Moderate decay (exponent 1.5): reference 2.25958332970044.
    CHECK(kernel::vm_series(1.5, 2, 3.0, 0.0, 1e-10) ==
          doctest::Approx(2.25958332970044).epsilon(1e-8));
    // Fast decay (exponent 3): reference 0.330099489609399.
    CHECK(kernel::vm_series(0.5, 2, 2.0, 0.25, 1e-10) ==
          doctest::Approx(0.330099489609399).epsilon(1e-9));

    // The series is Hoelder(alpha) in U at the integer kinks, not Lipschitz:
    // the l = 1 term moves by ~ 2 U^alpha.
    double at0 = kernel::vm_series(0.3, 1, 2.0, 0.0, 1e-10);
    double near0 = kernel::vm_series(0.3, 1, 2.0, 1e-9, 1e-10);
    CHECK(std::fabs(at0 - near0) < 3.0 * std::pow(1e-9, 0.3));

    // alpha >= k - 1/p diverges; the boundary case counts as divergent.
    CHECK_THROWS_AS(kernel::vm_series(0.5, 1, 2.0, 0.0, 1e-8), std::domain_error);
    CHECK_THROWS_AS(kernel::vm_series(0.9, 1, 1.0, 0.0, 1e-8), std::domain_error);
    CHECK_THROWS_AS(kernel::vm_series(0.3, 1, 2.0, 1.0, 1e-8), std::invalid_argument);
    CHECK_THROWS_AS(kernel::vm_series(0.3, 1, 0.0, 0.0, 1e-8), std::invalid_argument);
}

TEST_CASE("kernel regularity report") {
    // Damped kernel: every clause holds for theta = 1.5 at k = 2.
    auto gd = KernelSpec::gamma_damped(0.4, 1.0, 1.0);
    auto rep = kernel::validate_assumption_A(gd, 1.5, 2);
    CHECK(rep.smooth_on_positive_axis);
    CHECK(rep.power_limit_at_zero);
    CHECK(rep.derivative_bound_near_zero);
    CHECK(rep.integrable_decreasing_tail);
    CHECK(rep.log_integral_finite);
    CHECK(rep.all_pass);
    CHECK(rep.fitted_K > 0.0);
    CHECK(rep.smallest_passing_theta == doctest::Approx(0.05));  // exponential tail

    // Pure power at theta = 1.5: tail exponent theta (alpha - 1) = -0.9 >= -1,
    // so the tail clause must fail.
    auto pp = KernelSpec::pure_power(0.4, 1.0);
    auto rep_pp = kernel::validate_assumption_A(pp, 1.5, 1);
    CHECK(rep_pp.smooth_on_positive_axis);
    CHECK(rep_pp.power_limit_at_zero);
    CHECK(rep_pp.derivative_bound_near_zero);
    CHECK_FALSE(rep_pp.integrable_decreasing_tail);
    CHECK_FALSE(rep_pp.all_pass);

    // Same kernel passes once theta > 1/(1 - alpha) = 5/3.
    auto rep_pp2 = kernel::validate_assumption_A(pp, 1.8, 1);
    CHECK(rep_pp2.integrable_decreasing_tail);
    CHECK(rep_pp2.all_pass);
    CHECK(rep_pp2.smallest_passing_theta == doctest::Approx(1.7).epsilon(0.05));

    // Smooth damped kernel with alpha above the order: bounded derivative near
    // zero comes for free.
    auto smooth = KernelSpec::gamma_damped(2.5, 1.0, 0.5);
    auto rep_s = kernel::validate_assumption_A(smooth, 1.0, 2);
    CHECK(rep_s.derivative_bound_near_zero);
    CHECK(rep_s.all_pass);

    CHECK_THROWS_AS(kernel::validate_assumption_A(gd, 0.0, 2), std::invalid_argument);
    CHECK_THROWS_AS(kernel::validate_assumption_A(gd, 1.5, 9), std::invalid_argument);
}
