#include "levyma/levy.hpp"

#include <algorithm>
#include <cmath>

#include "levyma/common.hpp"
#include "levyma/quadrature.hpp"

namespace levyma::levy {

namespace {
constexpr double kPi = 3.141592653589793238462643383279;
constexpr double kHalfPi = 1.570796326794896619231321691640;
} // namespace

double JumpLaw::sample(rng::RngStream& rs) const {
    switch (kind) {
        case JumpKind::unit_symmetric:
            return (rs.next_u64() & 1ULL) ? 1.0 : -1.0;
        case JumpKind::gaussian:
            return scale * rs.normal();
        case JumpKind::pareto_symmetric: {
            double sign = (rs.next_u64() & 1ULL) ? 1.0 : -1.0;
            return sign * scale * std::pow(rs.uniform_pos(), -1.0 / index);
        }
    }
    throw std::logic_error("JumpLaw::sample: unreachable");
}

void JumpLaw::validate() const {
    switch (kind) {
        case JumpKind::unit_symmetric:
            return;
        case JumpKind::gaussian:
            require(scale > 0.0, "jump law: gaussian scale must be positive");
            return;
        case JumpKind::pareto_symmetric:
            require(scale > 0.0, "jump law: pareto minimum must be positive");
            require(index > 0.0, "jump law: pareto index must be positive");
            return;
    }
}

LevySpec LevySpec::symmetric_stable_spec(double beta, double sigma) {
    LevySpec s;
    s.kind = DriverKind::symmetric_stable;
    s.beta = beta;
    s.sigma = sigma;
    s.validate();
    return s;
}

LevySpec LevySpec::compound_poisson_spec(double intensity, JumpLaw law) {
    LevySpec s;
    s.kind = DriverKind::compound_poisson;
    s.intensity = intensity;
    s.jumps = law;
    s.validate();
    return s;
}

LevySpec LevySpec::tempered_stable_spec(double beta, double sigma, double cutoff) {
    LevySpec s;
    s.kind = DriverKind::tempered_stable;
    s.beta = beta;
    s.sigma = sigma;
    s.cutoff = cutoff;
    s.validate();
    return s;
}

double LevySpec::activity_index() const {
    switch (kind) {
        case DriverKind::symmetric_stable:
        case DriverKind::tempered_stable:
            return beta;
        case DriverKind::compound_poisson:
            return 0.0;
    }
    throw std::logic_error("LevySpec::activity_index: unreachable");
}

void LevySpec::validate() const {
    switch (kind) {
        case DriverKind::symmetric_stable:
            require(beta > 0.0 && beta <= 2.0, "stable driver: beta must lie in (0,2]");
            require(sigma > 0.0, "stable driver: sigma must be positive");
            return;
        case DriverKind::compound_poisson:
            require(intensity >= 0.0, "compound Poisson driver: intensity must be nonnegative");
            jumps.validate();
            return;
        case DriverKind::tempered_stable:
            require(beta > 0.0 && beta < 2.0, "truncated stable driver: beta must lie in (0,2)");
            require(sigma > 0.0, "truncated stable driver: sigma must be positive");
            require(cutoff > 0.0, "truncated stable driver: cutoff must be positive");
            require(small_jump_fraction > 0.0 && small_jump_fraction < 1.0,
                    "truncated stable driver: split fraction must lie in (0,1)");
            return;
    }
}

double sample_symmetric_stable(rng::RngStream& rs, double beta, double sigma) {
    double theta = rs.uniform_open(-kHalfPi, kHalfPi);
    if (beta == 1.0) return sigma * std::tan(theta);
    double w = rs.exponential();
    double ct = std::cos(theta);
    double x = std::sin(beta * theta) / std::pow(ct, 1.0 / beta) *
               std::pow(std::cos((1.0 - beta) * theta) / w, (1.0 - beta) / beta);
    return sigma * x;
}

std::vector<double> sample_symmetric_stable(double beta, double sigma,
                                            std::size_t count, rng::RngStream& rs) {
    require(beta > 0.0 && beta <= 2.0, "sample_symmetric_stable: beta must lie in (0,2]");
    require(sigma > 0.0, "sample_symmetric_stable: sigma must be positive");
    require(count >= 1, "sample_symmetric_stable: count must be >= 1");
    std::vector<double> out(count);
    for (auto& x : out) x = sample_symmetric_stable(rs, beta, sigma);
    return out;
}

double sample_totally_skewed_stable(rng::RngStream& rs, double rho, double scale) {
    // Chambers-Mallows-Stuck with skewness +1 in the parametrization whose
    // characteristic function is exp(-|t|^rho (1 - i sign(t) tan(pi rho/2)));
    // mean zero for rho > 1.
    double tn = std::tan(kHalfPi * rho);
    double b0 = std::atan(tn) / rho;
    double sfac = std::pow(1.0 + tn * tn, 0.5 / rho);
    double theta = rs.uniform_open(-kHalfPi, kHalfPi);
    double w = rs.exponential();
    double x = sfac * std::sin(rho * (theta + b0)) / std::pow(std::cos(theta), 1.0 / rho) *
               std::pow(std::cos((1.0 - rho) * theta - rho * b0) / w, (1.0 - rho) / rho);
    return scale * x;
}

std::vector<double> sample_totally_skewed_stable(double rho, double scale,
                                                 std::size_t count, rng::RngStream& rs) {
    require(rho > 1.0 && rho < 2.0, "sample_totally_skewed_stable: rho must lie in (1,2)");
    require(scale > 0.0, "sample_totally_skewed_stable: scale must be positive");
    std::vector<double> out(count);
    for (auto& x : out) x = sample_totally_skewed_stable(rs, rho, scale);
    return out;
}

double stable_levy_amplitude(double beta, double sigma) {
    require(beta > 0.0 && beta < 2.0, "stable_levy_amplitude: beta must lie in (0,2)");
    require(sigma > 0.0, "stable_levy_amplitude: sigma must be positive");
    if (beta == 1.0) return sigma / kPi;
    // sigma^beta |u|^beta = int (1-cos(ux)) C |x|^{-1-beta} dx fixes
    // C = sigma^beta beta / (2 Gamma(1-beta) cos(pi beta/2)); both factors flip
    // sign together at beta = 1, so C stays positive.
    return std::pow(sigma, beta) * beta /
           (2.0 * std::tgamma(1.0 - beta) * std::cos(kHalfPi * beta));
}

namespace {

// One increment of the truncated-stable driver over length `mesh`: exact
// compound Poisson above the split point, variance-matched Gaussian below it.
double truncated_stable_increment(const LevySpec& spec, double mesh,
                                  rng::RngStream& rs) {
    double a = spec.cutoff;
    double eps = spec.cutoff * spec.small_jump_fraction;
    double c = stable_levy_amplitude(spec.beta, spec.sigma);
    double beta = spec.beta;

    // Jump intensity of sizes in (eps, a]: 2C int_eps^a x^{-1-beta} dx.
    double lam = 2.0 * c * (std::pow(eps, -beta) - std::pow(a, -beta)) / beta;
    double sum = 0.0;
    std::uint64_t npois = rs.poisson(lam * mesh);
    double elo = std::pow(eps, -beta);
    double ehi = std::pow(a, -beta);
    for (std::uint64_t j = 0; j < npois; ++j) {
        // Inverse transform for density ~ x^{-1-beta} on (eps, a].
        double u = rs.uniform01();
        double size = std::pow(elo - u * (elo - ehi), -1.0 / beta);
        sum += (rs.next_u64() & 1ULL) ? size : -size;
    }

    double var_small = mesh * 2.0 * c * std::pow(eps, 2.0 - beta) / (2.0 - beta);
    return sum + std::sqrt(var_small) * rs.normal();
}

} // namespace

std::vector<double> sample_levy_increments(const LevySpec& spec, double mesh,
                                           std::size_t count, rng::RngStream& rs) {
    spec.validate();
    require(mesh > 0.0, "sample_levy_increments: mesh must be positive");
    std::vector<double> out(count);
    switch (spec.kind) {
        case DriverKind::symmetric_stable: {
            double scale = spec.sigma * std::pow(mesh, 1.0 / spec.beta);
            for (auto& x : out) x = sample_symmetric_stable(rs, spec.beta, scale);
            return out;
        }
        case DriverKind::compound_poisson: {
            for (auto& x : out) {
                std::uint64_t npois = rs.poisson(spec.intensity * mesh);
                double sum = 0.0;
                for (std::uint64_t j = 0; j < npois; ++j) sum += spec.jumps.sample(rs);
                x = sum;
            }
            return out;
        }
        case DriverKind::tempered_stable: {
            for (auto& x : out) x = truncated_stable_increment(spec, mesh, rs);
            return out;
        }
    }
    throw std::logic_error("sample_levy_increments: unreachable");
}

std::vector<Jump> sample_compound_poisson_jumps(double lambda, const JumpLaw& law,
                                                double a, double b,
                                                rng::RngStream& rs) {
    require(a < b, "sample_compound_poisson_jumps: window must be non-empty");
    require(lambda >= 0.0, "sample_compound_poisson_jumps: intensity must be nonnegative");
    law.validate();
    std::uint64_t n = rs.poisson(lambda * (b - a));
    std::vector<Jump> jumps(n);
    for (auto& j : jumps) {
        j.time = a + (b - a) * rs.uniform01();
        j.size = law.sample(rs);
    }
    std::sort(jumps.begin(), jumps.end(),
              [](const Jump& x, const Jump& y) { return x.time < y.time; });
    return jumps;
}

std::vector<Jump> sample_jumps(const LevySpec& spec, double a, double b,
                               rng::RngStream& rs) {
    spec.validate();
    require(a < b, "sample_jumps: window must be non-empty");
    switch (spec.kind) {
        case DriverKind::compound_poisson:
            return sample_compound_poisson_jumps(spec.intensity, spec.jumps, a, b, rs);
        case DriverKind::tempered_stable: {
            double eps = spec.cutoff * spec.small_jump_fraction;
            double c = stable_levy_amplitude(spec.beta, spec.sigma);
            double beta = spec.beta;
            double elo = std::pow(eps, -beta);
            double ehi = std::pow(spec.cutoff, -beta);
            double lam = 2.0 * c * (elo - ehi) / beta;
            std::uint64_t n = rs.poisson(lam * (b - a));
            std::vector<Jump> jumps(n);
            for (auto& j : jumps) {
                j.time = a + (b - a) * rs.uniform01();
                double u = rs.uniform01();
                double size = std::pow(elo - u * (elo - ehi), -1.0 / beta);
                j.size = (rs.next_u64() & 1ULL) ? size : -size;
            }
            std::sort(jumps.begin(), jumps.end(),
                      [](const Jump& x, const Jump& y) { return x.time < y.time; });
            return jumps;
        }
        case DriverKind::symmetric_stable:
            throw std::invalid_argument(
                "sample_jumps: stable drivers have infinite jump activity; "
                "jump enumeration needs a finite-activity driver");
    }
    throw std::logic_error("sample_jumps: unreachable");
}

double truncated_stable_exponent(const LevySpec& spec, double u) {
    require(spec.kind == DriverKind::tempered_stable,
            "truncated_stable_exponent: spec must be a truncated-stable driver");
    spec.validate();
    double au = std::fabs(u);
    if (au == 0.0) return 0.0;
    double c = stable_levy_amplitude(spec.beta, spec.sigma);
    double beta = spec.beta;
    // psi(u) = -2C int_0^cutoff (1 - cos(u x)) x^{-1-beta} dx. The integrand is
    // ~ u^2 x^{1-beta} / 2 near zero; split there and at the first oscillation
    // scale.
    auto f = [au, beta](double x) {
        double y = au * x;
        double one_minus_cos = (y < 1e-4) ? 0.5 * y * y * (1.0 - y * y / 12.0)
                                          : 1.0 - std::cos(y);
        return one_minus_cos * std::pow(x, -1.0 - beta);
    };
    // [0, delta] exactly by the cosine series (the x^{beta-1}-type singularity
    // defeats bisection budgets); u delta <= pi/2 keeps it fast.
    double delta = std::min(spec.cutoff, 0.5 * kPi / au);
    double integral = 0.0;
    {
        double term_base = 1.0;  // (u delta)^{2m} / (2m)! accumulated iteratively
        double ud2 = au * delta * au * delta;
        double sign = 1.0;
        double head = 0.0;
        for (int m = 1; m <= 24; ++m) {
            term_base *= ud2 / ((2.0 * m) * (2.0 * m - 1.0));
            double term = sign * term_base / (2.0 * m - beta);
            head += term;
            if (std::fabs(term) < 1e-18 * std::fabs(head)) break;
            sign = -sign;
        }
        integral += head * std::pow(delta, -beta);
    }
    if (delta < spec.cutoff) {
        std::vector<double> pts{delta};
        double osc = kPi / au;
        for (double t = osc; t < spec.cutoff; t += osc) {
            if (t > delta) pts.push_back(t);
            if (pts.size() > 4000) break;
        }
        pts.push_back(spec.cutoff);
        std::sort(pts.begin(), pts.end());
        pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
        integral += quad::integrate_segments(f, pts, 1e-10);
    }
    return -2.0 * c * integral;
}

} // namespace levyma::levy
