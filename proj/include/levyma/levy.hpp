#pragma once

#include <cstddef>
#include <vector>

#include "levyma/rng.hpp"

namespace levyma::levy {

enum class DriverKind { symmetric_stable, compound_poisson, tempered_stable };

enum class JumpKind { unit_symmetric, gaussian, pareto_symmetric };

// Symmetric jump-size law for the finite-activity drivers.
struct JumpLaw {
    JumpKind kind = JumpKind::unit_symmetric;
    double scale = 1.0;  // gaussian: std deviation; pareto: minimum jump size
    double index = 2.5;  // pareto: tail index

    double sample(rng::RngStream& rs) const;
    void validate() const;
};

// Driving-noise description. Exactly one of the three kinds is active;
// factory functions set the relevant fields.
struct LevySpec {
    DriverKind kind = DriverKind::symmetric_stable;

    // symmetric_stable and tempered_stable
    double beta = 1.5;
    double sigma = 1.0;

    // compound_poisson
    double intensity = 1.0;
    JumpLaw jumps;

    // tempered_stable: jump sizes hard-truncated at |x| <= cutoff; the
    // sub-threshold split point for simulation is cutoff * small_jump_fraction.
    double cutoff = 1.0;
    double small_jump_fraction = 0.01;

    static LevySpec symmetric_stable_spec(double beta, double sigma);
    static LevySpec compound_poisson_spec(double intensity, JumpLaw law);
    static LevySpec tempered_stable_spec(double beta, double sigma, double cutoff);

    // Blumenthal-Getoor index: beta for (truncated) stable, 0 for compound
    // Poisson.
    double activity_index() const;

    void validate() const;
};

// One draw with characteristic function exp(-sigma^beta |u|^beta).
// Chambers-Mallows-Stuck transform; beta = 1 uses the Cauchy branch.
double sample_symmetric_stable(rng::RngStream& rs, double beta, double sigma);
std::vector<double> sample_symmetric_stable(double beta, double sigma,
                                            std::size_t count, rng::RngStream& rs);

// Totally right-skewed rho-stable with mean zero, rho in (1,2):
// characteristic function exp(-scale^rho |t|^rho (1 - i sign(t) tan(pi rho/2))).
double sample_totally_skewed_stable(rng::RngStream& rs, double rho, double scale);
std::vector<double> sample_totally_skewed_stable(double rho, double scale,
                                                 std::size_t count, rng::RngStream& rs);

// i.i.d. increments of the driving process over intervals of length mesh.
std::vector<double> sample_levy_increments(const LevySpec& spec, double mesh,
                                           std::size_t count, rng::RngStream& rs);

struct Jump {
    double time;
    double size;
};

// Poisson(lambda) jump times on [a, b] with i.i.d. symmetric sizes, sorted by
// time. Exact; no discretization.
std::vector<Jump> sample_compound_poisson_jumps(double lambda, const JumpLaw& law,
                                                double a, double b,
                                                rng::RngStream& rs);

// Jump enumeration for finite-activity drivers: compound Poisson exactly;
// truncated stable lists jumps above its internal split point. Infinite
// activity below the split cannot be enumerated and is not included.
std::vector<Jump> sample_jumps(const LevySpec& spec, double a, double b,
                               rng::RngStream& rs);

// Levy-density amplitude C of the (truncated) stable family:
// nu(dx) = C |x|^{-1-beta} dx near 0, calibrated so that an untruncated
// process has scale sigma.
double stable_levy_amplitude(double beta, double sigma);

// Characteristic exponent psi(u) of the truncated-stable spec,
// psi(u) = int (cos(ux) - 1) nu(dx), by quadrature. E exp(iu L_t) = exp(t psi(u)).
double truncated_stable_exponent(const LevySpec& spec, double u);

} // namespace levyma::levy
