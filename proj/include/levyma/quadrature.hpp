#pragma once

#include <functional>
#include <vector>

namespace levyma::quad {

using Fn = std::function<double(double)>;

// One Gauss-Kronrod 7/15 panel on [a, b]. Returns the Kronrod value and
// writes |K15 - G7| into err.
double gk15(const Fn& f, double a, double b, double& err);

// Adaptive bisection until the panel error estimates sum below abs_tol.
double adaptive(const Fn& f, double a, double b, double abs_tol, int max_depth = 48);

// Integrate over [pts.front(), pts.back()] splitting at every interior point
// (kinks, singular endpoints), then refine each piece adaptively. rel_tol is
// relative to the accumulated integral of |f|-scale estimate.
double integrate_segments(const Fn& f, const std::vector<double>& pts, double rel_tol);

// Integral over [a, infinity) for integrands decaying fast enough that
// geometric segments [a g^j, a g^{j+1}] eventually contribute nothing.
// Stops when consecutive segments fall below rel_tol * |accumulated|.
double geometric_tail(const Fn& f, double a, double growth, double rel_tol,
                      int max_segments = 400);

} // namespace levyma::quad
