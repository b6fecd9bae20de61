#pragma once

#include <functional>

namespace mfns {

/// Adaptive Gauss-Legendre quadrature of f over [a, b] (a > b allowed, the
/// usual orientation sign applies). Subdivides until the 15-point rule on an
/// interval matches the sum over its halves within the requested tolerances.
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double rel_tol = 1e-13, double abs_tol = 1e-15);

}  // namespace mfns
