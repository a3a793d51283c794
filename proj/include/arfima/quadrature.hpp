#pragma once

#include <functional>

namespace arfima {

struct QuadratureOptions {
  double tol = 1e-10;
  int max_depth = 18;
  /// Compare against a run at tol/2 and fail if they differ by more than 10*tol (relative).
  bool richardson_check = false;
};

/// Adaptive Gauss-Kronrod on [a,b].
double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureOptions& opts = {});

/**
 * Integral over (0, pi] of an integrand behaving like lambda^{-e} near 0 (e < 1).
 *
 * The range is split at 1e-3. On the left piece lambda = 1e-3 * u^{1/(1-e')} with
 * e' = max(1/2, (1+e)/2) removes the power singularity and tames extra log factors.
 * The right piece is adaptive. Throws
 * QuadratureFailure on non-finite results.
 */
double integrate_singular(const std::function<double(double)>& f, double e,
                          const QuadratureOptions& opts = {});

/// Same as integrate_singular, with the right piece cut into panels of width
/// about pi/(freq+1) for integrands oscillating like cos(freq * lambda).
double integrate_singular_oscillatory(const std::function<double(double)>& f, double e,
                                      double freq, const QuadratureOptions& opts = {});

}  // namespace arfima
