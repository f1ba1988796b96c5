#pragma once

#include <functional>

namespace gdnls {

struct QuadratureResult {
  double value = 0.0;
  double est_error = 0.0;
  int evaluations = 0;
};

/// Adaptive Gauss-Kronrod (7/15) bisection on [a, b]. The effective tolerance
/// is max(tol, 50 eps |value|).
/// Throws NoConvergence when max_subdivisions is exhausted.
QuadratureResult adaptive_integral(const std::function<double(double)>& integrand, double a,
                                   double b, double tol, int max_subdivisions = 2000);

/// int_0^inf integrand(y) dy for integrands with at least exponential decay.
///
/// The upper limit is pushed out (doubling) until the integrand stays below
/// tol * 1e-3; the remaining tail is bounded by fitting the decay rate over
/// the last doubling and added to est_error.
QuadratureResult improper_integral(const std::function<double(double)>& integrand, double tol,
                                   int max_subdivisions = 2000);

enum class ParamDerivative { Omega, C, OmegaOmega, OmegaC, CC };

struct DerivativeEstimate {
  double value = 0.0;
  double est_error = 0.0;
};

/// Central difference in (omega, c) with one Richardson level.
///
/// `step` <= 0 picks the default: 1e-3 * max(1, |omega|) for first
/// derivatives, 1e-2 for second derivatives. Throws DomainViolation if a
/// stencil point leaves c^2 < 4 omega.
DerivativeEstimate parameter_derivative(const std::function<double(double, double)>& g,
                                        double omega, double c, ParamDerivative which,
                                        double step = 0.0);

}  // namespace gdnls
