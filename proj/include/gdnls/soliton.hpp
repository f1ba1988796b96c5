#pragma once

#include "gdnls/numerics.hpp"

namespace gdnls {

/// (sigma, omega, c) for the solitary wave family. Requires c^2 < 4 omega,
/// omega > 0 and 0 < sigma < 2.
struct SolitonParams {
  double sigma = 1.5;
  double omega = 1.0;
  double c = 0.5;

  /// Throws DomainViolation naming the violated inequality.
  void validate() const;

  double kappa() const;  // sqrt(4 omega - c^2)
  double a0() const;     // (sigma - 1) sqrt(omega)
};

/// Real amplitude varphi(x) > 0.
double amplitude(const SolitonParams& p, double x);

/// varphi(x)^{2 sigma}, evaluated in log form so large |x| cannot overflow.
double amplitude_power(const SolitonParams& p, double x);

/// Closed-form int_{-inf}^x varphi^{2 sigma}.
double amplitude_power_integral(const SolitonParams& p, double x);

/// Theta(x) = (c/2) x - int_{-inf}^x varphi^{2 sigma} / (2 sigma + 2).
double phase(const SolitonParams& p, double x);

/// Grid with L from the soliton tail rule (kappa L / 2 >= 36).
GridPtr soliton_grid(const SolitonParams& p, Eigen::Index n);

/// varphi(x_j) exp(i Theta(x_j)). The phase integral is a spectral
/// antiderivative anchored to vanish at the left grid edge.
/// Throws TruncationTooSmall if |phi| > 1e-12 at the box edge.
Field soliton_field(const SolitonParams& p, const GridPtr& grid);

/// || -phi'' + omega phi + i c phi' - i |phi|^{2 sigma} phi' ||_{L2} for any field.
double elliptic_residual(const Field& phi, const SolitonParams& p);
double elliptic_residual(const SolitonParams& p, const GridPtr& grid);

/// -a0 phi + i phi_x.
Field instability_direction(const Field& phi, const SolitonParams& p);

/// phi + delta1 (-a0 phi + i phi_x).
Field perturbation_direction(const SolitonParams& p, const GridPtr& grid, double delta1);

}  // namespace gdnls
