#pragma once

#include <array>

#include <Eigen/Dense>

#include "gdnls/numerics.hpp"
#include "gdnls/soliton.hpp"

namespace gdnls {

/// Quadrature tolerance for every threshold and appendix integral.
inline constexpr double kCriticalQuadTol = 1e-13;

/// (sigma - 1)^2 [int_0^inf (cosh y - z)^{-1/sigma}]^2
///   - [int_0^inf (cosh y - z)^{-1/sigma - 1} (z cosh y - 1)]^2.
/// Defined for sigma > 0 and |z| < 1.
double F_sigma(double sigma, double z);

/// The root of F_sigma on (-1, 1), located by a 1000-point sign scan and
/// TOMS 748 refinement. Throws NoSignChange or RootNotUnique.
double find_z0(double sigma);

struct AppendixScalars {
  double kappa = 0.0;
  double kappa_tilde = 0.0;
  double f = 0.0;
  std::array<double, 3> alpha{};  // alpha_0, alpha_1, alpha_2
};

AppendixScalars appendix_scalars(const SolitonParams& p);

struct MassMomentum {
  double M = 0.0;
  double P = 0.0;
};

/// M and P of the soliton from the alpha integrals.
MassMomentum closed_form_MP(const SolitonParams& p);

struct MPDerivatives {
  double M_w = 0.0, M_c = 0.0, P_w = 0.0, P_c = 0.0;
  double M_w_err = 0.0, M_c_err = 0.0, P_w_err = 0.0, P_c_err = 0.0;
};

/// First (omega, c)-derivatives of the closed-form M and P.
MPDerivatives mp_derivatives(const SolitonParams& p, double step = 0.0);

/// [[dM/dw, dP/dw], [dM/dc, dP/dc]], symmetrized after checking
/// |dM/dc - dP/dw| <= 1e-6 scale (SymmetryViolation otherwise).
Eigen::Matrix2d hessian_d2(const SolitonParams& p);

struct EigenDirection {
  double mu = 0.0;
  double nu = 1.0;
  Eigen::Vector2d residual = Eigen::Vector2d::Zero();  // d'' (mu, nu)^T
  Eigen::Vector2d residual_transposed = Eigen::Vector2d::Zero();
};

/// Null direction of d'' normalized to nu = 1. Throws NotDegenerate when the
/// singular value ratio of d'' exceeds `degeneracy_tol`.
EigenDirection eigen_direction(const SolitonParams& p, double degeneracy_tol = 1e-4);

/// d/dlambda of phi_{w + lambda mu, c + lambda nu} at lambda = 0 (central
/// differences, one Richardson level).
Field psi_field(const SolitonParams& p, const EigenDirection& dir, const GridPtr& grid,
                double step = 1e-3);

struct CriticalData {
  double sigma = 0.0;
  double omega = 0.0;
  double z0 = 0.0;
  double c_crit = 0.0;
  double a0 = 0.0;
  double mu = 0.0;
  double nu = 1.0;
  double M = 0.0;
  double P = 0.0;
  double d2M = 0.0;  // second lambda-derivative of M along (mu, nu)
  double d2P = 0.0;
  double kappa0_from_M = 0.0;
  double kappa0_from_P = 0.0;
  double kappa0 = 0.0;
  double b1 = 0.0;
  double b2 = 0.0;

  SolitonParams params() const { return {sigma, omega, c_crit}; }
};

/// Full critical-frequency data at (sigma, omega). Throws Kappa0Mismatch if
/// the two kappa0 extractions differ by more than 1e-2 relative.
CriticalData critical_constants(double sigma, double omega);

}  // namespace gdnls
