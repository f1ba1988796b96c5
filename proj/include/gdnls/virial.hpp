#pragma once

#include <vector>

#include "gdnls/conserved.hpp"
#include "gdnls/critical.hpp"
#include "gdnls/modulation.hpp"
#include "gdnls/numerics.hpp"

namespace gdnls {

/// Odd C-infinity cutoff: phi_R(x) = x on |x| <= R, phi_R = +-2R for
/// |x| >= 3R, and phi_R' = 1 - h((|x| - R) / 2R) in between with h the smooth
/// step 1 / (1 + exp(1/t - 1/(1-t))). 0 <= phi_R' <= 1 and |phi_R| <= 2R.
class CutoffProfile {
 public:
  explicit CutoffProfile(double R);

  double R() const { return R_; }
  double value(double x) const;
  double d1(double x) const;
  double d3(double x) const;
  /// Distance from the center past which phi_R is constant.
  double support() const { return 3.0 * R_; }

 private:
  double R_;
};

/// phi_R(x_j - center) and its derivatives, with x_j - center wrapped into
/// the box.
struct CutoffSamples {
  double R = 0.0;
  double center = 0.0;
  RealVector phi, d1, d3;
};

/// Throws CutoffTooLarge unless 3R <= 0.9 L.
CutoffSamples sample_cutoff(const CutoffProfile& cut, const Grid& grid, double center);

/// int phi_R(x - y) |u|^2 and int phi_R(x - y) Im(u conj(u_x)).
double I1(const Field& u, const CutoffSamples& cut);
double I2(const Field& u, const CutoffSamples& cut);
double I1(const Field& u, double y, const CutoffProfile& cut);
double I2(const Field& u, double y, const CutoffProfile& cut);

/// C~ = 2 C_{w,c} (M(phi) + P(phi)) for the frame's base soliton.
double virial_lambda_coefficient(const ModulationFrame& frame, const GridPtr& grid);

/// -sqrt(w) I1 + I2 + C~ lambda with the cutoff centered at state.y.
double I_composite(const Field& u, const ModulationState& state, double omega,
                   double C_tilde, const CutoffProfile& cut);

/// The bound 2R (||u||^2 + ||u|| ||u_x||) + |C~| |lambda| on |I|.
double I_bound(const Field& u, double lambda, double C_tilde, const CutoffProfile& cut);

/// Both sides of the fixed-center rate identities at one instant.
struct VirialRateSample {
  double t = 0.0;
  double I1 = 0.0;    // int phi |u|^2
  double I2 = 0.0;    // int phi Im(u conj(u_x))
  double rhs1 = 0.0;  // -2 int phi' Im(u conj(u_x)) + int phi' |u|^{2s+2} / (s+1)
  double rhs2 = 0.0;  // -2 int phi' |u_x|^2 + 1/2 int phi''' |u|^2 + int phi' |u|^{2s} Im(u conj(u_x))
};

/// `nonlinear = false` drops the |u|^{2 sigma} terms (linear Schrodinger).
VirialRateSample virial_rate_sample(double t, const Field& u, const CutoffSamples& cut,
                                    double sigma, bool nonlinear = true);

struct VirialRateReport {
  double max_mismatch = 0.0;  // max of the two below
  double mismatch1 = 0.0;     // max |FD dI1/dt - rhs1| / max |rhs1|
  double mismatch2 = 0.0;
  double spacing = 0.0;       // largest record spacing
  int compared = 0;           // interior records
};

/// Central differences of I1, I2 against the right-hand sides. Throws
/// InsufficientSampling if fewer than 3 samples or a spacing exceeds 1e-2.
VirialRateReport virial_rate_check(const std::vector<VirialRateSample>& samples);

/// A(u0) = (2c sqrt(w) + 4w)(M(u0) - M(phi)) + (4 sqrt(w) - 2c)(P(u0) - P(phi))
///         - 4 (S(u0) - S(phi)).
double A_functional(const Field& u0, const SolitonParams& p, const ConservedSet& phi_conserved);

/// 2c sqrt(w)(M(u0) - M(phi)) + (4 sqrt(w) - 2c)(P(u0) - P(phi)) - 4 (E(u0) - E(phi)),
/// the constant that the virial identities produce in I'(t). Rewritten through
/// S it reads (2c sqrt(w) + 4w) dM + (4 sqrt(w) + 2c) dP - 4 dS, which differs
/// from A_functional in the sign of 2c dP.
double A_functional_energy(const Field& u0, const SolitonParams& p,
                           const ConservedSet& phi_conserved);

struct RateSample {
  double t = 0.0;
  double I = 0.0;
  double lambda = 0.0;
  double eps_h1 = 0.0;
};

struct RateDecompositionReport {
  int compared = 0;             // interior records
  bool increasing = false;      // I strictly increasing over all records
  double frac_quarter = 0.0;    // fraction with I' >= b2 delta1 / 4
  double frac_lower = 0.0;      // fraction with I' >= b2 delta1 / 4 + b1 lambda^2 / 2
  double min_rate = 0.0;
  double max_residual = 0.0;    // max |I' - A - b1 lambda^2|
  // least-squares fit |I' - A - b1 lambda^2| ~ c_le lambda eps + c_ee eps^2 + c_R / R
  double c_le = 0.0, c_ee = 0.0, c_R = 0.0;
};

RateDecompositionReport rate_decomposition_check(const std::vector<RateSample>& samples,
                                                 double A, double b1, double b2, double delta1,
                                                 double R);

}  // namespace gdnls
