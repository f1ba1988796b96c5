#pragma once

#include "gdnls/numerics.hpp"
#include "gdnls/soliton.hpp"

namespace gdnls {

struct ConservedSet {
  double M = 0.0;  // 1/2 ||u||^2
  double P = 0.0;  // 1/2 Im int u conj(u_x)
  double E = 0.0;  // 1/2 ||u_x||^2 - J / (2 sigma + 2)
  double J = 0.0;  // Im int |u|^{2 sigma} u conj(u_x)
};

ConservedSet conserved_set(const Field& u, double sigma);

/// S_{w,c}(u) = E + omega M + c P.
double action(const Field& u, const SolitonParams& p);

/// mu M(u) + nu P(u).
double q_functional(const Field& u, double mu, double nu);

/// int |u|^{2 sigma + 2}.
double lp_power_norm(const Field& u, double sigma);

struct OrbitFit {
  double dist = 0.0;
  double theta = 0.0;  // in (-pi, pi]
  double y = 0.0;      // in [-L, L)
};

/// min over (theta, y) of ||u - e^{i theta} phi(. - y)||_{H1}.
///
/// y is located on the grid by an H1-weighted cross-correlation, then refined
/// by golden section over one cell each side; theta is the argument of the
/// H1 pairing at each trial y.
OrbitFit orbit_distance(const Field& u, const Field& phi);
OrbitFit orbit_distance(const Field& u, const SolitonParams& p);

}  // namespace gdnls
