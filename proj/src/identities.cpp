#include "gdnls/identities.hpp"

#include <algorithm>
#include <cmath>

#include "gdnls/conserved.hpp"
#include "gdnls/critical.hpp"
#include "gdnls/linop.hpp"

namespace gdnls {

bool all_pass(const std::vector<IdentityCheck>& checks) {
  return std::all_of(checks.begin(), checks.end(), [](const IdentityCheck& c) { return c.pass(); });
}

double relative_error(double a, double b) {
  const double d = std::abs(a - b);
  return b == 0.0 ? d : d / std::abs(b);
}

std::vector<IdentityCheck> soliton_identities(const SolitonParams& p, const GridPtr& grid) {
  p.validate();
  const Field phi = soliton_field(p, grid);
  const Field dphi = spectral_derivative(phi, 1);
  const ConservedSet q = conserved_set(phi, p.sigma);
  const double s = p.sigma;
  const MassMomentum mp = closed_form_MP(p);
  return {
      {"residual", elliptic_residual(phi, p), 1e-8},
      {"w", relative_error(inner(dphi, dphi), p.omega * inner(phi, phi)), 1e-8},
      {"J", relative_error(q.J, 4 * p.omega * q.M + 2 * p.c * q.P), 1e-8},
      {"JPE", relative_error((s - 1) / (s + 1) * q.J, 2 * p.c * q.P + 4 * q.E), 1e-8},
      {"xphi", relative_error(lp_power_norm(phi, s), 4 * (s + 1) * (0.5 * p.c * q.M + q.P)), 1e-8},
      {"M_closed", relative_error(mp.M, q.M), 1e-8},
      {"P_closed", relative_error(mp.P, q.P), 1e-8},
  };
}

std::vector<IdentityCheck> derivative_relations(const SolitonParams& p) {
  p.validate();
  const MPDerivatives d = mp_derivatives(p);
  return {
      {"dM_dc=dP_dw", relative_error(d.M_c, d.P_w), 1e-6},
      {"dP_dc=w_dM_dw", relative_error(d.P_c, p.omega * d.M_w), 1e-6},
  };
}

std::vector<IdentityCheck> operator_identities(const SolitonParams& p, const GridPtr& grid) {
  p.validate();
  const Complex I(0.0, 1.0);
  const double s = p.sigma;
  const Field phi = soliton_field(p, grid);
  const Field dphi = spectral_derivative(phi, 1);
  const Eigen::ArrayXcd w = abs_pow(phi.values(), 2 * s).array().cast<Complex>();
  const Field lhs1 = apply_S_double_prime(phi, phi, p);
  const Field rhs1(grid, ((-2.0 * s * I) * w * dphi.values().array()).matrix());
  const Field lhs2 = apply_S_double_prime(I * dphi, phi, p);
  const Field rhs2(grid, ((-2.0 * s * p.omega) * w * phi.values().array()).matrix());
  const Field jp = apply_J_prime(phi, s);
  return {
      {"S''phi", l2_norm(lhs1 - rhs1), 1e-7},
      {"S''(i phi_x)", l2_norm(lhs2 - rhs2), 1e-7},
      {"J'", l2_norm(jp + ((s + 1) / s) * lhs1), 1e-7},
  };
}

std::vector<SolitonParams> parameter_sweep() {
  std::vector<SolitonParams> out;
  for (double s : {1.2, 1.5, 1.8})
    for (double w : {0.5, 1.0, 2.0})
      for (double z : {-0.5, 0.0, 0.5}) out.push_back({s, w, z * 2.0 * std::sqrt(w)});
  return out;
}

}  // namespace gdnls
