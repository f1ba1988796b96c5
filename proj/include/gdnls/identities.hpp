#pragma once

#include <string>
#include <vector>

#include "gdnls/numerics.hpp"
#include "gdnls/soliton.hpp"

namespace gdnls {

/// One named numerical identity: `error` is compared against `tol`.
struct IdentityCheck {
  std::string name;
  double error = 0.0;
  double tol = 0.0;
  bool pass() const { return error <= tol; }
};

bool all_pass(const std::vector<IdentityCheck>& checks);

/// |a - b| / |b| (absolute when b = 0).
double relative_error(double a, double b);

/// Soliton identities on a grid:
///   residual  ||S'(phi)||_{L2}                    (absolute, 1e-8)
///   w         ||phi_x||^2 = w ||phi||^2
///   J         J = 4 w M + 2 c P
///   JPE       (s-1)/(s+1) J = 2 c P + 4 E
///   xphi      int |phi|^{2s+2} = 4 (s+1) (c M / 2 + P)
///   M_closed, P_closed   alpha-integral forms against grid quadrature
/// all relative at 1e-8.
std::vector<IdentityCheck> soliton_identities(const SolitonParams& p, const GridPtr& grid);

/// dM/dc = dP/dw and dP/dc = w dM/dw, relative at 1e-6.
std::vector<IdentityCheck> derivative_relations(const SolitonParams& p);

/// S''(phi) phi = -2 s i |phi|^{2s} phi_x, S''(phi)(i phi_x) = -2 s w |phi|^{2s} phi
/// and J'(phi) = -((s+1)/s) S''(phi) phi, all in L2 at 1e-7.
std::vector<IdentityCheck> operator_identities(const SolitonParams& p, const GridPtr& grid);

/// The 3 x 3 x 3 parameter sweep sigma in {1.2, 1.5, 1.8}, w in {0.5, 1, 2},
/// c / (2 sqrt(w)) in {-0.5, 0, 0.5}.
std::vector<SolitonParams> parameter_sweep();

}  // namespace gdnls
