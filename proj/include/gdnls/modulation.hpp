#pragma once

#include <array>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "gdnls/critical.hpp"
#include "gdnls/errors.hpp"
#include "gdnls/numerics.hpp"
#include "gdnls/soliton.hpp"

namespace gdnls {

/// u = e^{i theta} (phi_{w + lambda mu, c + lambda nu} + eps)(. - y).
struct ModulationState {
  double theta = 0.0;  // in (-pi, pi]
  double y = 0.0;
  double lambda = 0.0;
  Field eps;
  std::array<double, 3> residuals{};  // <eps, i phi_l>, <eps, phi_l'>, <eps, J'(phi_l)>
  std::array<double, 3> scales{};     // ||u|| times the norm of each test field
  bool converged = false;
  int iterations = 0;

  double eps_h1() const { return eps.size() ? h1_norm(eps) : 0.0; }
  double max_scaled_residual() const;
};

class NewtonDiverged : public Error {
 public:
  NewtonDiverged(const std::string& what, ModulationState best)
      : Error(what), best_(std::move(best)) {}
  const ModulationState& best() const { return best_; }

 private:
  ModulationState best_;
};

struct ModulationOptions {
  int max_iterations = 25;
  double residual_tol = 1e-9;  // relative to ModulationState::scales
  double tube_fraction = 0.1;  // refuse when orbit distance > this * ||phi||_{H1}
  double lambda_step = 1e-4;   // central-difference step for lambda derivatives
};

/// The base soliton and null direction the decomposition is taken against.
struct ModulationFrame {
  SolitonParams params;
  double mu = 0.0;
  double nu = 1.0;

  SolitonParams shifted(double lambda) const {
    return {params.sigma, params.omega + lambda * mu, params.c + lambda * nu};
  }
};

/// Newton solve of the three orthogonality conditions in (theta, y, lambda).
/// Without a guess, (theta, y) come from orbit_distance and lambda = 0.
/// Throws OutsideTube or NewtonDiverged.
ModulationState decompose(const Field& u, const ModulationFrame& frame,
                          const std::optional<ModulationState>& guess = std::nullopt,
                          const ModulationOptions& opt = {});

/// d(F1, F2, F3)/d(theta, y, lambda) at the given state.
Eigen::Matrix3d modulation_jacobian(const Field& u, const ModulationFrame& frame,
                                    double theta, double y, double lambda,
                                    double lambda_step = 1e-4);

/// C_{w,c} = -<i psi, -a0 phi + i phi_x> / (2 (a0^2 - w) M(phi)).
double modulation_constant(const ModulationFrame& frame, const GridPtr& grid);

struct TrackedState {
  double t = 0.0;
  double theta = 0.0;  // unwrapped
  double y = 0.0;      // unwrapped across the periodic box
  double lambda = 0.0;
  double eps_h1 = 0.0;
  double orbit_dist = 0.0;
  double max_residual = 0.0;
  // finite-difference rates, filled by ModulationTracker::rates()
  double theta_dot = 0.0;
  double y_dot = 0.0;
  double lambda_dot = 0.0;
};

/// Warm-started decompositions along a trajectory. The first OutsideTube
/// ends tracking; that exit is a result, not an error.
class ModulationTracker {
 public:
  ModulationTracker(ModulationFrame frame, ModulationOptions opt = {});

  /// Returns false once the solution has left the tube. Propagates
  /// NewtonDiverged.
  bool push(double t, const Field& u);

  bool exited() const { return exited_; }
  double exit_time() const { return exit_time_; }
  double exit_distance() const { return exit_distance_; }
  const std::vector<TrackedState>& states() const { return states_; }
  const ModulationState& last() const { return last_; }

  /// Fills theta_dot, y_dot, lambda_dot by central differences (one-sided at
  /// the ends).
  const std::vector<TrackedState>& rates();

 private:
  ModulationFrame frame_;
  ModulationOptions opt_;
  std::vector<TrackedState> states_;
  ModulationState last_;
  bool have_last_ = false;
  bool exited_ = false;
  double exit_time_ = 0.0;
  double exit_distance_ = 0.0;
};

}  // namespace gdnls
