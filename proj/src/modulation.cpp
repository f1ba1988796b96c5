#include "gdnls/modulation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "gdnls/conserved.hpp"
#include "gdnls/linop.hpp"

namespace gdnls {

double ModulationState::max_scaled_residual() const {
  double r = 0.0;
  for (int i = 0; i < 3; ++i) r = std::max(r, std::abs(residuals[i]) / scales[i]);
  return r;
}

namespace {

double wrap_angle(double a) { return std::remainder(a, 2.0 * M_PI); }

// e^{-i theta} u(. + y)
Field pull_back(const Field& u, double theta, double y) {
  return spectral_shift(u, -y) * std::polar(1.0, -theta);
}

std::array<Field, 3> test_fields(const Field& phi, double sigma) {
  return {Complex(0.0, 1.0) * phi, spectral_derivative(phi, 1), apply_J_prime(phi, sigma)};
}

struct Evaluation {
  ModulationState state;
  double merit = 0.0;  // max scaled residual
};

Evaluation evaluate(const Field& u, double unorm, const ModulationFrame& frame, double theta,
                    double y, double lambda) {
  const SolitonParams q = frame.shifted(lambda);
  q.validate();
  const Field phi = soliton_field(q, u.grid_ptr());
  Evaluation ev;
  ModulationState& s = ev.state;
  s.theta = wrap_angle(theta);
  s.y = u.grid().wrap(y);
  s.lambda = lambda;
  s.eps = pull_back(u, theta, y) - phi;
  const auto g = test_fields(phi, q.sigma);
  for (int i = 0; i < 3; ++i) {
    s.residuals[i] = inner(s.eps, g[i]);
    s.scales[i] = std::max(unorm * l2_norm(g[i]), std::numeric_limits<double>::min());
  }
  ev.merit = s.max_scaled_residual();
  return ev;
}

}  // namespace

Eigen::Matrix3d modulation_jacobian(const Field& u, const ModulationFrame& frame, double theta,
                                    double y, double lambda, double h) {
  const GridPtr& grid = u.grid_ptr();
  const double sigma = frame.params.sigma;
  const Field phi = soliton_field(frame.shifted(lambda), grid);
  const Field phi_p = soliton_field(frame.shifted(lambda + h), grid);
  const Field phi_m = soliton_field(frame.shifted(lambda - h), grid);
  const Field v = pull_back(u, theta, y);
  const Field eps = v - phi;
  const Field psi = (phi_p - phi_m) * Complex(0.5 / h);

  const auto g = test_fields(phi, sigma);
  const auto gp = test_fields(phi_p, sigma);
  const auto gm = test_fields(phi_m, sigma);
  const Field d_theta = Complex(0.0, -1.0) * v;
  const Field d_y = spectral_derivative(v, 1);

  Eigen::Matrix3d jac;
  for (int i = 0; i < 3; ++i) {
    const Field dg = (gp[i] - gm[i]) * Complex(0.5 / h);
    jac(i, 0) = inner(d_theta, g[i]);
    jac(i, 1) = inner(d_y, g[i]);
    jac(i, 2) = -inner(psi, g[i]) + inner(eps, dg);
  }
  return jac;
}

namespace {

ModulationState newton(const Field& u, const ModulationFrame& frame, double theta, double y,
                       double lambda, const ModulationOptions& opt) {
  const double unorm = l2_norm(u);
  Evaluation cur = evaluate(u, unorm, frame, theta, y, lambda);
  double th = theta;  // unwrapped iterates
  double yy = y;
  for (int it = 0; it <= opt.max_iterations; ++it) {
    cur.state.iterations = it;
    if (cur.merit <= opt.residual_tol) {
      cur.state.converged = true;
      return cur.state;
    }
    if (it == opt.max_iterations) break;
    const Eigen::Matrix3d jac = modulation_jacobian(u, frame, th, yy, cur.state.lambda,
                                                    opt.lambda_step);
    const Eigen::Vector3d f(cur.state.residuals[0], cur.state.residuals[1],
                            cur.state.residuals[2]);
    const Eigen::Vector3d delta = jac.colPivHouseholderQr().solve(-f);
    if (!delta.allFinite()) break;

    // backtracking on the scaled residual
    bool accepted = false;
    double t = 1.0;
    for (int k = 0; k < 12 && !accepted; ++k, t *= 0.5) {
      try {
        Evaluation trial = evaluate(u, unorm, frame, th + t * delta[0], yy + t * delta[1],
                                    cur.state.lambda + t * delta[2]);
        if (trial.merit < cur.merit || trial.merit <= opt.residual_tol) {
          th += t * delta[0];
          yy += t * delta[1];
          cur = std::move(trial);
          accepted = true;
        }
      } catch (const DomainViolation&) {
      } catch (const TruncationTooSmall&) {
      }
    }
    if (!accepted) break;
  }
  std::ostringstream msg;
  msg << "no convergence after " << cur.state.iterations << " iterations, scaled residual "
      << cur.merit;
  throw NewtonDiverged(msg.str(), cur.state);
}

void require_in_tube(const OrbitFit& fit, double phi_h1, const ModulationOptions& opt) {
  if (fit.dist > opt.tube_fraction * phi_h1) {
    std::ostringstream msg;
    msg << "orbit distance " << fit.dist << " exceeds " << opt.tube_fraction
        << " ||phi||_H1 = " << opt.tube_fraction * phi_h1;
    throw OutsideTube(msg.str());
  }
}

}  // namespace

ModulationState decompose(const Field& u, const ModulationFrame& frame,
                          const std::optional<ModulationState>& guess,
                          const ModulationOptions& opt) {
  require_finite(u, "decompose");
  frame.params.validate();
  const Field phi = soliton_field(frame.params, u.grid_ptr());
  const OrbitFit fit = orbit_distance(u, phi);
  require_in_tube(fit, h1_norm(phi), opt);
  if (guess) return newton(u, frame, guess->theta, guess->y, guess->lambda, opt);
  return newton(u, frame, fit.theta, fit.y, 0.0, opt);
}

double modulation_constant(const ModulationFrame& frame, const GridPtr& grid) {
  const SolitonParams& p = frame.params;
  EigenDirection dir;
  dir.mu = frame.mu;
  dir.nu = frame.nu;
  const Field phi = soliton_field(p, grid);
  const Field psi = psi_field(p, dir, grid);
  const double a0 = p.a0();
  const double M = 0.5 * std::pow(l2_norm(phi), 2);
  return -inner(Complex(0.0, 1.0) * psi, instability_direction(phi, p)) /
         (2.0 * (a0 * a0 - p.omega) * M);
}

ModulationTracker::ModulationTracker(ModulationFrame frame, ModulationOptions opt)
    : frame_(frame), opt_(opt) {
  frame_.params.validate();
}

bool ModulationTracker::push(double t, const Field& u) {
  if (exited_) return false;
  require_finite(u, "ModulationTracker::push");
  const Field phi = soliton_field(frame_.params, u.grid_ptr());
  const OrbitFit fit = orbit_distance(u, phi);
  if (fit.dist > opt_.tube_fraction * h1_norm(phi)) {
    exited_ = true;
    exit_time_ = t;
    exit_distance_ = fit.dist;
    return false;
  }

  const double box = 2.0 * u.grid().half_length();
  ModulationState s;
  if (have_last_) {
    // linear extrapolation from the last two records
    TrackedState pred = states_.back();
    if (states_.size() >= 2) {
      const TrackedState& a = states_[states_.size() - 2];
      const TrackedState& b = states_.back();
      const double r = (t - b.t) / (b.t - a.t);
      pred.theta = b.theta + r * (b.theta - a.theta);
      pred.y = b.y + r * (b.y - a.y);
      pred.lambda = b.lambda + r * (b.lambda - a.lambda);
    }
    try {
      s = newton(u, frame_, pred.theta, pred.y, pred.lambda, opt_);
    } catch (const NewtonDiverged&) {
      s = newton(u, frame_, fit.theta, fit.y, last_.lambda, opt_);
    }
  } else {
    s = newton(u, frame_, fit.theta, fit.y, 0.0, opt_);
  }

  TrackedState rec;
  rec.t = t;
  if (states_.empty()) {
    rec.theta = s.theta;
    rec.y = s.y;
  } else {
    const TrackedState& b = states_.back();
    rec.theta = b.theta + wrap_angle(s.theta - b.theta);
    rec.y = b.y + std::remainder(s.y - b.y, box);
  }
  rec.lambda = s.lambda;
  rec.eps_h1 = s.eps_h1();
  rec.orbit_dist = fit.dist;
  rec.max_residual = s.max_scaled_residual();
  states_.push_back(rec);
  last_ = std::move(s);
  have_last_ = true;
  return true;
}

const std::vector<TrackedState>& ModulationTracker::rates() {
  const std::size_t n = states_.size();
  if (n < 2) return states_;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i == 0 ? 0 : i - 1;
    const std::size_t hi = i + 1 == n ? n - 1 : i + 1;
    const double dt = states_[hi].t - states_[lo].t;
    states_[i].theta_dot = (states_[hi].theta - states_[lo].theta) / dt;
    states_[i].y_dot = (states_[hi].y - states_[lo].y) / dt;
    states_[i].lambda_dot = (states_[hi].lambda - states_[lo].lambda) / dt;
  }
  return states_;
}

}  // namespace gdnls
