#include "gdnls/soliton.hpp"

#include <cmath>
#include <sstream>

namespace gdnls {

void SolitonParams::validate() const {
  std::ostringstream msg;
  if (!std::isfinite(sigma) || !std::isfinite(omega) || !std::isfinite(c)) {
    msg << "soliton parameters must be finite";
    throw DomainViolation(msg.str());
  }
  if (!(sigma > 0.0 && sigma < 2.0)) {
    msg << "sigma must lie in (0, 2), got " << sigma;
    throw DomainViolation(msg.str());
  }
  if (!(omega > 0.0)) {
    msg << "omega must be positive, got " << omega;
    throw DomainViolation(msg.str());
  }
  if (!(c * c < 4.0 * omega)) {
    msg << "the family requires c^2 < 4 omega, got c = " << c << ", omega = " << omega;
    throw DomainViolation(msg.str());
  }
}

double SolitonParams::kappa() const { return std::sqrt(4.0 * omega - c * c); }

double SolitonParams::a0() const { return (sigma - 1.0) * std::sqrt(omega); }

double amplitude_power(const SolitonParams& p, double x) {
  p.validate();
  const double kappa = p.kappa();
  const double sw = std::sqrt(p.omega);
  const double y = std::abs(p.sigma * kappa * x);
  const double num = (p.sigma + 1.0) * kappa * kappa;
  if (y < 30.0) return num / (2.0 * sw * std::cosh(y) - p.c);
  // 2 sqrt(w) cosh y - c = sqrt(w) e^y (1 + e^{-2y} - (c/sqrt(w)) e^{-y})
  const double e = std::exp(-y);
  const double log_den = std::log(sw) + y + std::log1p(e * e - (p.c / sw) * e);
  return std::exp(std::log(num) - log_den);
}

double amplitude(const SolitonParams& p, double x) {
  return std::pow(amplitude_power(p, x), 1.0 / (2.0 * p.sigma));
}

double amplitude_power_integral(const SolitonParams& p, double x) {
  p.validate();
  const double sw2 = 2.0 * std::sqrt(p.omega);
  const double r = std::sqrt((sw2 + p.c) / (sw2 - p.c));
  const double t = std::tanh(0.5 * p.sigma * p.kappa() * x);
  return 2.0 * (p.sigma + 1.0) / p.sigma * (std::atan(r * t) + std::atan(r));
}

double phase(const SolitonParams& p, double x) {
  return 0.5 * p.c * x - amplitude_power_integral(p, x) / (2.0 * p.sigma + 2.0);
}

GridPtr soliton_grid(const SolitonParams& p, Eigen::Index n) {
  p.validate();
  return make_grid(truncation_half_length(p.kappa()), n);
}

Field soliton_field(const SolitonParams& p, const GridPtr& grid) {
  p.validate();
  const Grid& g = *grid;
  const Eigen::Index n = g.size();
  const RealVector& x = g.nodes();
  RealVector pw(n);
  for (Eigen::Index j = 0; j < n; ++j) pw[j] = amplitude_power(p, x[j]);

  const double edge = std::pow(std::max(pw[0], pw[n - 1]), 1.0 / (2.0 * p.sigma));
  if (edge > 1e-12) {
    std::ostringstream msg;
    msg << "soliton magnitude " << edge << " at the box edge exceeds 1e-12; need L >= "
        << truncation_half_length(p.kappa()) << " (have " << g.half_length() << ")";
    throw TruncationTooSmall(msg.str());
  }

  const RealVector cum = cumulative_integral(g, pw);
  ComplexVector v(n);
  const double inv = 1.0 / (2.0 * p.sigma + 2.0);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double theta = 0.5 * p.c * x[j] - inv * cum[j];
    v[j] = std::polar(std::pow(pw[j], 1.0 / (2.0 * p.sigma)), theta);
  }
  return Field(grid, std::move(v));
}

double elliptic_residual(const Field& phi, const SolitonParams& p) {
  require_finite(phi, "elliptic_residual");
  const Field d1 = spectral_derivative(phi, 1);
  const Field d2 = spectral_derivative(phi, 2);
  const Complex i(0.0, 1.0);
  const RealVector w = abs_pow(phi.values(), 2.0 * p.sigma);
  ComplexVector r = -d2.values() + p.omega * phi.values() + i * p.c * d1.values();
  r.array() -= i * w.array().cast<Complex>() * d1.values().array();
  return l2_norm(Field(phi.grid_ptr(), std::move(r)));
}

double elliptic_residual(const SolitonParams& p, const GridPtr& grid) {
  return elliptic_residual(soliton_field(p, grid), p);
}

Field instability_direction(const Field& phi, const SolitonParams& p) {
  const Field d1 = spectral_derivative(phi, 1);
  return Field(phi.grid_ptr(), -p.a0() * phi.values() + Complex(0.0, 1.0) * d1.values());
}

Field perturbation_direction(const SolitonParams& p, const GridPtr& grid, double delta1) {
  const Field phi = soliton_field(p, grid);
  if (delta1 == 0.0) return phi;
  return phi + delta1 * instability_direction(phi, p);
}

}  // namespace gdnls
