#include "gdnls/conserved.hpp"

#include <cmath>

namespace gdnls {

namespace {

// Im int a conj(b) dx
double im_pairing(const ComplexVector& a, const ComplexVector& b, double dx) {
  return (a.array() * b.array().conjugate()).imag().sum() * dx;
}

}  // namespace

ConservedSet conserved_set(const Field& u, double sigma) {
  require_finite(u, "conserved_set");
  const double dx = u.grid().dx();
  const Field ux = spectral_derivative(u, 1);
  const RealVector w = abs_pow(u.values(), 2.0 * sigma);
  ConservedSet s;
  s.M = 0.5 * u.values().squaredNorm() * dx;
  s.P = 0.5 * im_pairing(u.values(), ux.values(), dx);
  const ComplexVector wu = (w.array().cast<Complex>() * u.values().array()).matrix();
  s.J = im_pairing(wu, ux.values(), dx);
  s.E = 0.5 * ux.values().squaredNorm() * dx - s.J / (2.0 * sigma + 2.0);
  return s;
}

double action(const Field& u, const SolitonParams& p) {
  const ConservedSet s = conserved_set(u, p.sigma);
  return s.E + p.omega * s.M + p.c * s.P;
}

double q_functional(const Field& u, double mu, double nu) {
  const ConservedSet s = conserved_set(u, 1.0);
  return mu * s.M + nu * s.P;
}

double lp_power_norm(const Field& u, double sigma) {
  require_finite(u, "lp_power_norm");
  return abs_pow(u.values(), 2.0 * sigma + 2.0).sum() * u.grid().dx();
}

OrbitFit orbit_distance(const Field& u, const Field& phi) {
  require_same_grid(u, phi);
  require_finite(u, "orbit_distance");
  const Grid& g = u.grid();
  const Eigen::Index n = g.size();
  const Eigen::Index nyq = g.nyquist();
  const RealVector& k = g.wavenumbers();
  const double scale = g.dx() / static_cast<double>(n);  // Parseval weight

  const ComplexVector uh = fft_forward(u.values());
  const ComplexVector ph = fft_forward(phi.values());
  const RealVector w = (1.0 + k.array().square()).matrix();

  // C(y) = sum_k uh conj(ph e^{-iky}) w, evaluated on all grid shifts at once.
  ComplexVector prod = (uh.array() * ph.array().conjugate() * w.array().cast<Complex>()).matrix();
  const ComplexVector corr = fft_inverse(prod) * static_cast<double>(n);
  Eigen::Index best = 0;
  corr.cwiseAbs().maxCoeff(&best);
  const double y0 = static_cast<double>(best < n / 2 ? best : best - n) * g.dx();

  auto pairing = [&](double y) {
    Complex acc = 0.0;
    for (Eigen::Index m = 0; m < n; ++m) {
      const Complex shift = m == nyq ? Complex(std::cos(k[m] * y), 0.0) : std::polar(1.0, k[m] * y);
      acc += uh[m] * std::conj(ph[m]) * shift * w[m];
    }
    return acc * scale;
  };

  // Golden section on -|C(y)| over [y0 - dx, y0 + dx].
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = y0 - g.dx();
  double b = y0 + g.dx();
  double x1 = b - gr * (b - a);
  double x2 = a + gr * (b - a);
  double f1 = std::abs(pairing(x1));
  double f2 = std::abs(pairing(x2));
  for (int it = 0; it < 80 && (b - a) > 1e-14 * std::max(1.0, std::abs(y0)); ++it) {
    if (f1 > f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = std::abs(pairing(x1));
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = std::abs(pairing(x2));
    }
  }
  // |C|^2 is flat at the peak, so golden section stalls near sqrt(eps);
  // polish with Newton on d|C|^2/dy using the analytic y-derivatives of C.
  double y = 0.5 * (a + b);
  for (int it = 0; it < 6; ++it) {
    Complex c0 = 0.0, c1 = 0.0, c2 = 0.0;
    for (Eigen::Index m = 0; m < n; ++m) {
      if (m == nyq) continue;
      const Complex t = uh[m] * std::conj(ph[m]) * std::polar(1.0, k[m] * y) * w[m];
      c0 += t;
      c1 += Complex(0.0, k[m]) * t;
      c2 -= k[m] * k[m] * t;
    }
    const double g1 = std::real(c1 * std::conj(c0));
    const double g2 = std::norm(c1) + std::real(c2 * std::conj(c0));
    if (!(g2 < 0.0)) break;
    const double step = -g1 / g2;
    if (!(std::abs(step) < g.dx())) break;
    y += step;
    if (std::abs(step) < 1e-15 * std::max(1.0, std::abs(y))) break;
  }
  const double theta = std::arg(pairing(y));

  // Direct residual norm; avoids the cancellation in ||u||^2 + ||phi||^2 - 2|C|.
  const Complex rot = std::polar(1.0, theta);
  double d2 = 0.0;
  for (Eigen::Index m = 0; m < n; ++m) {
    const Complex shift = m == nyq ? Complex(std::cos(k[m] * y), 0.0) : std::polar(1.0, -k[m] * y);
    d2 += std::norm(uh[m] - rot * ph[m] * shift) * w[m];
  }
  return {std::sqrt(d2 * scale), theta, g.wrap(y)};
}

OrbitFit orbit_distance(const Field& u, const SolitonParams& p) {
  return orbit_distance(u, soliton_field(p, u.grid_ptr()));
}

}  // namespace gdnls
