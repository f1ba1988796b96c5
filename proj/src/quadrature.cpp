#include "gdnls/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <string>
#include <vector>

#include "gdnls/errors.hpp"

namespace gdnls {

namespace {

// 15-point Kronrod abscissae (non-negative half) and weights, with the
// embedded 7-point Gauss weights on the odd-indexed nodes.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a, b, value, error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

Panel kronrod(const std::function<double(double)>& f, double a, double b, int& evals) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double resk = fc * kWgk[7];
  double resg = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const double fsum = f(center - dx) + f(center + dx);
    resk += kWgk[j] * fsum;
    if (j % 2 == 1) resg += kWg[j / 2] * fsum;
  }
  evals += 15;
  return {a, b, resk * half, std::abs((resk - resg) * half)};
}

}  // namespace

QuadratureResult adaptive_integral(const std::function<double(double)>& integrand, double a,
                                   double b, double tol, int max_subdivisions) {
  if (!(tol > 0.0)) throw InvalidArgument("quadrature tolerance must be positive");
  int evals = 0;
  std::priority_queue<Panel> panels;
  Panel first = kronrod(integrand, a, b, evals);
  double total = first.value;
  double error = first.error;
  panels.push(first);
  int splits = 0;
  // Large integrals cannot be resolved below roundoff; cap the request there.
  auto target = [&] { return std::max(tol, 50.0 * std::numeric_limits<double>::epsilon() * std::abs(total)); };
  while (error > target()) {
    if (++splits > max_subdivisions)
      throw NoConvergence("adaptive quadrature exhausted " + std::to_string(max_subdivisions) +
                          " subdivisions (error estimate " + std::to_string(error) + ")");
    Panel worst = panels.top();
    panels.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    Panel left = kronrod(integrand, worst.a, mid, evals);
    Panel right = kronrod(integrand, mid, worst.b, evals);
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    panels.push(left);
    panels.push(right);
    if (!std::isfinite(total)) throw NoConvergence("integrand produced a non-finite value");
  }
  // Re-sum to shed accumulated update error.
  total = 0.0;
  error = 0.0;
  while (!panels.empty()) {
    total += panels.top().value;
    error += panels.top().error;
    panels.pop();
  }
  return {total, error, evals};
}

QuadratureResult improper_integral(const std::function<double(double)>& integrand, double tol,
                                   int max_subdivisions) {
  if (!(tol > 0.0)) throw InvalidArgument("quadrature tolerance must be positive");
  const double cutoff = tol * 1e-3;
  double upper = 8.0;
  int evals = 0;
  // Grow the window until the integrand is negligible at, and just before, the edge.
  for (int iter = 0;; ++iter) {
    const double f1 = std::abs(integrand(upper));
    const double f2 = std::abs(integrand(0.75 * upper));
    evals += 2;
    if (f1 < cutoff && f2 < cutoff) break;
    if (iter > 40) throw NoConvergence("integrand does not decay on (0, inf)");
    upper *= 2.0;
  }
  QuadratureResult r = adaptive_integral(integrand, 0.0, upper, 0.5 * tol, max_subdivisions);
  // Tail estimate assuming exponential decay between 0.5*upper and upper.
  const double fa = std::abs(integrand(0.5 * upper));
  const double fb = std::abs(integrand(upper));
  evals += 2;
  double tail = 0.0;
  if (fb > 0.0 && fa > fb) {
    const double rate = std::log(fa / fb) / (0.5 * upper);
    tail = fb / rate;
  } else {
    tail = fb * upper;
  }
  r.est_error += tail;
  r.evaluations += evals;
  const double floor = 100.0 * std::numeric_limits<double>::epsilon() * std::abs(r.value);
  if (r.est_error > std::max(tol, floor))
    throw NoConvergence("improper integral error estimate " + std::to_string(r.est_error) +
                        " exceeds tolerance");
  return r;
}

DerivativeEstimate parameter_derivative(const std::function<double(double, double)>& g,
                                        double omega, double c, ParamDerivative which,
                                        double step) {
  const bool second = which == ParamDerivative::OmegaOmega || which == ParamDerivative::OmegaC ||
                      which == ParamDerivative::CC;
  const double h = step > 0.0 ? step : (second ? 1e-2 : 1e-3 * std::max(1.0, std::abs(omega)));

  auto eval = [&](double w, double cc) {
    if (!(cc * cc < 4.0 * w))
      throw DomainViolation("derivative stencil point (omega=" + std::to_string(w) +
                            ", c=" + std::to_string(cc) + ") leaves c^2 < 4 omega");
    return g(w, cc);
  };

  auto central = [&](double hh) {
    switch (which) {
      case ParamDerivative::Omega:
        return (eval(omega + hh, c) - eval(omega - hh, c)) / (2.0 * hh);
      case ParamDerivative::C:
        return (eval(omega, c + hh) - eval(omega, c - hh)) / (2.0 * hh);
      case ParamDerivative::OmegaOmega:
        return (eval(omega + hh, c) - 2.0 * eval(omega, c) + eval(omega - hh, c)) / (hh * hh);
      case ParamDerivative::CC:
        return (eval(omega, c + hh) - 2.0 * eval(omega, c) + eval(omega, c - hh)) / (hh * hh);
      case ParamDerivative::OmegaC:
        return (eval(omega + hh, c + hh) - eval(omega + hh, c - hh) - eval(omega - hh, c + hh) +
                eval(omega - hh, c - hh)) /
               (4.0 * hh * hh);
    }
    return 0.0;
  };

  const double coarse = central(h);
  const double fine = central(0.5 * h);
  return {(4.0 * fine - coarse) / 3.0, std::abs(fine - coarse) / 3.0};
}

}  // namespace gdnls
