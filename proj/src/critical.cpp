#include "gdnls/critical.hpp"

#include <boost/math/tools/toms748_solve.hpp>

#include <cmath>
#include <sstream>
#include <vector>

#include "gdnls/quadrature.hpp"

namespace gdnls {

namespace {

// log(cosh y - z) for y >= 0, |z| < 1, without cancellation near y = 0 or
// overflow for large y.
double log_cosh_minus(double y, double z) {
  if (y < 20.0) {
    const double s = std::sinh(0.5 * y);
    return std::log(2.0 * s * s + (1.0 - z));
  }
  const double e = std::exp(-y);
  return y - M_LN2 + std::log1p(e * e - 2.0 * z * e);
}

// int_0^inf (cosh y - z)^{-q} dy
double cosh_power_integral(double q, double z) {
  return improper_integral([&](double y) { return std::exp(-q * log_cosh_minus(y, z)); },
                           kCriticalQuadTol)
      .value;
}

}  // namespace

double F_sigma(double sigma, double z) {
  if (!(sigma > 0.0)) throw DomainViolation("F_sigma needs sigma > 0");
  if (!(std::abs(z) < 1.0)) throw DomainViolation("F_sigma needs |z| < 1");
  const double q = 1.0 / sigma;
  const double first = cosh_power_integral(q, z);
  const double second =
      improper_integral(
          [&](double y) {
            // (z cosh y - 1) (cosh y - z)^{-q-1}, with z cosh y - 1 = z (cosh y - z) + z^2 - 1
            const double l = log_cosh_minus(y, z);
            return z * std::exp(-q * l) + (z * z - 1.0) * std::exp(-(q + 1.0) * l);
          },
          kCriticalQuadTol)
          .value;
  const double s1 = sigma - 1.0;
  return s1 * s1 * first * first - second * second;
}

double find_z0(double sigma) {
  if (!(sigma > 0.0 && sigma < 2.0)) {
    std::ostringstream msg;
    msg << "sigma = " << sigma << " is outside (0, 2)";
    throw NoSignChange(msg.str());
  }
  constexpr int kScan = 1000;
  const double lo = -0.999, hi = 0.999;
  std::vector<double> zs(kScan), fs(kScan);
  for (int i = 0; i < kScan; ++i) {
    zs[i] = lo + (hi - lo) * i / (kScan - 1);
    fs[i] = F_sigma(sigma, zs[i]);
  }
  int changes = 0;
  int at = -1;
  for (int i = 0; i + 1 < kScan; ++i) {
    if (fs[i] == 0.0) return zs[i];
    if ((fs[i] < 0.0) != (fs[i + 1] < 0.0)) {
      ++changes;
      at = i;
    }
  }
  if (changes == 0) {
    std::ostringstream msg;
    msg << "F_sigma has no sign change on (-1, 1) for sigma = " << sigma;
    throw NoSignChange(msg.str());
  }
  if (changes > 1) {
    std::ostringstream msg;
    msg << "F_sigma changes sign " << changes << " times on (-1, 1) for sigma = " << sigma;
    throw RootNotUnique(msg.str());
  }
  boost::uintmax_t iters = 100;
  auto f = [sigma](double z) { return F_sigma(sigma, z); };
  auto r = boost::math::tools::toms748_solve(f, zs[at], zs[at + 1], fs[at], fs[at + 1],
                                             boost::math::tools::eps_tolerance<double>(50), iters);
  const double z0 = 0.5 * (r.first + r.second);
  return z0;
}

AppendixScalars appendix_scalars(const SolitonParams& p) {
  p.validate();
  const double s = p.sigma;
  const double sw = std::sqrt(p.omega);
  AppendixScalars a;
  a.kappa = p.kappa();
  a.f = (s + 1.0) * a.kappa * a.kappa / (2.0 * sw);
  a.kappa_tilde = std::pow(2.0, 1.0 / s - 2.0) / s * std::pow(1.0 + s, 1.0 / s) *
                  std::pow(a.kappa, 2.0 / s - 2.0) * std::pow(p.omega, -0.5 / s - 0.5);
  const double z = p.c / (2.0 * sw);
  for (int n = 0; n < 3; ++n)
    a.alpha[n] = cosh_power_integral(1.0 / s + n, z) / (s * a.kappa);
  return a;
}

MassMomentum closed_form_MP(const SolitonParams& p) {
  const AppendixScalars a = appendix_scalars(p);
  const double sw = std::sqrt(p.omega);
  const double fs = std::pow(a.f, 1.0 / p.sigma);
  MassMomentum mp;
  mp.M = fs * a.alpha[0];
  mp.P = fs * (-2.0 * sw * p.c * a.alpha[0] + a.kappa * a.kappa * a.alpha[1]) / (4.0 * sw);
  return mp;
}

MPDerivatives mp_derivatives(const SolitonParams& p, double step) {
  auto M = [&](double w, double c) { return closed_form_MP({p.sigma, w, c}).M; };
  auto P = [&](double w, double c) { return closed_form_MP({p.sigma, w, c}).P; };
  MPDerivatives d;
  auto mw = parameter_derivative(M, p.omega, p.c, ParamDerivative::Omega, step);
  auto mc = parameter_derivative(M, p.omega, p.c, ParamDerivative::C, step);
  auto pw = parameter_derivative(P, p.omega, p.c, ParamDerivative::Omega, step);
  auto pc = parameter_derivative(P, p.omega, p.c, ParamDerivative::C, step);
  d.M_w = mw.value;
  d.M_c = mc.value;
  d.P_w = pw.value;
  d.P_c = pc.value;
  d.M_w_err = mw.est_error;
  d.M_c_err = mc.est_error;
  d.P_w_err = pw.est_error;
  d.P_c_err = pc.est_error;
  return d;
}

namespace {

Eigen::Matrix2d raw_hessian(const MPDerivatives& d) {
  Eigen::Matrix2d h;
  h << d.M_w, d.P_w, d.M_c, d.P_c;
  return h;
}

Eigen::Matrix2d symmetrized(const Eigen::Matrix2d& h) {
  const double scale = h.cwiseAbs().maxCoeff();
  if (std::abs(h(0, 1) - h(1, 0)) > 1e-6 * scale) {
    std::ostringstream msg;
    msg << "dM/dc = " << h(1, 0) << " and dP/dw = " << h(0, 1) << " differ beyond 1e-6 scale";
    throw SymmetryViolation(msg.str());
  }
  Eigen::Matrix2d s = h;
  s(0, 1) = s(1, 0) = 0.5 * (h(0, 1) + h(1, 0));
  return s;
}

}  // namespace

Eigen::Matrix2d hessian_d2(const SolitonParams& p) {
  return symmetrized(raw_hessian(mp_derivatives(p)));
}

EigenDirection eigen_direction(const SolitonParams& p, double degeneracy_tol) {
  const Eigen::Matrix2d raw = raw_hessian(mp_derivatives(p));
  const Eigen::Matrix2d h = symmetrized(raw);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(h);
  const Eigen::Vector2d ev = es.eigenvalues();
  const int k = std::abs(ev[0]) <= std::abs(ev[1]) ? 0 : 1;
  const double ratio = std::abs(ev[k]) / std::abs(ev[1 - k]);
  if (!(ratio <= degeneracy_tol)) {
    std::ostringstream msg;
    msg << "d'' eigenvalue ratio " << ratio << " exceeds " << degeneracy_tol
        << " at c = " << p.c << "; not on the critical curve";
    throw NotDegenerate(msg.str());
  }
  const Eigen::Vector2d v = es.eigenvectors().col(k);
  EigenDirection d;
  d.nu = 1.0;
  d.mu = v[0] / v[1];
  const Eigen::Vector2d mn(d.mu, d.nu);
  // rows of the original system: mu dwM + nu dwP, mu dcM + nu dcP
  d.residual = raw * mn;
  d.residual_transposed = raw.transpose() * mn;
  return d;
}

Field psi_field(const SolitonParams& p, const EigenDirection& dir, const GridPtr& grid,
                double step) {
  auto at = [&](double lambda) {
    return soliton_field({p.sigma, p.omega + lambda * dir.mu, p.c + lambda * dir.nu}, grid);
  };
  auto central = [&](double h) {
    return Field(grid, (at(h).values() - at(-h).values()) / (2.0 * h));
  };
  const Field coarse = central(step);
  const Field fine = central(0.5 * step);
  return Field(grid, (4.0 * fine.values() - coarse.values()) / 3.0);
}

CriticalData critical_constants(double sigma, double omega) {
  if (!(sigma > 1.0 && sigma < 2.0))
    throw DomainViolation("critical constants need 1 < sigma < 2");
  if (!(omega > 0.0)) throw DomainViolation("critical constants need omega > 0");
  CriticalData cd;
  cd.sigma = sigma;
  cd.omega = omega;
  cd.z0 = find_z0(sigma);
  const double sw = std::sqrt(omega);
  cd.c_crit = 2.0 * cd.z0 * sw;
  cd.a0 = (sigma - 1.0) * sw;
  const SolitonParams p = cd.params();
  const MassMomentum mp = closed_form_MP(p);
  cd.M = mp.M;
  cd.P = mp.P;
  const EigenDirection dir = eigen_direction(p);
  cd.mu = dir.mu;
  cd.nu = dir.nu;

  auto directional = [&](auto&& g) {
    const double ww = parameter_derivative(g, omega, cd.c_crit, ParamDerivative::OmegaOmega).value;
    const double wc = parameter_derivative(g, omega, cd.c_crit, ParamDerivative::OmegaC).value;
    const double cc = parameter_derivative(g, omega, cd.c_crit, ParamDerivative::CC).value;
    return cd.mu * cd.mu * ww + 2.0 * cd.mu * cd.nu * wc + cd.nu * cd.nu * cc;
  };
  cd.d2M = directional([&](double w, double c) { return closed_form_MP({sigma, w, c}).M; });
  cd.d2P = directional([&](double w, double c) { return closed_form_MP({sigma, w, c}).P; });
  cd.kappa0_from_M = cd.d2M / cd.z0;
  cd.kappa0_from_P = cd.d2P / (-sw);
  const double mismatch = std::abs(cd.kappa0_from_M - cd.kappa0_from_P) /
                          std::max(std::abs(cd.kappa0_from_M), std::abs(cd.kappa0_from_P));
  if (mismatch > 1e-2) {
    std::ostringstream msg;
    msg << "kappa0 from M (" << cd.kappa0_from_M << ") and from P (" << cd.kappa0_from_P
        << ") differ by " << mismatch << " relative";
    throw Kappa0Mismatch(msg.str());
  }
  cd.kappa0 = 0.5 * (cd.kappa0_from_M + cd.kappa0_from_P);
  cd.b1 = 2.0 * cd.kappa0 * omega * (1.0 - cd.z0 * cd.z0);
  cd.b2 = 4.0 * omega * sw * sigma * (2.0 - sigma) * cd.M;
  return cd;
}

}  // namespace gdnls
