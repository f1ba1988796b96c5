#include "gdnls/virial.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gdnls/quadrature.hpp"

namespace gdnls {

namespace {

// C-infinity step h(t) = 1 / (1 + exp(1/t - 1/(1-t))) on (0, 1); h(t) + h(1-t) = 1.
struct Step {
  double h, h1, h2;
};

Step step_eval(double t) {
  if (t <= 0.0) return {0.0, 0.0, 0.0};
  if (t >= 1.0) return {1.0, 0.0, 0.0};
  const double z = 1.0 / (1.0 - t) - 1.0 / t;
  const double s = z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
  const double ds = s * (1.0 - s);
  const double z1 = 1.0 / ((1.0 - t) * (1.0 - t)) + 1.0 / (t * t);
  const double z2 = 2.0 / std::pow(1.0 - t, 3) - 2.0 / (t * t * t);
  return {s, ds * z1, ds * (1.0 - 2.0 * s) * z1 * z1 + ds * z2};
}

// G(t) = int_0^t h on a uniform table, cubic Hermite between nodes.
class StepIntegral {
 public:
  StepIntegral() : G_(kIntervals + 1) {
    G_[0] = 0.0;
    for (int k = 0; k < kIntervals; ++k) {
      const double a = static_cast<double>(k) / kIntervals, b = static_cast<double>(k + 1) / kIntervals;
      G_[k + 1] = G_[k] + adaptive_integral([](double t) { return step_eval(t).h; }, a, b, 1e-17).value;
    }
  }

  double operator()(double t) const {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 0.5;  // by the symmetry h(t) + h(1-t) = 1
    const double u = t * kIntervals;
    const int k = std::min(static_cast<int>(u), kIntervals - 1);
    const double d = 1.0 / kIntervals, s = u - k;
    const double a = static_cast<double>(k) / kIntervals;
    const double g0 = G_[k], g1 = G_[k + 1];
    const double m0 = step_eval(a).h * d, m1 = step_eval(a + d).h * d;
    const double s2 = s * s, s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * g0 + (s3 - 2 * s2 + s) * m0 + (-2 * s3 + 3 * s2) * g1 +
           (s3 - s2) * m1;
  }

 private:
  static constexpr int kIntervals = 4096;
  std::vector<double> G_;
};

const StepIntegral& step_integral() {
  static const StepIntegral table;
  return table;
}

RealVector current(const Field& u) {
  const Field ux = spectral_derivative(u, 1);
  return (u.values().array() * ux.values().array().conjugate()).imag().matrix();
}

}  // namespace

CutoffProfile::CutoffProfile(double R) : R_(R) {
  if (!(R > 0.0) || !std::isfinite(R)) throw InvalidArgument("cutoff radius must be positive");
  step_integral();
}

double CutoffProfile::value(double x) const {
  const double a = std::abs(x);
  double v;
  if (a <= R_) {
    v = a;
  } else if (a >= 3.0 * R_) {
    v = 2.0 * R_;
  } else {
    const double t = (a - R_) / (2.0 * R_);
    v = R_ + 2.0 * R_ * (t - step_integral()(t));
  }
  return std::copysign(v, x);
}

double CutoffProfile::d1(double x) const {
  const double a = std::abs(x);
  if (a <= R_) return 1.0;
  if (a >= 3.0 * R_) return 0.0;
  // 1 - h(t) = h(1 - t) keeps the sign exact
  return step_eval(1.0 - (a - R_) / (2.0 * R_)).h;
}

double CutoffProfile::d3(double x) const {
  const double a = std::abs(x);
  if (a <= R_ || a >= 3.0 * R_) return 0.0;
  return -step_eval((a - R_) / (2.0 * R_)).h2 / (4.0 * R_ * R_);
}

CutoffSamples sample_cutoff(const CutoffProfile& cut, const Grid& grid, double center) {
  if (cut.support() > 0.9 * grid.half_length()) {
    std::ostringstream msg;
    msg << "3R = " << cut.support() << " exceeds 0.9 L = " << 0.9 * grid.half_length();
    throw CutoffTooLarge(msg.str());
  }
  const Eigen::Index n = grid.size();
  CutoffSamples s{cut.R(), center, RealVector(n), RealVector(n), RealVector(n)};
  for (Eigen::Index j = 0; j < n; ++j) {
    const double x = grid.wrap(grid.nodes()[j] - center);
    s.phi[j] = cut.value(x);
    s.d1[j] = cut.d1(x);
    s.d3[j] = cut.d3(x);
  }
  return s;
}

double I1(const Field& u, const CutoffSamples& cut) {
  return u.grid().dx() * cut.phi.dot(u.values().cwiseAbs2());
}

double I2(const Field& u, const CutoffSamples& cut) {
  return u.grid().dx() * cut.phi.dot(current(u));
}

double I1(const Field& u, double y, const CutoffProfile& cut) {
  return I1(u, sample_cutoff(cut, u.grid(), y));
}

double I2(const Field& u, double y, const CutoffProfile& cut) {
  return I2(u, sample_cutoff(cut, u.grid(), y));
}

double virial_lambda_coefficient(const ModulationFrame& frame, const GridPtr& grid) {
  const ConservedSet cs = conserved_set(soliton_field(frame.params, grid), frame.params.sigma);
  return 2.0 * modulation_constant(frame, grid) * (cs.M + cs.P);
}

double I_composite(const Field& u, const ModulationState& state, double omega, double C_tilde,
                   const CutoffProfile& cut) {
  const CutoffSamples s = sample_cutoff(cut, u.grid(), state.y);
  return -std::sqrt(omega) * I1(u, s) + I2(u, s) + C_tilde * state.lambda;
}

double I_bound(const Field& u, double lambda, double C_tilde, const CutoffProfile& cut) {
  const double n0 = l2_norm(u);
  const double n1 = l2_norm(spectral_derivative(u, 1));
  return 2.0 * cut.R() * (n0 * n0 + n0 * n1) + std::abs(C_tilde * lambda);
}

VirialRateSample virial_rate_sample(double t, const Field& u, const CutoffSamples& cut,
                                    double sigma, bool nonlinear) {
  const double dx = u.grid().dx();
  const RealVector rho = u.values().cwiseAbs2();
  const RealVector j = current(u);
  const RealVector ux2 = spectral_derivative(u, 1).values().cwiseAbs2();
  VirialRateSample s;
  s.t = t;
  s.I1 = dx * cut.phi.dot(rho);
  s.I2 = dx * cut.phi.dot(j);
  s.rhs1 = -2.0 * dx * cut.d1.dot(j);
  s.rhs2 = dx * (-2.0 * cut.d1.dot(ux2) + 0.5 * cut.d3.dot(rho));
  if (nonlinear) {
    const RealVector w = rho.array().pow(sigma).matrix();  // |u|^{2 sigma}
    s.rhs1 += dx * cut.d1.dot(w.cwiseProduct(rho)) / (sigma + 1.0);
    s.rhs2 += dx * cut.d1.dot(w.cwiseProduct(j));
  }
  return s;
}

VirialRateReport virial_rate_check(const std::vector<VirialRateSample>& s) {
  if (s.size() < 3) throw InsufficientSampling("at least three records are required");
  VirialRateReport rep;
  for (std::size_t n = 1; n < s.size(); ++n) rep.spacing = std::max(rep.spacing, s[n].t - s[n - 1].t);
  if (rep.spacing > 1e-2 * (1.0 + 1e-9)) {
    std::ostringstream msg;
    msg << "record spacing " << rep.spacing << " exceeds 1e-2";
    throw InsufficientSampling(msg.str());
  }
  double scale1 = 0.0, scale2 = 0.0, e1 = 0.0, e2 = 0.0;
  for (const auto& r : s) {
    scale1 = std::max(scale1, std::abs(r.rhs1));
    scale2 = std::max(scale2, std::abs(r.rhs2));
  }
  for (std::size_t n = 1; n + 1 < s.size(); ++n) {
    const double h = s[n + 1].t - s[n - 1].t;
    e1 = std::max(e1, std::abs((s[n + 1].I1 - s[n - 1].I1) / h - s[n].rhs1));
    e2 = std::max(e2, std::abs((s[n + 1].I2 - s[n - 1].I2) / h - s[n].rhs2));
    ++rep.compared;
  }
  rep.mismatch1 = scale1 > 0.0 ? e1 / scale1 : e1;
  rep.mismatch2 = scale2 > 0.0 ? e2 / scale2 : e2;
  rep.max_mismatch = std::max(rep.mismatch1, rep.mismatch2);
  return rep;
}

double A_functional(const Field& u0, const SolitonParams& p, const ConservedSet& phi_cs) {
  const ConservedSet cs = conserved_set(u0, p.sigma);
  const double sw = std::sqrt(p.omega);
  const double s_u = cs.E + p.omega * cs.M + p.c * cs.P;
  const double s_phi = phi_cs.E + p.omega * phi_cs.M + p.c * phi_cs.P;
  return (2.0 * p.c * sw + 4.0 * p.omega) * (cs.M - phi_cs.M) +
         (4.0 * sw - 2.0 * p.c) * (cs.P - phi_cs.P) - 4.0 * (s_u - s_phi);
}

double A_functional_energy(const Field& u0, const SolitonParams& p, const ConservedSet& phi_cs) {
  const ConservedSet cs = conserved_set(u0, p.sigma);
  const double sw = std::sqrt(p.omega);
  return 2.0 * p.c * sw * (cs.M - phi_cs.M) + (4.0 * sw - 2.0 * p.c) * (cs.P - phi_cs.P) -
         4.0 * (cs.E - phi_cs.E);
}

RateDecompositionReport rate_decomposition_check(const std::vector<RateSample>& s, double A,
                                                 double b1, double b2, double delta1, double R) {
  RateDecompositionReport rep;
  if (s.size() < 3) throw InsufficientSampling("at least three records are required");
  rep.increasing = true;
  for (std::size_t n = 1; n < s.size(); ++n)
    if (!(s[n].I > s[n - 1].I)) rep.increasing = false;

  const int m = static_cast<int>(s.size()) - 2;
  Eigen::MatrixXd X(m, 3);
  Eigen::VectorXd r(m);
  int quarter = 0, lower = 0;
  rep.min_rate = INFINITY;
  for (int i = 0; i < m; ++i) {
    const std::size_t n = static_cast<std::size_t>(i) + 1;
    const double rate = (s[n + 1].I - s[n - 1].I) / (s[n + 1].t - s[n - 1].t);
    const double lam = s[n].lambda, eps = s[n].eps_h1;
    rep.min_rate = std::min(rep.min_rate, rate);
    if (rate >= 0.25 * b2 * delta1) ++quarter;
    if (rate >= 0.25 * b2 * delta1 + 0.5 * b1 * lam * lam) ++lower;
    r[i] = std::abs(rate - A - b1 * lam * lam);
    rep.max_residual = std::max(rep.max_residual, r[i]);
    X(i, 0) = std::abs(lam) * eps;
    X(i, 1) = eps * eps;
    X(i, 2) = 1.0 / R;
  }
  rep.compared = m;
  rep.frac_quarter = static_cast<double>(quarter) / m;
  rep.frac_lower = static_cast<double>(lower) / m;
  const Eigen::Vector3d coef = X.colPivHouseholderQr().solve(r);
  rep.c_le = coef[0];
  rep.c_ee = coef[1];
  rep.c_R = coef[2];
  return rep;
}

}  // namespace gdnls
