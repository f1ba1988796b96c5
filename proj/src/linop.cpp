#include "gdnls/linop.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace gdnls {

namespace {

const Complex kI(0.0, 1.0);

// sigma |phi|^{2 sigma - 2} phi_x, with the convention 0 where phi = 0.
ComplexVector weighted_slope(const Field& base, double sigma, const ComplexVector& dphi) {
  const Eigen::Index n = base.size();
  ComplexVector out(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double a = std::abs(base[j]);
    out[j] = a > 0.0 ? sigma * std::pow(a, 2.0 * sigma - 2.0) * dphi[j] : Complex(0.0);
  }
  return out;
}

}  // namespace

Field apply_S_prime(const Field& u, const SolitonParams& p, bool nonlinear) {
  require_finite(u, "apply_S_prime");
  const Field d1 = spectral_derivative(u, 1);
  const Field d2 = spectral_derivative(u, 2);
  ComplexVector r = -d2.values() + p.omega * u.values() + kI * p.c * d1.values();
  if (nonlinear) {
    const RealVector w = abs_pow(u.values(), 2.0 * p.sigma);
    r.array() -= kI * w.array().cast<Complex>() * d1.values().array();
  }
  return Field(u.grid_ptr(), std::move(r));
}

Field apply_S_double_prime(const Field& f, const Field& base, const SolitonParams& p) {
  require_same_grid(f, base);
  require_finite(f, "apply_S_double_prime");
  const Field df = spectral_derivative(f, 1);
  const Field d2f = spectral_derivative(f, 2);
  const ComplexVector dphi = spectral_derivative(base, 1).values();
  const ComplexVector a = weighted_slope(base, p.sigma, dphi);
  const RealVector w = abs_pow(base.values(), 2.0 * p.sigma);
  const auto& phi = base.values().array();
  ComplexVector r = -d2f.values() + p.omega * f.values() + kI * p.c * df.values();
  r.array() -= kI * phi.conjugate() * a.array() * f.values().array();
  r.array() -= kI * phi * a.array() * f.values().array().conjugate();
  r.array() -= kI * w.array().cast<Complex>() * df.values().array();
  return Field(f.grid_ptr(), std::move(r));
}

Field apply_J_prime(const Field& u, double sigma) {
  require_finite(u, "apply_J_prime");
  const Field d1 = spectral_derivative(u, 1);
  const RealVector w = abs_pow(u.values(), 2.0 * sigma);
  ComplexVector r = (2.0 * (sigma + 1.0)) * kI * (w.array().cast<Complex>() * d1.values().array()).matrix();
  return Field(u.grid_ptr(), std::move(r));
}

Eigen::VectorXd pack(const Field& f) {
  const Eigen::Index n = f.size();
  Eigen::VectorXd v(2 * n);
  v.head(n) = f.values().real();
  v.tail(n) = f.values().imag();
  return v;
}

Field unpack(const GridPtr& grid, const Eigen::VectorXd& v) {
  const Eigen::Index n = grid->size();
  if (v.size() != 2 * n) throw GridMismatch("packed vector length does not match grid");
  ComplexVector c(n);
  c.real() = v.head(n);
  c.imag() = v.tail(n);
  return Field(grid, std::move(c));
}

Eigen::MatrixXd assemble_S_double_prime(const Field& base, const SolitonParams& p) {
  const Eigen::Index n = base.size();
  const GridPtr& g = base.grid_ptr();
  Eigen::MatrixXd A(2 * n, 2 * n);
  Eigen::VectorXd e = Eigen::VectorXd::Zero(2 * n);
  for (Eigen::Index j = 0; j < 2 * n; ++j) {
    e[j] = 1.0;
    A.col(j) = pack(apply_S_double_prime(unpack(g, e), base, p));
    e[j] = 0.0;
  }
  // The continuum operator is symmetric; the collocation commutator [|phi|^{2s}, d/dx]
  // is only spectrally close to its exact counterpart.
  Eigen::MatrixXd S = 0.5 * (A + A.transpose());
  return S;
}

Eigen::MatrixXd h1_gram(const Grid& grid) {
  const Eigen::Index n = grid.size();
  // real first-derivative collocation matrix, built column by column
  Eigen::MatrixXd D(n, n);
  auto gp = std::make_shared<const Grid>(grid);
  for (Eigen::Index j = 0; j < n; ++j) {
    Field e(gp);
    e[j] = 1.0;
    D.col(j) = spectral_derivative(e, 1).values().real();
  }
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  const Eigen::MatrixXd block = Eigen::MatrixXd::Identity(n, n) + D.transpose() * D;
  G.topLeftCorner(n, n) = block;
  G.bottomRightCorner(n, n) = block;
  return G;
}

namespace {

std::vector<EigenPair> dense_spectrum(const Field& base, const SolitonParams& p, int k) {
  const Eigen::MatrixXd A = assemble_S_double_prime(base, p);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
  if (es.info() != Eigen::Success) throw EigenFailure("dense symmetric eigensolver failed");
  std::vector<EigenPair> out;
  const double norm = 1.0 / std::sqrt(base.grid().dx());
  for (int i = 0; i < k; ++i)
    out.push_back({es.eigenvalues()[i], unpack(base.grid_ptr(), es.eigenvectors().col(i) * norm)});
  return out;
}

// Preconditioned block eigensolver (LOBPCG) for the smallest eigenvalues of
// the matrix-free operator; the preconditioner inverts the constant-coefficient
// part 1 + k^2 + omega.
std::vector<EigenPair> iterative_spectrum(const Field& base, const SolitonParams& p, int k) {
  const GridPtr& g = base.grid_ptr();
  const Eigen::Index n2 = 2 * g->size();
  const int m = k + 4;  // guard vectors
  auto apply = [&](const Eigen::MatrixXd& X) {
    Eigen::MatrixXd Y(X.rows(), X.cols());
    for (Eigen::Index c = 0; c < X.cols(); ++c)
      Y.col(c) = pack(apply_S_double_prime(unpack(g, X.col(c)), base, p));
    return Y;
  };
  ComplexVector symbol(g->size());
  for (Eigen::Index j = 0; j < g->size(); ++j) {
    const double kk = g->wavenumbers()[j];
    symbol[j] = 1.0 / (1.0 + kk * kk + p.omega);
  }
  auto precondition = [&](const Eigen::MatrixXd& R) {
    Eigen::MatrixXd Z(R.rows(), R.cols());
    for (Eigen::Index c = 0; c < R.cols(); ++c)
      Z.col(c) = pack(apply_multiplier(unpack(g, R.col(c)), symbol));
    return Z;
  };
  auto orthonormalize = [](const Eigen::MatrixXd& S) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(S);
    Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(S.rows(), S.cols());
    return Q;
  };

  // start from localized Gaussians times low modes
  Eigen::MatrixXd X(n2, m);
  const RealVector& x = g->nodes();
  for (int c = 0; c < m; ++c)
    for (Eigen::Index j = 0; j < g->size(); ++j) {
      const double env = std::exp(-x[j] * x[j] / 8.0) * std::pow(x[j], c / 2);
      X(j, c) = c % 2 == 0 ? env : 0.0;
      X(j + g->size(), c) = c % 2 == 1 ? env : 0.0;
    }
  X = orthonormalize(X);
  Eigen::MatrixXd AX = apply(X);
  Eigen::MatrixXd P;
  Eigen::VectorXd theta;
  for (int it = 0; it < 1000; ++it) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> rr(X.transpose() * AX);
    theta = rr.eigenvalues();
    X = X * rr.eigenvectors();
    AX = AX * rr.eigenvectors();
    const Eigen::MatrixXd R = AX - X * theta.asDiagonal();
    const double scale = std::max(1.0, theta.cwiseAbs().maxCoeff());
    double worst = 0.0;
    for (int c = 0; c < k; ++c) worst = std::max(worst, R.col(c).norm());
    if (worst <= 1e-9 * scale) {
      std::vector<EigenPair> out;
      const double norm = 1.0 / std::sqrt(g->dx());
      for (int c = 0; c < k; ++c) out.push_back({theta[c], unpack(g, X.col(c) * norm)});
      return out;
    }
    Eigen::MatrixXd W = precondition(R);
    Eigen::MatrixXd S(n2, X.cols() + W.cols() + P.cols());
    S << X, W, P;
    S = orthonormalize(S);
    const Eigen::MatrixXd AS = apply(S);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> big(S.transpose() * AS);
    const Eigen::MatrixXd Y = big.eigenvectors().leftCols(m);
    const Eigen::MatrixXd Xn = S * Y;
    // search direction: the part of the update outside span(X)
    P = S.rightCols(S.cols() - m) * Y.bottomRows(S.cols() - m);
    X = orthonormalize(Xn);
    AX = apply(X);
  }
  throw EigenFailure("iterative eigensolver did not converge in 1000 iterations");
}

}  // namespace

std::vector<EigenPair> spectrum(const Field& base, const SolitonParams& p, int k) {
  require_finite(base, "spectrum");
  if (k < 1 || k > 2 * base.size()) throw InvalidArgument("requested eigenvalue count out of range");
  if (base.size() <= kDenseSpectrumLimit) return dense_spectrum(base, p, k);
  return iterative_spectrum(base, p, k);
}

SpectrumSummary classify(const std::vector<EigenPair>& eig, double rel_zero_tol) {
  SpectrumSummary s;
  for (const auto& e : eig) s.scale = std::max(s.scale, std::abs(e.value));
  s.zero_tol = rel_zero_tol * s.scale;
  for (const auto& e : eig) {
    if (e.value < -s.zero_tol)
      ++s.negative;
    else if (std::abs(e.value) <= s.zero_tol)
      ++s.near_zero;
  }
  return s;
}

double subspace_correlation(const Field& g, const std::vector<Field>& fields) {
  if (fields.empty()) return 0.0;
  Eigen::MatrixXd B(2 * g.size(), static_cast<Eigen::Index>(fields.size()));
  for (size_t i = 0; i < fields.size(); ++i) B.col(static_cast<Eigen::Index>(i)) = pack(fields[i]);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(B);
  const Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(B.rows(), B.cols());
  const Eigen::VectorXd v = pack(g).normalized();
  return (Q.transpose() * v).norm();
}

std::vector<Field> modulation_constraints(const Field& base, double sigma) {
  return {kI * base, spectral_derivative(base, 1), apply_J_prime(base, sigma)};
}

double coercivity_constant(const Field& base, const SolitonParams& p,
                           const std::vector<Field>& constraints) {
  require_finite(base, "coercivity_constant");
  if (base.size() > kDenseSpectrumLimit) {
    std::ostringstream msg;
    msg << "coercivity constant is dense-only (N <= " << kDenseSpectrumLimit << ")";
    throw InvalidArgument(msg.str());
  }
  const Eigen::Index n2 = 2 * base.size();
  const Eigen::Index m = static_cast<Eigen::Index>(constraints.size());
  Eigen::MatrixXd C(n2, m);
  for (Eigen::Index i = 0; i < m; ++i) C.col(i) = pack(constraints[i]);
  // Householder QR of the constraints: trailing columns of Q span the complement.
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(C);
  Eigen::MatrixXd A = assemble_S_double_prime(base, p);
  Eigen::MatrixXd G = h1_gram(base.grid());
  const auto H = qr.householderQ();
  A.applyOnTheLeft(H.transpose());
  A.applyOnTheRight(H);
  G.applyOnTheLeft(H.transpose());
  G.applyOnTheRight(H);
  const Eigen::Index r = n2 - m;
  Eigen::MatrixXd Ac = A.bottomRightCorner(r, r);
  Eigen::MatrixXd Gc = G.bottomRightCorner(r, r);
  Ac = 0.5 * (Ac + Ac.transpose()).eval();
  Gc = 0.5 * (Gc + Gc.transpose()).eval();
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(Ac, Gc, Eigen::EigenvaluesOnly);
  if (ges.info() != Eigen::Success) throw EigenFailure("generalized eigensolver failed");
  return ges.eigenvalues()[0];
}

}  // namespace gdnls
