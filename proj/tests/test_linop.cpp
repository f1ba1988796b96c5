#include "doctest.h"

#include <chrono>
#include <cmath>
#include <random>

#include "gdnls/conserved.hpp"
#include "gdnls/critical.hpp"
#include "gdnls/linop.hpp"

using namespace gdnls;

namespace {

const Complex I(0.0, 1.0);

Field random_localized(const GridPtr& g, std::mt19937& rng) {
  std::normal_distribution<double> nd;
  Field f(g);
  const double a = nd(rng), b = nd(rng), s = 1.0 + 0.3 * std::abs(nd(rng)), x0 = nd(rng);
  for (Eigen::Index j = 0; j < g->size(); ++j) {
    const double x = g->nodes()[j] - x0;
    f[j] = Complex(a, b) * std::exp(-x * x / (2 * s * s)) * std::polar(1.0, nd(rng) * 0 + 0.7 * x);
  }
  return f;
}

}  // namespace

TEST_CASE("S' vanishes on the soliton and acts as its symbol on plane waves") {
  SolitonParams p{1.5, 1.0, 0.5};
  auto g = soliton_grid(p, 4096);
  Field phi = soliton_field(p, g);
  CHECK(l2_norm(apply_S_prime(phi, p)) <= 1e-8);
  CHECK(l2_norm(apply_S_prime(Field(g), p)) == 0.0);
  const double k = M_PI / g->half_length();
  Field e(g);
  for (Eigen::Index j = 0; j < g->size(); ++j) e[j] = std::polar(1.0, k * g->nodes()[j]);
  Field r = apply_S_prime(e, p, false);
  CHECK((r.values() - (k * k + p.omega - p.c * k) * e.values()).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("second-variation identities") {
  for (double s : {1.2, 1.5, 1.8}) {
    SolitonParams p{s, 1.0, 0.5};
    auto g = soliton_grid(p, 4096);
    Field phi = soliton_field(p, g);
    Field dphi = spectral_derivative(phi, 1);
    const RealVector w = abs_pow(phi.values(), 2 * s);
    Field lhs1 = apply_S_double_prime(phi, phi, p);
    Field rhs1(g, (-2.0 * s * I) * (w.array().cast<Complex>() * dphi.values().array()).matrix());
    CHECK(l2_norm(lhs1 - rhs1) <= 1e-7);
    Field lhs2 = apply_S_double_prime(I * dphi, phi, p);
    Field rhs2(g, (-2.0 * s * p.omega) * (w.array().cast<Complex>() * phi.values().array()).matrix());
    CHECK(l2_norm(lhs2 - rhs2) <= 1e-7);
    Field jp = apply_J_prime(phi, s);
    CHECK(l2_norm(jp + ((s + 1) / s) * lhs1) <= 1e-7);
  }
  CHECK(l2_norm(apply_J_prime(Field(make_grid(10, 64)), 1.5)) == 0.0);
}

TEST_CASE("self-adjointness and finite-difference consistency") {
  SolitonParams p{1.5, 1.0, 0.5};
  auto g = soliton_grid(p, 1024);
  Field phi = soliton_field(p, g);
  std::mt19937 rng(11);
  for (int t = 0; t < 20; ++t) {
    Field f = random_localized(g, rng), h = random_localized(g, rng);
    const double a = inner(apply_S_double_prime(f, phi, p), h);
    const double b = inner(f, apply_S_double_prime(h, phi, p));
    CHECK(std::abs(a - b) <= 1e-8 * l2_norm(f) * l2_norm(h));
  }
  Field f = random_localized(g, rng);
  const Field exact = apply_S_double_prime(f, phi, p);
  auto fd = [&](double h) {
    return Field(g, (apply_S_prime(phi + h * f, p).values() - apply_S_prime(phi - h * f, p).values()) / (2 * h));
  };
  const double e1 = l2_norm(fd(1e-2) - exact), e2 = l2_norm(fd(1e-3) - exact);
  CHECK(e1 / e2 == doctest::Approx(100.0).epsilon(0.1));

  // J'(u) is the gradient of J
  Field u = phi + 0.1 * random_localized(g, rng);
  Field v = random_localized(g, rng);
  auto J = [&](const Field& w) { return conserved_set(w, p.sigma).J; };
  const double hh = 1e-4;
  const double dJ = (J(u + hh * v) - J(u - hh * v)) / (2 * hh);
  CHECK(dJ == doctest::Approx(inner(apply_J_prime(u, p.sigma), v)).epsilon(1e-7));
}

TEST_CASE("dense assembly matches the matrix-free action") {
  SolitonParams p{1.5, 1.0, 0.5};
  auto g = soliton_grid(p, 1024);
  Field phi = soliton_field(p, g);
  Eigen::MatrixXd A = assemble_S_double_prime(phi, p);
  CHECK((A - A.transpose()).norm() == 0.0);
  std::mt19937 rng(3);
  Field f = random_localized(g, rng);
  const Eigen::VectorXd lhs = A * pack(f);
  const Eigen::VectorXd rhs = pack(apply_S_double_prime(f, phi, p));
  // differs only by aliasing of the |phi|^{2 sigma} f products
  CHECK((lhs - rhs).norm() <= 1e-6 * rhs.norm());
}

TEST_CASE("spectrum at a stable point") {
  SolitonParams p{1.5, 1.0, 0.5};
  auto g = soliton_grid(p, 1024);
  Field phi = soliton_field(p, g);
  const auto eig = spectrum(phi, p, 6);
  const SpectrumSummary s = classify(eig);
  CHECK(s.negative == 1);
  CHECK(s.near_zero >= 2);
  std::vector<Field> kernel;
  for (const auto& e : eig)
    if (std::abs(e.value) <= 1e-4) kernel.push_back(e.field);
  CHECK(kernel.size() >= 2);
  CHECK(subspace_correlation(I * phi, kernel) > 0.999);
  CHECK(subspace_correlation(spectral_derivative(phi, 1), kernel) > 0.999);
}

TEST_CASE("critical point: psi, coercivity") {
  CriticalData cd = critical_constants(1.5, 1.0);
  SolitonParams p = cd.params();
  auto g = soliton_grid(p, 1024);
  Field phi = soliton_field(p, g);
  Field dphi = spectral_derivative(phi, 1);
  Field psi = psi_field(p, {cd.mu, cd.nu}, g);
  Field q(g, cd.mu * phi.values() + I * cd.nu * dphi.values());
  Field spsi = apply_S_double_prime(psi, phi, p);
  CHECK(l2_norm(spsi + q) <= 1e-5);
  CHECK(std::abs(inner(spsi, psi)) <= 1e-6 * std::pow(h1_norm(psi), 2));

  const double jpsi = inner(apply_J_prime(phi, p.sigma), psi);
  CHECK(jpsi == doctest::Approx(4 * cd.mu * cd.M + 2 * cd.nu * cd.P).epsilon(1e-5));
  CHECK(std::abs(jpsi) > 0.0);

  const auto cons = modulation_constraints(phi, p.sigma);
  const double k3 = coercivity_constant(phi, p, cons);
  CHECK(k3 > 0.0);
  const double k2 = coercivity_constant(phi, p, {cons[0], cons[1]});
  CHECK(k2 <= 0.0);
  const double k3s = coercivity_constant(phi, p, {2.0 * cons[0], -0.5 * cons[1], 3.0 * cons[2]});
  CHECK(std::abs(k3s - k3) <= 1e-10 * std::max(1.0, std::abs(k3)));
}
