#include "doctest.h"

#include <cmath>

#include "gdnls/conserved.hpp"
#include "gdnls/quadrature.hpp"

using namespace gdnls;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST_CASE("zero field") {
  auto g = make_grid(20.0, 256);
  Field z(g);
  ConservedSet s = conserved_set(z, 1.5);
  CHECK(s.M == 0.0);
  CHECK(s.P == 0.0);
  CHECK(s.E == 0.0);
  CHECK(s.J == 0.0);
  CHECK(action(z, {1.5, 1.0, 0.5}) == 0.0);
  CHECK(lp_power_norm(z, 1.5) == 0.0);
}

TEST_CASE("soliton identities at a sample point") {
  SolitonParams p{1.5, 1.0, 0.5};
  auto g = soliton_grid(p, 4096);
  Field phi = soliton_field(p, g);
  ConservedSet s = conserved_set(phi, p.sigma);
  Field dphi = spectral_derivative(phi, 1);
  CHECK(rel(inner(dphi, dphi), p.omega * inner(phi, phi)) <= 1e-8);
  CHECK(rel(s.J, 4 * p.omega * s.M + 2 * p.c * s.P) <= 1e-8);
  CHECK(rel(lp_power_norm(phi, p.sigma), 4 * (p.sigma + 1) * (0.5 * p.c * s.M + s.P)) <= 1e-8);
  // P as 1/2 (i u_x, u)
  CHECK(rel(0.5 * inner(Complex(0, 1) * dphi, phi), s.P) <= 1e-12);
  CHECK(rel(lp_power_norm(2.0 * phi, p.sigma), std::pow(2.0, 2 * p.sigma + 2) * lp_power_norm(phi, p.sigma)) <= 1e-13);
  // M against the independent 1-D quadrature of varphi^2
  const double Mq = improper_integral([&](double x) { return std::pow(amplitude(p, x), 2); }, 1e-13).value;
  CHECK(rel(s.M, Mq) <= 1e-11);
}

TEST_CASE("energy identity over the parameter sweep") {
  for (double s : {1.2, 1.5, 1.8})
    for (double w : {0.5, 1.0, 2.0})
      for (double z : {-0.5, 0.0, 0.5}) {
        SolitonParams p{s, w, z * 2 * std::sqrt(w)};
        Field phi = soliton_field(p, soliton_grid(p, 4096));
        ConservedSet q = conserved_set(phi, s);
        CHECK(rel((s - 1) / (s + 1) * q.J, 2 * p.c * q.P + 4 * q.E) <= 1e-8);
      }
}

TEST_CASE("q functional") {
  SolitonParams p{1.5, 1.0, 0.5};
  Field phi = soliton_field(p, soliton_grid(p, 1024));
  ConservedSet s = conserved_set(phi, p.sigma);
  CHECK(q_functional(phi, 1, 0) == doctest::Approx(s.M));
  CHECK(q_functional(phi, 0, 1) == doctest::Approx(s.P));
  CHECK(q_functional(phi, 2.5, -1.5) == doctest::Approx(2.5 * s.M - 1.5 * s.P));
}

TEST_CASE("translation invariance of the conserved set") {
  SolitonParams p{1.5, 1.0, 0.5};
  auto g = soliton_grid(p, 1024);
  Field phi = soliton_field(p, g);
  Field sh(g);
  for (Eigen::Index j = 0; j < g->size(); ++j) sh[j] = phi[(j + 37) % g->size()];
  ConservedSet a = conserved_set(phi, p.sigma), b = conserved_set(sh, p.sigma);
  CHECK(rel(a.M, b.M) < 1e-13);
  CHECK(rel(a.P, b.P) < 1e-12);
  CHECK(rel(a.E, b.E) < 1e-12);
  CHECK(rel(a.J, b.J) < 1e-12);
}

TEST_CASE("action gradient and first-order flatness") {
  SolitonParams p{1.5, 1.0, 0.5};
  auto g = make_grid(truncation_half_length(std::sqrt(4 - 0.6 * 0.6)) * 1.2, 4096);
  auto d = [&](double w, double c) {
    SolitonParams q{p.sigma, w, c};
    return action(soliton_field(q, g), q);
  };
  ConservedSet s = conserved_set(soliton_field(p, g), p.sigma);
  CHECK(rel(parameter_derivative(d, p.omega, p.c, ParamDerivative::Omega).value, s.M) <= 1e-6);
  CHECK(rel(parameter_derivative(d, p.omega, p.c, ParamDerivative::C).value, s.P) <= 1e-6);

  const double S0 = action(soliton_field(p, g), p);
  double prev = 1e300;
  for (double d1 : {1e-2, 1e-3, 1e-4}) {
    const double ratio = std::abs(action(perturbation_direction(p, g, d1), p) - S0) / d1;
    CHECK(ratio < prev);
    prev = ratio;
  }
  CHECK(prev < 1e-3);
}

TEST_CASE("orbit distance") {
  SolitonParams p{1.5, 1.0, 0.5};
  auto g = soliton_grid(p, 2048);
  Field phi = soliton_field(p, g);
  SUBCASE("identity") {
    OrbitFit f = orbit_distance(phi, phi);
    CHECK(f.dist < 1e-12);
    CHECK(std::abs(f.theta) < 1e-9);
    CHECK(std::abs(f.y) < 1e-9);
  }
  SUBCASE("orbit element") {
    const Eigen::Index m = static_cast<Eigen::Index>(std::llround(3.2 / g->dx()));
    const double b = m * g->dx();
    Field u = spectral_shift(phi, b) * std::polar(1.0, 0.7);
    OrbitFit f = orbit_distance(u, p);
    CHECK(f.dist <= 1e-9);
    CHECK(std::abs(f.theta - 0.7) <= 1e-6);
    CHECK(std::abs(f.y - b) <= 1e-6);
  }
  SUBCASE("sub-cell shift") {
    Field u = spectral_shift(phi, 3.2) * std::polar(1.0, -2.5);
    OrbitFit f = orbit_distance(u, phi);
    CHECK(f.dist <= 1e-9);
    CHECK(std::abs(f.theta + 2.5) <= 1e-6);
    CHECK(std::abs(f.y - 3.2) <= 1e-6);
  }
  SUBCASE("perturbed") {
    const double d1 = 1e-3;
    Field u = perturbation_direction(p, g, d1);
    OrbitFit f = orbit_distance(u, phi);
    CHECK(f.dist > 0.0);
    CHECK(f.dist <= h1_norm(u - phi) * (1 + 1e-12));
    // gauge invariance
    const double b = 17 * g->dx();
    OrbitFit f2 = orbit_distance(spectral_shift(u, b) * std::polar(1.0, 1.1), phi);
    CHECK(std::abs(f2.dist - f.dist) <= 1e-10);
  }
}
