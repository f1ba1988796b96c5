#include "doctest.h"

#include <cmath>

#include "gdnls/conserved.hpp"
#include "gdnls/critical.hpp"
#include "gdnls/evolve.hpp"
#include "gdnls/linop.hpp"
#include "gdnls/modulation.hpp"

using namespace gdnls;

namespace {

struct Setup {
  CriticalData cd;
  ModulationFrame frame;
  GridPtr grid;
  Field phi;
};

const Setup& critical_setup() {
  static const Setup s = [] {
    Setup r;
    r.cd = critical_constants(1.5, 1.0);
    r.frame = {r.cd.params(), r.cd.mu, r.cd.nu};
    r.grid = soliton_grid(r.cd.params(), 1024);
    r.phi = soliton_field(r.cd.params(), r.grid);
    return r;
  }();
  return s;
}

}  // namespace

TEST_CASE("soliton decomposes to zero") {
  const Setup& s = critical_setup();
  ModulationState st = decompose(s.phi, s.frame);
  CHECK(st.converged);
  CHECK(std::abs(st.theta) < 1e-12);
  CHECK(std::abs(st.y) < 1e-12);
  CHECK(std::abs(st.lambda) < 1e-12);
  CHECK(st.eps_h1() < 1e-10);
}

TEST_CASE("exact family element is recovered") {
  const Setup& s = critical_setup();
  const double lam = 1e-3;
  Field u = spectral_shift(soliton_field(s.frame.shifted(lam), s.grid), 1.7) *
            std::polar(1.0, 0.3);
  ModulationState st = decompose(u, s.frame);
  REQUIRE(st.converged);
  CHECK(std::abs(st.theta - 0.3) < 1e-8);
  CHECK(std::abs(st.y - 1.7) < 1e-8);
  CHECK(std::abs(st.lambda - lam) < 1e-8);
  CHECK(st.eps_h1() < 1e-8);
  CHECK(st.iterations <= 25);
}

TEST_CASE("perturbed soliton satisfies the orthogonality conditions") {
  const Setup& s = critical_setup();
  const double d1 = 1e-3;
  const SolitonParams p = s.cd.params();
  Field u = perturbation_direction(p, s.grid, d1);
  ModulationState st = decompose(u, s.frame);
  REQUIRE(st.converged);
  const Field phil = soliton_field(s.frame.shifted(st.lambda), s.grid);
  // independent recomputation of the three pairings
  const Field eps = spectral_shift(u, -st.y) * std::polar(1.0, -st.theta) - phil;
  const double scale = l2_norm(u);
  CHECK(std::abs(inner(eps, Complex(0, 1) * phil)) <= 1e-9 * scale * l2_norm(phil));
  const Field dphil = spectral_derivative(phil, 1);
  CHECK(std::abs(inner(eps, dphil)) <= 1e-9 * scale * l2_norm(dphil));
  const Field jp = apply_J_prime(phil, p.sigma);
  CHECK(std::abs(inner(eps, jp)) <= 1e-9 * scale * l2_norm(jp));
  CHECK(st.eps_h1() <= h1_norm(instability_direction(s.phi, p)) * d1);
}

TEST_CASE("gauge equivariance") {
  const Setup& s = critical_setup();
  Field u = perturbation_direction(s.cd.params(), s.grid, 1e-3);
  ModulationState a = decompose(u, s.frame);
  const double alpha = 0.7;
  const double b = 5 * s.grid->dx();
  ModulationState bst = decompose(spectral_shift(u, b) * std::polar(1.0, alpha), s.frame);
  REQUIRE(a.converged);
  REQUIRE(bst.converged);
  CHECK(std::abs(std::remainder(bst.theta - a.theta - alpha, 2 * M_PI)) < 1e-10);
  CHECK(std::abs(bst.y - a.y - b) < 1e-10);
  CHECK(std::abs(bst.lambda - a.lambda) < 1e-10);
  CHECK(l2_norm(bst.eps - a.eps) < 1e-10);
}

TEST_CASE("outside the tube") {
  const Setup& s = critical_setup();
  CHECK_THROWS_AS(decompose(s.phi * Complex(0.5), s.frame), OutsideTube);
  ModulationTracker tr(s.frame);
  CHECK(tr.push(0.0, s.phi));
  CHECK_FALSE(tr.push(1.0, s.phi * Complex(0.5)));
  CHECK(tr.exited());
  CHECK(tr.exit_time() == 1.0);
}

TEST_CASE("jacobian at the soliton") {
  const Setup& s = critical_setup();
  const SolitonParams p = s.cd.params();
  Eigen::Matrix3d jac = modulation_jacobian(s.phi, s.frame, 0.0, 0.0, 0.0);
  EigenDirection dir;
  dir.mu = s.cd.mu;
  dir.nu = s.cd.nu;
  const Field psi = psi_field(p, dir, s.grid);
  const Field phix = spectral_derivative(s.phi, 1);
  const Field jp = apply_J_prime(s.phi, p.sigma);
  const ConservedSet cs = conserved_set(s.phi, p.sigma);
  const double n0 = std::pow(l2_norm(s.phi), 2), n1 = std::pow(l2_norm(phix), 2);
  Eigen::Matrix3d expect;
  expect << -n0, -2 * cs.P, -inner(psi, Complex(0, 1) * s.phi),  //
      2 * cs.P, n1, -inner(psi, phix),                            //
      0.0, 0.0, -inner(jp, psi);
  CHECK((jac - expect).norm() <= 1e-6 * expect.norm());
  // at the critical speed the determinant collapses to 4 sigma (2 - sigma) w M^2 <J', psi>
  const double det = jac.determinant();
  const double closed = 4 * p.sigma * (2 - p.sigma) * p.omega * cs.M * cs.M * inner(jp, psi);
  CHECK(std::abs(det - closed) <= 1e-5 * std::abs(closed));
}

TEST_CASE("modulation constant") {
  // off the critical speed: finite and grid independent
  ModulationFrame off{SolitonParams{1.5, 1.0, 0.3}, 1.0, 0.0};
  const double a = modulation_constant(off, soliton_grid(off.params, 1024));
  const double b = modulation_constant(off, soliton_grid(off.params, 2048));
  CHECK(std::abs(a) > 1e-4);
  CHECK(std::abs(a - b) <= 1e-8 * std::abs(a));
  // at the critical speed the pairing <i psi, -a0 phi + i phi_x> cancels
  const Setup& s = critical_setup();
  EigenDirection dir;
  dir.mu = s.cd.mu;
  dir.nu = s.cd.nu;
  const Field psi = psi_field(s.cd.params(), dir, s.grid);
  const Field d = instability_direction(s.phi, s.cd.params());
  CHECK(std::abs(inner(Complex(0, 1) * psi, d)) <= 1e-9 * l2_norm(psi) * l2_norm(d));
}

TEST_CASE("tracking an exact travelling wave") {
  SolitonParams p{1.5, 1.0, -0.5};
  ModulationFrame frame{p, std::sqrt(p.omega), 1.0};
  auto g = soliton_grid(p, 1024);
  Field phi = soliton_field(p, g);
  ModulationTracker tr(frame);
  EvolveConfig cfg;
  cfg.dt = 1e-3;
  cfg.T = 2.0;
  cfg.record_every = 100;
  integrate(phi, p.sigma, cfg, {[&](long, double t, const Field& u) { return tr.push(t, u); }});
  const auto& st = tr.rates();
  REQUIRE(st.size() == 21);
  for (const auto& r : st) {
    CHECK(std::abs(r.theta_dot - p.omega) < 1e-4);
    CHECK(std::abs(r.y_dot - p.c) < 1e-4);
    CHECK(std::abs(r.lambda) < 1e-6);
    CHECK(r.max_residual <= 1e-9);
  }
  CHECK(std::abs(st.back().y - p.c * 2.0) < 1e-5);
}
