#include "doctest.h"

#include <cmath>

#include "gdnls/conserved.hpp"
#include "gdnls/critical.hpp"
#include "gdnls/evolve.hpp"
#include "gdnls/virial.hpp"

using namespace gdnls;

TEST_CASE("cutoff profile") {
  const double R = 2.0;
  CutoffProfile cut(R);
  CHECK(cut.value(0.0) == 0.0);
  CHECK(cut.value(R / 2) == R / 2);
  CHECK(cut.value(R) == doctest::Approx(R).epsilon(1e-15));
  CHECK(cut.value(3 * R) == doctest::Approx(2 * R).epsilon(1e-14));
  CHECK(cut.value(3 * R + 7.0) == 2 * R);
  CHECK(cut.value(-3 * R - 7.0) == -2 * R);
  for (double x = -8.0; x <= 8.0; x += 0.01) {
    CHECK(cut.value(-x) == -cut.value(x));
    CHECK(cut.d1(x) >= 0.0);
    CHECK(cut.d1(x) <= 1.0);
    CHECK(std::abs(cut.value(x)) <= 2 * R);
    // analytic derivatives against central differences
    const double h = 1e-4;
    CHECK(std::abs((cut.value(x + h) - cut.value(x - h)) / (2 * h) - cut.d1(x)) < 1e-7);
    const double fd3 = (cut.d1(x + h) - 2 * cut.d1(x) + cut.d1(x - h)) / (h * h);
    CHECK(std::abs(fd3 - cut.d3(x)) < 1e-6);
  }
  auto g = make_grid(10.0, 256);
  CHECK_THROWS_AS(sample_cutoff(CutoffProfile(3.1), *g, 0.0), CutoffTooLarge);
  CutoffSamples s = sample_cutoff(CutoffProfile(2.5), *g, 0.0);
  CHECK(s.d1.maxCoeff() == 1.0);
  CHECK(s.d1.minCoeff() >= 0.0);
  CHECK_THROWS_AS(CutoffProfile(0.0), InvalidArgument);
}

TEST_CASE("I1 and I2 trivial cases") {
  auto g = make_grid(20.0, 512);
  CutoffProfile cut(4.0);
  Field zero(g);
  CHECK(I1(zero, 0.0, cut) == 0.0);
  CHECK(I2(zero, 0.0, cut) == 0.0);
  Field gauss(g);
  for (Eigen::Index j = 0; j < g->size(); ++j) {
    const double x = g->nodes()[j] - 1.5;
    gauss[j] = std::exp(-x * x);
  }
  CHECK(std::abs(I1(gauss, 1.5, cut)) < 1e-14);
  CHECK(std::abs(I2(gauss, 1.5, cut)) < 1e-14);
}

TEST_CASE("I2 against the closed-form phase derivative") {
  for (double c : {0.0, 0.5}) {
    SolitonParams p{1.5, 1.0, c};
    auto g = soliton_grid(p, 2048);
    Field phi = soliton_field(p, g);
    CutoffProfile cut(3.0);
    const double y = 0.7;
    // Im(u conj(u_x)) = -varphi^2 Theta', Theta' = c/2 - varphi^{2 sigma} / (2 sigma + 2)
    double oracle = 0.0;
    for (Eigen::Index j = 0; j < g->size(); ++j) {
      const double x = g->nodes()[j];
      const double a = amplitude(p, x);
      const double dtheta = c / 2 - amplitude_power(p, x) / (2 * p.sigma + 2);
      oracle += cut.value(g->wrap(x - y)) * (-a * a * dtheta);
    }
    oracle *= g->dx();
    CHECK(std::abs(I2(phi, y, cut) - oracle) < 1e-9);
    CHECK(std::abs(oracle) > 1e-2);
  }
}

TEST_CASE("composite functional") {
  CriticalData cd = critical_constants(1.5, 1.0);
  ModulationFrame frame{cd.params(), cd.mu, cd.nu};
  auto g = soliton_grid(cd.params(), 1024);
  Field phi = soliton_field(cd.params(), g);
  CutoffProfile cut(5.0);
  ModulationState st = decompose(phi, frame);
  const double Ct = virial_lambda_coefficient(frame, g);
  const double I = I_composite(phi, st, cd.omega, Ct, cut);
  CHECK(I == doctest::Approx(-std::sqrt(cd.omega) * I1(phi, 0.0, cut) + I2(phi, 0.0, cut)));
  Field u = perturbation_direction(cd.params(), g, 1e-2);
  ModulationState su = decompose(u, frame);
  const double Iu = I_composite(u, su, cd.omega, Ct, cut);
  CHECK(std::abs(Iu) <= I_bound(u, su.lambda, Ct, cut));
  // gauge invariance
  Field v = u * std::polar(1.0, 1.1);
  ModulationState sv = decompose(v, frame);
  CHECK(std::abs(I_composite(v, sv, cd.omega, Ct, cut) - Iu) < 1e-12);
}

namespace {

double rate_mismatch(const SolitonParams& p, const Field& u0, double spacing, double T,
                     double R, bool nonlinear) {
  EvolveConfig cfg;
  cfg.dt = 1e-3;
  cfg.T = T;
  cfg.nonlinear = nonlinear;
  cfg.record_every = static_cast<int>(std::lround(spacing / cfg.dt));
  const CutoffSamples cut = sample_cutoff(CutoffProfile(R), u0.grid(), 0.0);
  std::vector<VirialRateSample> rec;
  integrate(u0, p.sigma, cfg, {[&](long, double t, const Field& u) {
              rec.push_back(virial_rate_sample(t, u, cut, p.sigma, nonlinear));
              return true;
            }});
  return virial_rate_check(rec).max_mismatch;
}

}  // namespace

TEST_CASE("virial rate identities") {
  // stable-branch soliton that crosses the curved part of the cutoff
  SolitonParams p{1.5, 1.0, -1.0};
  auto g = soliton_grid(p, 1024);
  Field phi = soliton_field(p, g);
  const double a = rate_mismatch(p, phi, 1e-2, 5.0, 2.0, true);
  const double b = rate_mismatch(p, phi, 5e-3, 5.0, 2.0, true);
  CHECK(a <= 1e-4);
  CHECK(a / b > 3.0);

  // linear Schrodinger wave packet
  Field packet(g);
  for (Eigen::Index j = 0; j < g->size(); ++j) {
    const double x = g->nodes()[j];
    packet[j] = std::exp(-x * x / 2) * std::polar(1.0, 0.8 * x);
  }
  CHECK(rate_mismatch(p, packet, 1e-2, 2.0, 1.0, false) <= 1e-4);

  Field zero(g);
  CHECK(rate_mismatch(p, zero, 1e-2, 0.1, 1.0, true) == 0.0);

  std::vector<VirialRateSample> sparse(5);
  for (int i = 0; i < 5; ++i) sparse[i].t = 0.05 * i;
  CHECK_THROWS_AS(virial_rate_check(sparse), InsufficientSampling);
  CHECK_THROWS_AS(virial_rate_check({}), InsufficientSampling);
}

TEST_CASE("A functional") {
  CriticalData cd = critical_constants(1.5, 1.0);
  const SolitonParams p = cd.params();
  auto g = soliton_grid(p, 2048);
  Field phi = soliton_field(p, g);
  const ConservedSet cs = conserved_set(phi, p.sigma);
  CHECK(A_functional(phi, p, cs) == 0.0);
  CHECK(A_functional_energy(phi, p, cs) == 0.0);
  // first-order expansion at the critical speed: dM = o(delta1), dS = o(delta1) and
  // dP = 2 (w - a0^2) M delta1, so the two forms differ only through the 2c dP term
  const double sw = std::sqrt(p.omega), a0 = p.a0();
  const double dP = 2 * (p.omega - a0 * a0) * cs.M;
  auto limit = [&](auto&& A) {
    auto r = [&](double d) { return A(perturbation_direction(p, g, d), p, cs) / d; };
    const double r3 = r(1e-3), r4 = r(1e-4);
    return r4 + (r4 - r3) / 9.0;  // A / delta1 = a + b delta1 + ...
  };
  const double lim_s = limit([](auto&&... a) { return A_functional(a...); });
  const double lim_e = limit([](auto&&... a) { return A_functional_energy(a...); });
  CHECK(std::abs(lim_s - (4 * sw - 2 * p.c) * dP) <= 1e-6 * lim_s);
  CHECK(std::abs(lim_e - (4 * sw + 2 * p.c) * dP) <= 1e-6 * lim_e);
  // 2 (w - a0^2) = 2 w sigma (2 - sigma)
  CHECK(dP == doctest::Approx(2 * p.omega * p.sigma * (2 - p.sigma) * cs.M));
  CHECK(lim_e >= cd.b2);
}

TEST_CASE("rate decomposition on synthetic data") {
  // I' = A + b1 lambda^2 + 0.3 lambda eps + 0.1 eps^2 + 2 / R exactly
  const double A = 0.5, b1 = 0.7, b2 = 0.2, d1 = 1e-2, R = 50.0;
  std::vector<RateSample> s;
  double I = 0.0;
  const double h = 1e-3;
  for (int n = 0; n <= 2000; ++n) {
    const double t = n * h;
    RateSample r{t, I, 0.1 * t, 0.05 * t * t};
    s.push_back(r);
    // integrate I' with the midpoint values so central differences are exact
    const double tm = t + 0.5 * h, lam = 0.1 * tm, eps = 0.05 * tm * tm;
    I += h * (A + b1 * lam * lam + 0.3 * lam * eps + 0.1 * eps * eps + 2.0 / R);
  }
  RateDecompositionReport rep = rate_decomposition_check(s, A, b1, b2, d1, R);
  CHECK(rep.increasing);
  CHECK(rep.frac_quarter == 1.0);
  CHECK(rep.c_le == doctest::Approx(0.3).epsilon(1e-3));
  CHECK(rep.c_ee == doctest::Approx(0.1).epsilon(1e-2));
  CHECK(rep.c_R == doctest::Approx(2.0).epsilon(1e-3));
}
