#include "doctest.h"

#include <cmath>
#include <random>

#include "gdnls/numerics.hpp"

using namespace gdnls;

namespace {

Field sample(const GridPtr& g, const std::function<Complex(double)>& f) {
  Field out(g);
  for (Eigen::Index j = 0; j < g->size(); ++j) out[j] = f(g->nodes()[j]);
  return out;
}

double sech(double x) { return 1.0 / std::cosh(x); }

}  // namespace

TEST_CASE("grid invariants") {
  auto g = make_grid(40.0, 1024);
  CHECK(g->dx() * 1024 == doctest::Approx(80.0).epsilon(1e-15));
  CHECK(g->nodes()[0] == -40.0);
  CHECK(g->wavenumbers()[g->nyquist()] == doctest::Approx(-M_PI / g->dx()));
  CHECK_THROWS_AS(make_grid(40.0, 1000), InvalidArgument);
  CHECK_THROWS_AS(make_grid(40.0, 8), InvalidArgument);
  CHECK_THROWS_AS(make_grid(-1.0, 64), InvalidArgument);
  CHECK(g->wrap(41.0) == doctest::Approx(-39.0));
  CHECK(g->wrap(-40.0) == doctest::Approx(-40.0));
}

TEST_CASE("spectral derivative") {
  auto g = make_grid(40.0, 1024);
  SUBCASE("constant") {
    Field one = sample(g, [](double) { return Complex(1.0); });
    CHECK(spectral_derivative(one, 1).values().cwiseAbs().maxCoeff() < 1e-14);
  }
  SUBCASE("fourier eigenfunction") {
    const double k = M_PI / 40.0;
    Field f = sample(g, [k](double x) { return std::polar(1.0, k * x); });
    Field d2 = spectral_derivative(f, 2);
    CHECK((d2.values() + k * k * f.values()).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("sech") {
    Field f = sample(g, [](double x) { return Complex(sech(x)); });
    Field d1 = spectral_derivative(f, 1);
    double err = 0.0;
    for (Eigen::Index j = 0; j < g->size(); ++j) {
      const double x = g->nodes()[j];
      err = std::max(err, std::abs(d1[j] - Complex(-sech(x) * std::tanh(x))));
    }
    CHECK(err <= 1e-10);
  }
  SUBCASE("linearity") {
    Field a = sample(g, [](double x) { return Complex(sech(x), 0.3 * sech(2 * x)); });
    Field b = sample(g, [](double x) { return Complex(std::exp(-x * x), 0.0); });
    const Complex al(0.7, -0.2), be(-1.3, 0.4);
    for (int order = 1; order <= 3; ++order) {
      Field lhs = spectral_derivative(al * a + be * b, order);
      Field rhs = al * spectral_derivative(a, order) + be * spectral_derivative(b, order);
      CHECK((lhs.values() - rhs.values()).cwiseAbs().maxCoeff() < 1e-10);
    }
  }
  SUBCASE("errors") {
    Field f(g);
    f[3] = std::nan("");
    CHECK_THROWS_AS(spectral_derivative(f, 1), NonFiniteInput);
    CHECK_THROWS_AS(spectral_derivative(Field(g), 4), InvalidArgument);
  }
}

TEST_CASE("inner products and norms") {
  auto g = make_grid(40.0, 2048);
  Field s = sample(g, [](double x) { return Complex(sech(x)); });
  CHECK(inner(s, s) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(std::abs(inner(s, Complex(0, 1) * s)) < 1e-15);
  CHECK(h1_norm(s) == doctest::Approx(std::sqrt(2.0 + 2.0 / 3.0)).epsilon(1e-10));
  CHECK(h1_norm(Field(g)) == 0.0);
  Field c = sample(g, [](double) { return Complex(3.0, 4.0); });
  CHECK(h1_norm(c) == doctest::Approx(5.0 * std::sqrt(80.0)).epsilon(1e-12));

  std::mt19937 rng(7);
  std::normal_distribution<double> nd;
  Field f = sample(g, [&](double) { return Complex(nd(rng), nd(rng)); });
  Field h = sample(g, [&](double) { return Complex(nd(rng), nd(rng)); });
  const Complex i(0, 1);
  CHECK(inner(f, h) == doctest::Approx(inner(h, f)).epsilon(1e-13));
  CHECK(inner(i * f, h) == doctest::Approx(-inner(f, i * h)).epsilon(1e-13));

  CHECK_THROWS_AS(inner(s, Field(make_grid(40.0, 1024))), GridMismatch);
}

TEST_CASE("cumulative integral") {
  auto g = make_grid(40.0, 2048);
  RealVector v(g->size());
  for (Eigen::Index j = 0; j < g->size(); ++j) v[j] = std::pow(sech(g->nodes()[j]), 2);
  RealVector F = cumulative_integral(*g, v);
  double err = 0.0;
  for (Eigen::Index j = 0; j < g->size(); ++j)
    err = std::max(err, std::abs(F[j] - (std::tanh(g->nodes()[j]) + 1.0)));
  CHECK(err < 1e-12);
}

TEST_CASE("spectral shift by a grid multiple is exact") {
  auto g = make_grid(40.0, 1024);
  Field f = sample(g, [](double x) { return Complex(sech(x), sech(x) * std::tanh(x)); });
  Field s = spectral_shift(f, 5 * g->dx());
  for (Eigen::Index j = 5; j < g->size(); ++j) CHECK(std::abs(s[j] - f[j - 5]) < 1e-13);
}
