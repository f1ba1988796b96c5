#include "doctest.h"

#include <cmath>
#include <set>

#include "gdnls/identities.hpp"

using namespace gdnls;

TEST_CASE("relative error") {
  CHECK(relative_error(1.0, 0.0) == 1.0);
  CHECK(relative_error(0.0, 0.0) == 0.0);
  CHECK(relative_error(1.5, 1.0) == doctest::Approx(0.5));
  CHECK(relative_error(-1.0, 2.0) == doctest::Approx(1.5));
}

TEST_CASE("parameter sweep") {
  const auto pts = parameter_sweep();
  CHECK(pts.size() == 27);
  std::set<std::tuple<double, double, double>> seen;
  for (const auto& p : pts) {
    CHECK_NOTHROW(p.validate());
    const double r = std::abs(p.c / (2 * std::sqrt(p.omega)));
    CHECK((r < 1e-15 || std::abs(r - 0.5) < 1e-15));
    seen.insert({p.sigma, p.omega, p.c});
  }
  CHECK(seen.size() == 27);
}

TEST_CASE("identity groups at sample points") {
  for (const SolitonParams p : {SolitonParams{1.5, 1.0, 0.5}, SolitonParams{1.2, 2.0, -1.4}}) {
    const GridPtr g = soliton_grid(p, 4096);
    const auto a = soliton_identities(p, g);
    const auto b = derivative_relations(p);
    const auto c = operator_identities(p, g);
    CHECK(a.size() == 7);
    CHECK(b.size() == 2);
    CHECK(c.size() == 3);
    CHECK(all_pass(a));
    CHECK(all_pass(b));
    CHECK(all_pass(c));
  }
  // too coarse a grid shows up in the residual
  const SolitonParams p{1.8, 1.0, 0.5};
  const auto coarse = soliton_identities(p, soliton_grid(p, 128));
  CHECK_FALSE(all_pass(coarse));
}
