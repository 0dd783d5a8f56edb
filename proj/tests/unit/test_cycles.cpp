#include "doctest.h"
#include "instances.hpp"
#include "oracles.hpp"

#include "pwlcyl/cycles.hpp"
#include "pwlcyl/errors.hpp"
#include "pwlcyl/oracle.hpp"
#include "pwlcyl/sampling.hpp"

#include <cmath>
#include <random>

using namespace pwlcyl;
using doctest::Approx;

namespace {

const CanonicalParams kExample1{0.05, 0, -7.0 / 16, 5.0 / 8, 1, 1, 0.5, 3.0 / 16, 1};
const CanonicalParams kExample2{-1, 1, 0, -1, -2, -1, 0, -2, 0};

// Frozen from the exponential-map return defect below.
constexpr double kCylinderY0 = 1.2282217777325453;

double brute_defect(double y0) {
  const PiecewiseSystem s = kExample1.to_system();
  const auto up = testoracle::brute_return(s.upper, Vec3(0, y0, 0), 1, 100);
  REQUIRE(up.ok);
  const auto lo = testoracle::brute_return(s.lower, Vec3(0, up.exit.y(), 0), -1, 100);
  REQUIRE(lo.ok);
  return lo.exit.y() - y0;
}

}  // namespace

TEST_CASE("Example 1 has exactly one cylinder, at the oracle root") {
  double a = 1.0, b = 1.5;
  REQUIRE(brute_defect(a) * brute_defect(b) < 0);
  const double fa = brute_defect(a);
  for (int i = 0; i < 60; ++i) {
    const double m = 0.5 * (a + b);
    if ((brute_defect(m) > 0) == (fa > 0))
      a = m;
    else
      b = m;
  }
  CHECK(0.5 * (a + b) == Approx(kCylinderY0).epsilon(1e-9));

  const CylinderScan scan = find_cylinders(kExample1);
  CHECK_FALSE(scan.continuum);
  REQUIRE(scan.cylinders.size() == 1);
  CHECK(scan.cylinders[0].y0 == Approx(kCylinderY0).epsilon(1e-10));
  CHECK(scan.cylinders[0].residual < 1e-10);
}

TEST_CASE("Example 1 limit cycle closes under the integrator") {
  const CylinderScan scan = find_cylinders(kExample1);
  REQUIRE(scan.cylinders.size() == 1);
  const CycleResult cr = find_limit_cycle(kExample1, scan.cylinders[0]);
  REQUIRE(cr.kind == CycleKind::Isolated);
  const LimitCycle& lc = *cr.cycle;
  const NumericReturn r = numeric_full_return(kExample1.to_system(), lc.x0, lc.cyl.y0, 50);
  REQUIRE(r.defined);
  CHECK(std::hypot(r.x_exit - lc.x0, r.y_exit - lc.cyl.y0) < 1e-8);
  CHECK(r.tau == Approx(lc.period).epsilon(1e-9));
  CHECK(numeric_multiplier(kExample1.to_system(), lc.x0, lc.cyl.y0, 50) ==
        Approx(lc.multiplier).epsilon(1e-6));
  CHECK_FALSE(lc.attracting);
}

TEST_CASE("Example 2 has a continuum of cylinders and a periodic surface") {
  const CylinderScan scan = find_cylinders(kExample2);
  CHECK(scan.continuum);
  CHECK(scan.max_abs_q < 1e-8);
  CHECK(scan.undefined_nodes.empty());

  std::vector<double> grid;
  for (int k = 1; k <= 12; ++k) grid.push_back(0.25 * k);
  const PeriodicSurface surf = periodic_surface(kExample2, grid);
  REQUIRE(surf.samples.size() == 12);
  CHECK(surf.continuous);
  for (std::size_t i = 0; i < surf.samples.size(); ++i) {
    const SurfaceSample& s = surf.samples[i];
    CHECK(s.kind == CycleKind::Isolated);
    const NumericReturn r = numeric_full_return(kExample2.to_system(), s.x0, s.y0, 50);
    REQUIRE(r.defined);
    CHECK(std::hypot(r.x_exit - s.x0, r.y_exit - s.y0) < 1e-8);
    if (i > 0) CHECK(s.amplitude > surf.samples[i - 1].amplitude);
  }
  const PeriodicSurface tiny = periodic_surface(kExample2, {1e-2, 1e-3, 1e-4});
  CHECK(tiny.samples[0].amplitude < 0.05);
  CHECK(tiny.samples[2].amplitude < tiny.samples[1].amplitude);
  CHECK(tiny.samples[1].amplitude < tiny.samples[0].amplitude);
}

TEST_CASE("periodic surface preconditions") {
  CHECK_THROWS_AS(periodic_surface(kExample1, {1.0}), TheoryNotApplicable);
  CanonicalParams p = kExample2;
  p.a_plus = 1;
  CHECK_THROWS_AS(periodic_surface(p, {1.0}), TheoryNotApplicable);
  p.a_plus = p.a_minus = 0;
  CHECK_THROWS_AS(periodic_surface(p, {1.0}), TheoryNotApplicable);
}

TEST_CASE("fixed point of the composed affine maps") {
  const CycleResult r = cycle_from_maps({2.0, 1.0}, {1.0, 3.0});
  CHECK(r.kind == CycleKind::Isolated);
  REQUIRE(r.cycle);
  // x0 = (C - B) / (rho - 1/xi)
  CHECK(r.cycle->x0 == Approx(2.0));
  CHECK(cycle_from_maps({1.0, 1.0}, {1.0, 1.0}).kind == CycleKind::AllClosed);
  CHECK(cycle_from_maps({1.0, 1.0}, {1.0, 2.0}).kind == CycleKind::None);
}

TEST_CASE("closed-form cycle equals the limit of the iterated return") {
  const auto inst = testoracle::contracting_cycles(15, 77);
  REQUIRE(inst.size() == 15);
  for (const auto& c : inst) {
    const auto lim = testoracle::iterate_x_return(c.params, c.cyl, 0.0);
    REQUIRE(lim);
    CHECK(std::abs(*lim - c.cycle.x0) < 1e-9 * (1 + std::abs(c.cycle.x0)));
    CHECK(c.cycle.attracting);
  }
}

TEST_CASE("focus-focus draws have at most one cylinder") {
  std::mt19937_64 rng(31);
  for (int n = 0; n < 20; ++n) {
    const FocusCanonicalParams f = draw_focus(rng);
    const FocusAnalysis fa = focus_focus_analyze(f);
    CHECK_FALSE(fa.theory_violation);
    CHECK(fa.scan.isolated_count() <= 1);
  }
}

TEST_CASE("log grid") {
  const auto g = log_grid(1e-3, 10, 5);
  REQUIRE(g.size() == 5);
  CHECK(g.front() == Approx(1e-3));
  CHECK(g.back() == Approx(10));
  CHECK(g[2] == Approx(0.1));
}
