#include "doctest.h"
#include "oracles.hpp"

#include "pwlcyl/oracle.hpp"
#include "pwlcyl/sampling.hpp"

#include <cmath>
#include <random>

using namespace pwlcyl;
using doctest::Approx;
using testoracle::uniform;

namespace {

const CanonicalParams kExample1{0.05, 0, -7.0 / 16, 5.0 / 8, 1, 1, 0.5, 3.0 / 16, 1};
const CanonicalParams kExample2{-1, 1, 0, -1, -2, -1, 0, -2, 0};

}  // namespace

TEST_CASE("trajectory follows the exact circle of the center piece") {
  // Upper piece: y' = -z - 1, z' = y; from (y0, 0): z = cos t + y0 sin t - 1.
  const double y0 = 0.7;
  const OrbitTrace tr = integrate(kExample2, Vec3(0.2, y0, 0), 1.0);
  REQUIRE(tr.points.size() > 5);
  for (const OrbitPoint& p : tr.points) {
    if (p.t <= 0 || p.t >= 2 * std::atan(y0)) continue;
    CHECK(p.p.z() == Approx(std::cos(p.t) + y0 * std::sin(p.t) - 1).epsilon(1e-10));
    CHECK(p.p.y() == Approx(y0 * std::cos(p.t) - std::sin(p.t)).epsilon(1e-10));
  }
}

TEST_CASE("crossing times and points match the exponential oracle") {
  std::mt19937_64 rng(9);
  int compared = 0;
  for (int n = 0; n < 40; ++n) {
    const auto pair = std::pair{kAllSpectralTypes[n % 7], kAllSpectralTypes[(n / 7) % 7]};
    const CanonicalParams p = draw_canonical(pair, rng, SignRegime::Admissible);
    const double y0 = uniform(rng, 0.1, 2);
    const NumericReturn r = numeric_half_map(p, y0, 200);
    const auto b = testoracle::brute_return(p.to_system().upper, Vec3(0, y0, 0), 1, 200);
    CHECK(r.defined == b.ok);
    if (!r.defined || !b.ok) continue;
    CHECK(r.tau == Approx(b.tau).epsilon(1e-9));
    CHECK(r.y_exit == Approx(b.exit.y()).epsilon(1e-9).scale(1));
    CHECK(r.x_exit == Approx(b.exit.x()).epsilon(1e-9).scale(1));
    ++compared;
  }
  CHECK(compared > 20);
}

TEST_CASE("starting on the tangency line terminates with Tangency") {
  const OrbitTrace tr = integrate(kExample1, Vec3(0.3, 0.0, 0.0), 5.0);
  CHECK(tr.termination == Termination::Tangency);
}

TEST_CASE("sliding region terminates with NoSewing") {
  PiecewiseSystem s = kExample2.to_system();
  s.lower.A.row(2) *= -1.0;  // lower piece now pushes toward Sigma from below
  const OrbitTrace tr = integrate(s, Vec3(0, 0.5, 0), 10.0);
  CHECK(tr.termination == Termination::NoSewing);
}

TEST_CASE("escape and crossing limits") {
  OracleOptions o;
  o.escape = 50;
  const CanonicalParams sa{0.9, 1, -0.2, 1.5, 0.9, 1, -0.2, 1.5, 0};
  CHECK(integrate(sa, Vec3(1, 0, 0.5), 100.0, o).termination == Termination::Escape);
  OracleOptions lim;
  lim.max_crossings = 3;
  const OrbitTrace tr = integrate(kExample2, Vec3(0, 1, 0), 100.0, lim);
  CHECK(tr.termination == Termination::CrossingLimit);
  CHECK(tr.crossings.size() == 3);
}

TEST_CASE("center-center orbits close after one full turn") {
  for (double y0 : {0.25, 1.0, 2.5}) {
    const NumericReturn r = numeric_full_return(kExample2.to_system(), 0.0, y0, 50);
    REQUIRE(r.defined);
    CHECK(r.y_exit == Approx(y0).epsilon(1e-10));
  }
}

TEST_CASE("x after a full turn is affine in x0") {
  const PiecewiseSystem s = kExample1.to_system();
  const double y0 = 1.2282217777325453;
  const NumericReturn a = numeric_full_return(s, 0.0, y0, 50);
  const NumericReturn b = numeric_full_return(s, 1.0, y0, 50);
  const NumericReturn c = numeric_full_return(s, 2.0, y0, 50);
  REQUIRE((a.defined && b.defined && c.defined));
  CHECK((c.x_exit - b.x_exit) == Approx(b.x_exit - a.x_exit).epsilon(1e-8));
  CHECK(numeric_multiplier(s, 0.0, y0, 50) == Approx(b.x_exit - a.x_exit).epsilon(1e-6));
}
