// Acceptance run: one PASS/FAIL line per criterion. Exit status is the number
// of failed criteria.

#include "instances.hpp"
#include "oracles.hpp"

#include "pwlcyl/audit.hpp"
#include "pwlcyl/commands.hpp"
#include "pwlcyl/cycles.hpp"
#include "pwlcyl/flow.hpp"
#include "pwlcyl/oracle.hpp"
#include "pwlcyl/sampling.hpp"

#include <fmt/core.h>

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <random>
#include <string>
#include <vector>

using namespace pwlcyl;

namespace {

// Tolerances and budgets.
constexpr double kBetaExactTol = 1e-15;
constexpr double kAlphaTol = 1e-4;
constexpr double kKappaTol = 1e-3;
constexpr double kLambdaTol = 1e-3;
constexpr double kCriterionTol = 1e-2;
constexpr double kClosureTol = 1e-6;
constexpr double kContinuumTol = 1e-8;
constexpr double kCenterMapTol = 1e-9;
constexpr double kHalfMapTol = 1e-8;
constexpr double kFixedPointTol = 1e-9;
constexpr double kBudget1 = 1.0, kBudget2 = 2.0, kBudget3 = 30.0, kBudget4 = 120.0;

constexpr char kExample1[] =
    "mode = canonical\n"
    "a_plus = 1/20\nb_plus = 0\nc_plus = -7/16\nd_plus = 5/8\n"
    "a_minus = 1\nb_minus = 1\nc_minus = 1/2\nd_minus = 3/16\nm = 1\n";
constexpr char kExample2[] =
    "mode = canonical\n"
    "a_plus = -1\nb_plus = 1\nc_plus = 0\nd_plus = -1\n"
    "a_minus = -2\nb_minus = -1\nc_minus = 0\nd_minus = -2\nm = 0\n"
    "surface_y_min = 0.25\nsurface_y_max = 3\nsurface_n = 12\n";

struct Outcome {
  bool pass = true;
  std::string detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Outcome criterion1() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const Scenario s = parse_scenario(kExample1);
  const PairInvariants inv = pair_invariants(s.canonical);
  const StructureClass sc = structure_of(inv);
  const double crit = 1 + inv.alpha * inv.alpha * inv.lambda / inv.kappa;
  o.require(inv.pair == std::pair{SpectralType::Sa, SpectralType::Sa}, "pair is not (Sa,Sa)");
  o.require(std::abs(inv.beta - 1.0 / 3.0) <= kBetaExactTol, fmt::format("beta={:.17g}", inv.beta));
  o.require(std::abs(inv.alpha - 1.72732) <= kAlphaTol, fmt::format("alpha={:.17g}", inv.alpha));
  o.require(std::abs(inv.kappa + 0.3333) <= kKappaTol, fmt::format("kappa={:.17g}", inv.kappa));
  o.require(std::abs(inv.lambda - 0.0876) <= kLambdaTol, fmt::format("lambda={:.17g}", inv.lambda));
  o.require(std::abs(crit - 0.216) <= kCriterionTol, fmt::format("criterion={:.17g}", crit));
  o.require(sc.kind == StructureKind::UniqueCylinder, "structure is not UniqueCylinder");

  ScanOptions so;
  so.y_min = 1e-3;
  so.y_max = 50;
  const CylinderScan scan = find_cylinders(s.canonical, so);
  o.require(!scan.continuum && scan.cylinders.size() == 1,
            fmt::format("{} cylinders", scan.cylinders.size()));
  double residual = INFINITY;
  int cycles = 0;
  for (const Cylinder& c : scan.cylinders) {
    const CycleResult cr = find_limit_cycle(s.canonical, c);
    if (cr.kind != CycleKind::Isolated || !cr.cycle) continue;
    ++cycles;
    const NumericReturn r =
        numeric_full_return(s.canonical.to_system(), cr.cycle->x0, c.y0, 2 * cr.cycle->period + 10);
    if (r.defined) residual = std::hypot(r.x_exit - cr.cycle->x0, r.y_exit - c.y0);
  }
  o.require(cycles == 1, fmt::format("{} limit cycles", cycles));
  o.require(residual < kClosureTol, fmt::format("closure residual {:.3g}", residual));
  const double t = seconds_since(t0);
  o.require(t < kBudget1, fmt::format("runtime {:.2f}s", t));
  if (o.pass) {
    o.detail = fmt::format("alpha={:.6f} beta=1/3 kappa={:.6f} lambda={:.6f} crit={:.4f} y0*={:.10f} "
                           "closure={:.2g} ({:.3f}s)",
                           inv.alpha, inv.kappa, inv.lambda, crit, scan.cylinders[0].y0, residual, t);
  }
  return o;
}

Outcome criterion2() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const Scenario s = parse_scenario(kExample2);
  const CanonicalParams& p = s.canonical;
  const PairInvariants inv = pair_invariants(p);
  o.require(inv.pair == std::pair{SpectralType::Ce, SpectralType::Ce}, "pair is not (Ce,Ce)");
  o.require(inv.kappa == 0.0 && inv.lambda == 0.0, "kappa, lambda not zero");
  o.require(structure_of(inv).kind == StructureKind::InfinitelyManyCylinders, "structure");

  ScanOptions so;
  so.nodes = 512;
  const CylinderScan scan = find_cylinders(p, so);
  o.require(scan.continuum && scan.max_abs_q < kContinuumTol && scan.undefined_nodes.empty(),
            fmt::format("continuum={} max|Q|={:.3g}", scan.continuum, scan.max_abs_q));

  double map_err = 0;
  for (int k = 1; k <= 20; ++k) {
    const double y0 = 0.1 * k;
    const HalfReturn h = half_map_upper(p, y0);
    if (!h.defined) {
      map_err = INFINITY;
      break;
    }
    map_err = std::max({map_err, std::abs(h.y_exit + y0), std::abs(h.tau - 2 * std::atan(y0))});
  }
  o.require(map_err < kCenterMapTol, fmt::format("half-map error {:.3g}", map_err));

  std::vector<double> grid;
  for (int k = 0; k < 12; ++k) grid.push_back(0.25 + 0.25 * k);
  const PeriodicSurface surf = periodic_surface(p, grid);
  double worst = 0;
  bool monotone = true;
  for (std::size_t i = 0; i < surf.samples.size(); ++i) {
    const SurfaceSample& ss = surf.samples[i];
    const NumericReturn r = numeric_full_return(p.to_system(), ss.x0, ss.y0, 2 * ss.period + 10);
    worst = std::max(worst, r.defined ? std::hypot(r.x_exit - ss.x0, r.y_exit - ss.y0) : INFINITY);
    if (i > 0 && !(ss.amplitude > surf.samples[i - 1].amplitude)) monotone = false;
  }
  o.require(surf.samples.size() == 12 && worst < kClosureTol,
            fmt::format("surface closure {:.3g}", worst));
  const PeriodicSurface near0 = periodic_surface(p, {1e-1, 1e-2, 1e-3, 1e-4});
  bool shrinking = true;
  for (std::size_t i = 1; i < near0.samples.size(); ++i)
    shrinking = shrinking && near0.samples[i].amplitude < 0.5 * near0.samples[i - 1].amplitude;
  o.require(monotone && shrinking && near0.samples.back().amplitude < 1e-3,
            fmt::format("amplitude not shrinking to 0 (last {:.3g})", near0.samples.back().amplitude));
  const double t = seconds_since(t0);
  o.require(t < kBudget2, fmt::format("runtime {:.2f}s", t));
  if (o.pass) {
    o.detail = fmt::format("max|Q|={:.2g} map err={:.2g} surface closure={:.2g} amp(1e-4)={:.2g} ({:.3f}s)",
                           scan.max_abs_q, map_err, worst, near0.samples.back().amplitude, t);
  }
  return o;
}

Outcome criterion3() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(303);
  double worst = 0;
  std::string worst_where;
  for (int lower = 0; lower < 2; ++lower) {
    for (SpectralType type : kAllSpectralTypes) {
      int got = 0;
      for (int attempt = 0; attempt < 2000 && got < 50; ++attempt) {
        const CanonicalParams p = draw_canonical({type, type}, rng, SignRegime::Admissible);
        const double y0 = testoracle::uniform(rng, 0.05, 3) * (lower ? -1 : 1);
        const HalfReturn h = lower ? half_map_lower(p, y0) : half_map_upper(p, y0);
        if (!h.defined) continue;
        const NumericReturn r = numeric_half_map(p.to_system(), 0.0, y0, h.tau * 2 + 10);
        if (!r.defined) {
          worst = INFINITY;
          worst_where = fmt::format("{}{} undefined numerically", lower ? "X-" : "X+", to_string(type));
          continue;
        }
        ++got;
        const double err = std::max(std::abs(r.tau - h.tau), std::abs(r.y_exit - h.y_exit));
        if (err > worst) {
          worst = err;
          worst_where = fmt::format("{}{}", lower ? "X-" : "X+", to_string(type));
        }
      }
      o.require(got == 50, fmt::format("{}{}: only {} defined draws", lower ? "X-" : "X+",
                                       to_string(type), got));
    }
  }
  o.require(worst < kHalfMapTol, fmt::format("max error {:.3g} at {}", worst, worst_where));
  const double t = seconds_since(t0);
  o.require(t < kBudget3, fmt::format("runtime {:.2f}s", t));
  if (o.pass)
    o.detail = fmt::format("14 clauses x 50 draws, max |analytic-numeric|={:.2g} ({}) ({:.2f}s)", worst,
                           worst_where, t);
  return o;
}

Outcome criterion4() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const AuditReport rep = audit_tables(2024, 5, SignRegime::Admissible);
  int parseable = 0, matched = 0;
  for (const AuditRow& row : rep.rows) {
    if (row.status == TableStatus::Unparseable) continue;
    ++parseable;
    if (row.mismatches == 0 && row.draws.size() >= 5) ++matched;
  }
  for (const std::string& f : rep.failures) std::cout << "  audit: " << f << "\n";
  o.require(matched == parseable, fmt::format("{}/{} parseable rows match", matched, parseable));
  const double t = seconds_since(t0);
  o.require(t < kBudget4, fmt::format("runtime {:.2f}s", t));
  if (o.pass)
    o.detail = fmt::format("{}/{} parseable rows match, {} row(s) reported unparseable ({:.2f}s)", matched,
                           parseable, rep.unparseable_rows, t);
  return o;
}

Outcome criterion5() {
  Outcome o;
  const auto inst = testoracle::contracting_cycles(100, 555);
  o.require(inst.size() == 100, fmt::format("only {} instances", inst.size()));
  double worst = 0;
  for (const auto& c : inst) {
    const auto lim = testoracle::iterate_x_return(c.params, c.cyl, 0.0);
    const double err = lim ? std::abs(*lim - c.cycle.x0) / (1 + std::abs(c.cycle.x0)) : INFINITY;
    worst = std::max(worst, err);
  }
  o.require(worst < kFixedPointTol, fmt::format("max error {:.3g}", worst));
  if (o.pass) o.detail = fmt::format("{} instances, max |x0 - limit|={:.2g}", inst.size(), worst);
  return o;
}

Outcome criterion6() {
  Outcome o;
  // One quasinormal piece per kind, used on both sides.
  struct Case {
    QuasinormalPiece piece;
    TangencyKind upper, lower;
  };
  const std::vector<Case> cases = {
      {{0.3, 0.1, 0.2, 0.0, -0.4, 0.5, 0.1, 0.7, 1.0}, TangencyKind::VisibleFold, TangencyKind::InvisibleFold},
      {{0.3, 0.1, 0.2, 0.0, -0.4, 0.5, 0.1, 0.7, -1.0}, TangencyKind::InvisibleFold, TangencyKind::VisibleFold},
      {{0.3, 0.1, 0.2, 0.0, -0.4, 0.5, 0.1, 0.7, 0.0}, TangencyKind::InvariantLine, TangencyKind::InvariantLine},
      {{0.3, 0.1, 0.2, 0.5, -0.4, 0.5, 0.1, 0.7, 1.0}, TangencyKind::Cusp, TangencyKind::Cusp},
      {{0.3, 0.1, 0.2, 0.5, -0.4, 0.5, 0.1, 0.6, 1.0}, TangencyKind::Singular, TangencyKind::Singular},
  };
  int exercised = 0;
  for (const Case& c : cases) {
    QuasinormalParams q;
    q.upper = c.piece;
    q.lower = c.piece;
    const PiecewiseSystem sys = q.to_system();
    const TangencyKind u = classify_tangency(q, Side::Upper).kind;
    const TangencyKind l = classify_tangency(q, Side::Lower).kind;
    o.require(u == c.upper && u == testoracle::tangency_by_lie(sys, Side::Upper),
              fmt::format("upper {} expected {}", to_string(u), to_string(c.upper)));
    o.require(l == c.lower && l == testoracle::tangency_by_lie(sys, Side::Lower),
              fmt::format("lower {} expected {}", to_string(l), to_string(c.lower)));
    ++exercised;
  }
  std::mt19937_64 rng(66);
  int agree = 0, total = 0;
  for (int n = 0; n < 500; ++n) {
    QuasinormalParams q;
    for (QuasinormalPiece* p : {&q.upper, &q.lower}) {
      p->a11 = testoracle::uniform(rng, -1, 1);
      p->a13 = testoracle::uniform(rng, -1, 1);
      p->a22 = testoracle::uniform(rng, -1, 1);
      p->b1 = testoracle::uniform(rng, -1, 1);
      const int k = n % 5;
      p->a21 = k >= 3 ? testoracle::uniform(rng, 0.2, 1) : 0.0;
      p->b2 = k == 2 ? 0.0 : testoracle::uniform(rng, -1, 1);
      if (k == 4) p->b1 = p->a11 * p->b2 / p->a21;
    }
    const PiecewiseSystem sys = q.to_system();
    for (Side side : {Side::Upper, Side::Lower}) {
      ++total;
      agree += classify_tangency(q, side).kind == testoracle::tangency_by_lie(sys, side);
    }
  }
  o.require(agree == total, fmt::format("{}/{} random pieces agree with Lie derivatives", agree, total));
  if (o.pass)
    o.detail = fmt::format("{} kinds on both sides with the lower flip; {}/{} random pieces agree", exercised,
                           agree, total);
  return o;
}

Outcome criterion7() {
  Outcome o;
  std::mt19937_64 rng(777);
  int violations = 0, with_cylinder = 0;
  std::size_t max_count = 0;
  for (int n = 0; n < 50; ++n) {
    const FocusAnalysis fa = focus_focus_analyze(draw_focus(rng));
    if (fa.theory_violation) {
      ++violations;
      for (const auto& d : fa.diagnostics) std::cout << "  focus draw " << n << ": " << d << "\n";
    }
    max_count = std::max(max_count, fa.scan.isolated_count());
    with_cylinder += fa.scan.isolated_count() == 1;
  }
  o.require(violations == 0 && max_count <= 1,
            fmt::format("{} theory-violation diagnostics, max count {}", violations, max_count));
  if (o.pass)
    o.detail = fmt::format("50 draws, {} with one cylinder, 0 theory-violation diagnostics", with_cylinder);
  return o;
}

Outcome criterion8() {
  Outcome o;
  const Scenario a = parse_scenario(kExample1);
  const Scenario b = parse_scenario(kExample2);
  const std::string first = cmd_classify(a) + cmd_cycles(a) + cmd_classify(b) + cmd_cycles(b);
  bool same = true;
  for (int rep = 0; rep < 3; ++rep) {
    const std::string again = cmd_classify(parse_scenario(kExample1)) + cmd_cycles(parse_scenario(kExample1)) +
                              cmd_classify(parse_scenario(kExample2)) + cmd_cycles(parse_scenario(kExample2));
    same = same && again == first;
  }
  o.require(same, "outputs differ between runs");
  if (o.pass) o.detail = fmt::format("4 runs byte-identical ({} bytes)", first.size());
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"1 Example-1 fixture", criterion1},     {"2 Example-2 fixture", criterion2},
      {"3 Oracle equivalence", criterion3},    {"4 Structure audit", criterion4},
      {"5 Fixed-point law", criterion5},       {"6 Tangency classification", criterion6},
      {"7 Focus-focus", criterion7},           {"8 Determinism", criterion8},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
  }
  return failed;
}
