#include "pwlcyl/cycles.hpp"

#include "pwlcyl/errors.hpp"

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>

namespace pwlcyl {

namespace {

struct UndefinedReturn {};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

double max_gap(const PieceFlow& upper, const PieceFlow& lower, const std::vector<double>& grid,
               bool& any_undefined) {
  double m = 0.0;
  any_undefined = false;
  for (double y : grid) {
    const auto q = return_defect(upper, lower, y);
    if (!q) {
      any_undefined = true;
      continue;
    }
    m = std::max(m, std::abs(*q));
  }
  return m;
}

}  // namespace

std::string_view to_string(CycleKind k) {
  switch (k) {
    case CycleKind::Isolated: return "isolated";
    case CycleKind::AllClosed: return "all-closed";
    case CycleKind::None: return "none";
  }
  return "?";
}

std::vector<double> log_grid(double lo, double hi, int n) {
  if (!(lo > 0.0) || !(hi > lo) || n < 1) throw InvalidInput("grid needs 0 < lo < hi and n >= 1");
  std::vector<double> g(static_cast<std::size_t>(n));
  if (n == 1) {
    g[0] = lo;
    return g;
  }
  const double l0 = std::log(lo), l1 = std::log(hi);
  for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] = std::exp(l0 + (l1 - l0) * i / (n - 1));
  g.front() = lo;
  g.back() = hi;
  return g;
}

std::optional<double> return_defect(const PieceFlow& upper, const PieceFlow& lower, double y0) {
  const HalfReturn h1 = upper.half_return(y0);
  if (!h1.defined || !(h1.y_exit * y0 < 0.0)) return std::nullopt;
  const HalfReturn h2 = lower.half_return(h1.y_exit);
  if (!h2.defined) return std::nullopt;
  return h2.y_exit - y0;
}

std::optional<Cylinder> cylinder_at(const PieceFlow& upper, const PieceFlow& lower, double y0) {
  const HalfReturn h1 = upper.half_return(y0);
  if (!h1.defined || !(h1.y_exit * y0 < 0.0)) return std::nullopt;
  const HalfReturn h2 = lower.half_return(h1.y_exit);
  if (!h2.defined) return std::nullopt;
  Cylinder c;
  c.y0 = y0;
  c.y1 = h1.y_exit;
  c.tau_plus = h1.tau;
  c.tau_minus = h2.tau;
  c.residual = std::abs(h2.y_exit - y0);
  return c;
}

CylinderScan scan_cylinders(const PieceParams& upper, const PieceParams& lower,
                            const ScanOptions& opts) {
  if (opts.nodes < 2) throw InvalidInput("cylinder scan needs at least 2 nodes");
  const std::vector<double> grid = log_grid(opts.y_min, opts.y_max, opts.nodes);
  const PieceFlow up(upper, opts.flow), lo(lower, opts.flow);

  CylinderScan scan;
  std::vector<std::optional<double>> q(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    q[i] = return_defect(up, lo, grid[i]);
    if (!q[i]) {
      scan.undefined_nodes.push_back(grid[i]);
      continue;
    }
    scan.max_abs_q = std::max(scan.max_abs_q, std::abs(*q[i]));
  }
  if (!scan.undefined_nodes.empty()) {
    scan.diagnostics.push_back(std::to_string(scan.undefined_nodes.size()) +
                               " grid nodes with undefined half return");
  }

  if (scan.undefined_nodes.empty() && scan.max_abs_q < opts.continuum_tol) {
    scan.continuum = true;
    for (double y : grid) {
      if (auto c = cylinder_at(up, lo, y)) scan.cylinders.push_back(*c);
    }
    PieceParams probe = lower;
    probe.c += opts.continuum_probe;
    bool undefined = false;
    const double gap = max_gap(up, PieceFlow(probe, opts.flow), grid, undefined);
    scan.continuum_breaks = undefined || gap >= opts.continuum_tol;
    if (!scan.continuum_breaks) {
      scan.diagnostics.push_back("continuum persists after perturbing c-");
    }
    return scan;
  }

  const auto Q = [&](double y) {
    const auto v = return_defect(up, lo, y);
    if (!v) throw UndefinedReturn{};
    return *v;
  };

  std::vector<std::pair<double, bool>> roots;  // (y0, tangential)
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    if (!q[i] || !q[i + 1]) continue;
    const double qa = *q[i], qb = *q[i + 1];
    if (qa == 0.0) {
      roots.emplace_back(grid[i], false);
      continue;
    }
    if (qa * qb >= 0.0) continue;
    try {
      std::uintmax_t iters = 200;
      const auto r = boost::math::tools::toms748_solve(
          Q, grid[i], grid[i + 1], qa, qb, boost::math::tools::eps_tolerance<double>(50), iters);
      const double ya = r.first, yb = r.second;
      roots.emplace_back(std::abs(Q(ya)) <= std::abs(Q(yb)) ? ya : yb, false);
    } catch (const UndefinedReturn&) {
      scan.diagnostics.push_back("half return undefined inside the bracket near y0=" + fmt(grid[i]));
    }
  }
  if (q.back() && *q.back() == 0.0) roots.emplace_back(grid.back(), false);

  // Double roots show up as interior minima of |Q| without a sign change.
  for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
    if (!q[i - 1] || !q[i] || !q[i + 1]) continue;
    const double qm = *q[i - 1], q0 = *q[i], qp = *q[i + 1];
    if (qm * q0 <= 0.0 || q0 * qp <= 0.0) continue;
    if (!(std::abs(q0) < std::abs(qm) && std::abs(q0) <= std::abs(qp))) continue;
    try {
      const auto abs_q = [&](double y) { return std::abs(Q(y)); };
      std::uintmax_t iters = 200;
      const auto r = boost::math::tools::brent_find_minima(abs_q, grid[i - 1], grid[i + 1], 52, iters);
      if (r.second < opts.q_tol) {
        roots.emplace_back(r.first, true);
        scan.diagnostics.push_back("tangential root at y0=" + fmt(r.first) +
                                   " (structurally unstable)");
      }
    } catch (const UndefinedReturn&) {
    }
  }

  std::sort(roots.begin(), roots.end());
  for (const auto& [y, tangential] : roots) {
    auto c = cylinder_at(up, lo, y);
    if (!c) continue;
    c->tangential = tangential;
    if (c->residual >= opts.q_tol) {
      scan.diagnostics.push_back("root at y0=" + fmt(y) + " refined only to |Q|=" + fmt(c->residual));
    }
    scan.cylinders.push_back(*c);
  }
  return scan;
}

CylinderScan find_cylinders(const CanonicalParams& p, const ScanOptions& opts,
                            std::optional<StructureKind> expected) {
  CylinderScan scan = scan_cylinders(upper_piece(p), lower_piece(p), opts);
  if (!expected) return scan;
  switch (*expected) {
    case StructureKind::InfinitelyManyCylinders:
      if (!scan.continuum) {
        scan.diagnostics.push_back("expected a continuum of cylinders; max|Q| = " +
                                   fmt(scan.max_abs_q));
      }
      break;
    case StructureKind::Scroll:
      if (scan.continuum || !scan.cylinders.empty()) {
        scan.diagnostics.push_back("expected no cylinder");
      }
      break;
    case StructureKind::UniqueCylinder:
    case StructureKind::FocusFocus:
      if (scan.continuum || scan.cylinders.size() > 1) {
        scan.diagnostics.push_back("expected at most one cylinder");
      }
      break;
    case StructureKind::Unclassified:
      break;
  }
  return scan;
}

CycleResult cycle_from_maps(const AffineXMap& upper, const AffineXMap& lower, double tol) {
  CycleResult r;
  r.upper = upper;
  r.lower = lower;
  const double rho = upper.scale, inv_xi = lower.scale, B = upper.offset, C = lower.offset;
  if (std::abs(rho - inv_xi) <= tol * std::max({1.0, std::abs(rho), std::abs(inv_xi)})) {
    if (std::abs(B - C) <= tol * (1.0 + std::abs(B) + std::abs(C))) {
      r.kind = CycleKind::AllClosed;
      r.note = "every orbit in the cylinder is closed";
    } else {
      r.kind = CycleKind::None;
      r.note = "x drifts by a constant each turn; no closed orbit";
    }
    return r;
  }
  LimitCycle lc;
  lc.rho = rho;
  lc.inv_xi = inv_xi;
  lc.B = B;
  lc.C = C;
  lc.x0 = (C - B) / (rho - inv_xi);
  lc.x1 = rho * lc.x0 + B;
  lc.multiplier = rho / inv_xi;
  lc.attracting = std::abs(lc.multiplier) < 1.0;
  r.kind = CycleKind::Isolated;
  r.cycle = lc;
  return r;
}

CycleResult find_limit_cycle(const PieceParams& upper, const PieceParams& lower, const Cylinder& cyl,
                             const FlowOptions& opts) {
  const PieceFlow up(upper, opts), lo(lower, opts);
  const HalfReturn h1 = up.half_return(cyl.y0);
  CycleResult r;
  if (!h1.defined) {
    r.note = "upper half return undefined: " + h1.diagnostic;
    return r;
  }
  const HalfReturn h2 = lo.half_return(h1.y_exit);
  if (!h2.defined) {
    r.note = "lower half return undefined: " + h2.diagnostic;
    return r;
  }
  const AffineXMap fwd_up = up.x_map(cyl.y0, h1);
  const AffineXMap fwd_lo = lo.x_map(h1.y_exit, h2);
  r = cycle_from_maps(fwd_up, {1.0 / fwd_lo.scale, -fwd_lo.offset / fwd_lo.scale});
  if (r.cycle) {
    r.cycle->cyl = cyl;
    r.cycle->cyl.y1 = h1.y_exit;
    r.cycle->cyl.tau_plus = h1.tau;
    r.cycle->cyl.tau_minus = h2.tau;
    r.cycle->period = h1.tau + h2.tau;
  }
  return r;
}

CycleResult find_limit_cycle(const CanonicalParams& p, const Cylinder& cyl, const FlowOptions& opts) {
  return find_limit_cycle(upper_piece(p), lower_piece(p), cyl, opts);
}

PeriodicSurface periodic_surface(const CanonicalParams& p, const std::vector<double>& y_grid,
                                 const FlowOptions& opts) {
  const StructureClass sc = structure_of(pair_invariants(p, opts.eps_disc), opts.eps_disc);
  if (sc.kind != StructureKind::InfinitelyManyCylinders) {
    throw TheoryNotApplicable("periodic surface needs infinitely many invariant cylinders; structure is " +
                              std::string(to_string(sc.kind)));
  }
  if (p.a_plus == 0.0 && p.a_minus == 0.0) {
    throw TheoryNotApplicable("periodic surface needs (a+)^2 + (a-)^2 != 0");
  }
  if (p.a_plus * p.a_minus < 0.0) {
    throw TheoryNotApplicable("periodic surface needs a+ a- >= 0");
  }

  const PieceParams upper = upper_piece(p), lower = lower_piece(p);
  const PieceFlow up(upper, opts), lo(lower, opts);
  PeriodicSurface surf;
  for (double y0 : y_grid) {
    SurfaceSample s;
    s.y0 = y0;
    const auto cyl = cylinder_at(up, lo, y0);
    if (!cyl) {
      s.kind = CycleKind::None;
      surf.samples.push_back(s);
      surf.continuous = false;
      continue;
    }
    s.y1 = cyl->y1;
    s.residual = cyl->residual;
    const CycleResult cr = find_limit_cycle(upper, lower, *cyl, opts);
    s.kind = cr.kind;
    if (cr.cycle) {
      const LimitCycle& lc = *cr.cycle;
      s.x0 = lc.x0;
      s.x1 = lc.x1;
      s.period = lc.period;
      s.multiplier = lc.multiplier;
      const Vec3 start(lc.x0, y0, 0.0);
      constexpr int kPts = 64;
      for (int k = 1; k <= kPts; ++k) {
        const Vec3 pu = up(cyl->tau_plus * k / kPts, start);
        const Vec3 pl = lo(cyl->tau_minus * k / kPts, Vec3(lc.x1, cyl->y1, 0.0));
        s.amplitude = std::max({s.amplitude, (pu - start).norm(), (pl - start).norm()});
      }
    }
    surf.samples.push_back(s);
  }
  for (std::size_t i = 1; i < surf.samples.size(); ++i) {
    const auto& a = surf.samples[i - 1];
    const auto& b = surf.samples[i];
    const double h = std::abs(b.y0 - a.y0);
    if (std::abs(b.x0 - a.x0) > 10.0 * h || std::abs(b.y1 - a.y1) > 10.0 * h) surf.continuous = false;
  }
  return surf;
}

FocusAnalysis focus_focus_analyze(const FocusCanonicalParams& f, const ScanOptions& opts) {
  f.validate();
  const PieceParams upper = focus_upper_piece(f), lower = focus_lower_piece(f);
  FocusAnalysis out;
  out.scan = scan_cylinders(upper, lower, opts);
  if (out.scan.continuum) {
    out.theory_violation = true;
    out.diagnostics.push_back("continuum of cylinders where at most one is expected");
    return out;
  }
  if (out.scan.cylinders.size() > 1) {
    out.theory_violation = true;
    for (std::size_t i = 1; i < out.scan.cylinders.size(); ++i) {
      out.diagnostics.push_back("extra cylinder at Y0=" + fmt(out.scan.cylinders[i].y0) +
                                " where at most one is expected");
    }
  }
  if (!out.scan.cylinders.empty()) {
    out.cycle = find_limit_cycle(upper, lower, out.scan.cylinders.front(), opts.flow);
  }
  return out;
}

}  // namespace pwlcyl
