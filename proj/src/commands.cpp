#include "pwlcyl/commands.hpp"

#include "pwlcyl/errors.hpp"

#include <cmath>

namespace pwlcyl {

namespace {

Json complex_json(std::complex<double> z) { return Json::array({z.real(), z.imag()}); }

Json piece_json(const SpectralData& sd) {
  Json j;
  j["type"] = std::string(to_string(sd.type));
  j["lambda1"] = complex_json(sd.lambda1);
  j["lambda2"] = complex_json(sd.lambda2);
  j["lambda3"] = complex_json(sd.lambda3);
  j["s"] = sd.s;
  j["c_eff"] = sd.c_eff;
  j["d_eff"] = sd.d_eff;
  return j;
}

Json canonical_json(const CanonicalParams& p) {
  Json j;
  j["a_plus"] = p.a_plus;
  j["b_plus"] = p.b_plus;
  j["c_plus"] = p.c_plus;
  j["d_plus"] = p.d_plus;
  j["a_minus"] = p.a_minus;
  j["b_minus"] = p.b_minus;
  j["c_minus"] = p.c_minus;
  j["d_minus"] = p.d_minus;
  j["m"] = p.m;
  return j;
}

Json focus_json(const FocusCanonicalParams& f) {
  Json j;
  j["a_plus"] = f.a_plus;
  j["b_plus"] = f.b_plus;
  j["a_minus"] = f.a_minus;
  j["b_minus"] = f.b_minus;
  j["m"] = f.m;
  j["D1"] = f.D1;
  j["D2"] = f.D2;
  j["T1"] = f.T1;
  j["T2"] = f.T2;
  j["a1"] = f.a1;
  j["a2"] = f.a2;
  return j;
}

Json tangency_json(const TangencyReport& r) {
  Json j;
  j["kind"] = std::string(to_string(r.kind));
  j["x_star"] = r.x_star ? Json(*r.x_star) : Json(nullptr);
  return j;
}

/// Focus form of a canonical (Fo,Fo) system: same (x, y, z), a2 = 1, a1 = -1.
FocusCanonicalParams focus_from_canonical(const CanonicalParams& p) {
  FocusCanonicalParams f;
  f.a_plus = p.a_plus;
  f.b_plus = p.b_plus;
  f.a_minus = p.a_minus;
  f.b_minus = p.b_minus;
  f.m = p.m;
  f.T2 = p.c_plus;
  f.D2 = -p.d_plus;
  f.T1 = p.c_minus;
  f.D1 = -p.d_minus;
  f.a2 = 1;
  f.a1 = -1;
  return f;
}

std::string pair_name(std::pair<SpectralType, SpectralType> p) {
  return "(" + std::string(to_string(p.first)) + "," + std::string(to_string(p.second)) + ")";
}

struct Closure {
  bool defined = false;
  double residual = 0;
  double period = 0;
  double multiplier = 0;
  std::string diagnostic;
};

/// Oracle check of a closed orbit through (x0, y0, 0) in `sys` coordinates.
Closure oracle_closure(const PiecewiseSystem& sys, double x0, double y0, double period,
                       bool with_multiplier) {
  Closure c;
  const double horizon = 2.0 * period + 10.0;
  const NumericReturn r = numeric_full_return(sys, x0, y0, horizon);
  c.defined = r.defined;
  c.diagnostic = r.diagnostic;
  if (!r.defined) return c;
  c.residual = std::hypot(r.x_exit - x0, r.y_exit - y0);
  c.period = r.tau;
  if (with_multiplier) c.multiplier = numeric_multiplier(sys, x0, y0, horizon);
  return c;
}

Json closure_json(const Closure& c) {
  Json j;
  j["defined"] = c.defined;
  if (c.defined) {
    j["residual"] = c.residual;
    j["period"] = c.period;
    j["multiplier"] = c.multiplier;
  } else {
    j["diagnostic"] = c.diagnostic;
  }
  return j;
}

Json cylinder_json(const Cylinder& c) {
  Json j;
  j["y0"] = c.y0;
  j["y1"] = c.y1;
  j["tau_plus"] = c.tau_plus;
  j["tau_minus"] = c.tau_minus;
  j["residual"] = c.residual;
  j["tangential"] = c.tangential;
  return j;
}

Json cycle_json(const CycleResult& cr) {
  Json j;
  j["kind"] = std::string(to_string(cr.kind));
  j["rho"] = cr.upper.scale;
  j["B"] = cr.upper.offset;
  j["inv_xi"] = cr.lower.scale;
  j["C"] = cr.lower.offset;
  if (cr.cycle) {
    const LimitCycle& lc = *cr.cycle;
    j["x0"] = lc.x0;
    j["x1"] = lc.x1;
    j["period"] = lc.period;
    j["multiplier"] = lc.multiplier;
    j["attracting"] = lc.attracting;
  }
  if (!cr.note.empty()) j["note"] = cr.note;
  return j;
}

std::vector<double> linear_grid(double lo, double hi, int n) {
  std::vector<double> g;
  if (n == 1) return {lo};
  for (int k = 0; k < n; ++k) g.push_back(lo + (hi - lo) * k / (n - 1));
  return g;
}

void flatten(const Json& j, const std::string& prefix, std::vector<std::vector<std::string>>& rows) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) flatten(v, prefix.empty() ? k : prefix + "." + k, rows);
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], prefix + "." + std::to_string(i), rows);
  } else if (j.is_number_float()) {
    rows.push_back({prefix, format_number(j.get<double>())});
  } else if (j.is_string()) {
    rows.push_back({prefix, j.get<std::string>()});
  } else {
    rows.push_back({prefix, j.dump()});
  }
}

std::string cell(const Json& j) {
  if (j.is_null()) return "";
  if (j.is_number_float()) return format_number(j.get<double>());
  if (j.is_string()) return j.get<std::string>();
  return j.dump();
}

std::string key_value_csv(const Json& j) {
  std::vector<std::vector<std::string>> rows;
  flatten(j, "", rows);
  return to_csv({"key", "value"}, rows);
}

SignRegime regime_of(const ScenarioOptions& o) {
  return o.audit_regime == "extended" ? SignRegime::Extended : SignRegime::Admissible;
}

}  // namespace

ResolvedScenario resolve(const Scenario& s) {
  ResolvedScenario r;
  switch (s.mode) {
    case ScenarioMode::Canonical:
      r.canonical = s.canonical;
      r.original = s.canonical.to_system();
      break;
    case ScenarioMode::Focus:
      s.focus.validate();
      r.focus = s.focus;
      r.original = s.focus.to_system();
      break;
    case ScenarioMode::Quasinormal:
      r.quasinormal = s.quasinormal;
      r.original = s.quasinormal.to_system();
      break;
    case ScenarioMode::Raw:
      r.original = s.raw;
      r.quasinormal = reduce_to_quasinormal(s.raw);
      break;
  }
  if (r.quasinormal) {
    if (r.quasinormal->z_row == ZRow::MinusY)
      r.focus = canonicalize_focus(*r.quasinormal);
    else
      r.canonical = canonicalize(*r.quasinormal);
  }
  if (r.canonical && !r.focus) {
    const PairInvariants inv = pair_invariants(*r.canonical, s.options.eps_disc);
    if (inv.status == TableStatus::FocusFocus) {
      const FocusCanonicalParams f = focus_from_canonical(*r.canonical);
      f.validate();
      r.focus = f;
    }
  }
  return r;
}

ScanOptions scan_options(const ScenarioOptions& o) {
  ScanOptions so;
  so.y_min = o.y_min;
  so.y_max = o.y_max;
  so.nodes = o.grid;
  so.flow.eps_disc = o.eps_disc;
  so.flow.t_max = o.t_max;
  return so;
}

Json classify_json(const Scenario& s) {
  const ResolvedScenario r = resolve(s);
  const double eps = s.options.eps_disc;
  Json j;
  j["command"] = "classify";
  j["mode"] = std::string(to_string(s.mode));
  j["route"] = r.focus_route() ? "focus" : "canonical";
  if (r.quasinormal) {
    Json t;
    t["upper"] = tangency_json(classify_tangency(*r.quasinormal, Side::Upper));
    t["lower"] = tangency_json(classify_tangency(*r.quasinormal, Side::Lower));
    j["tangency"] = t;
  }
  if (r.canonical) j["canonical"] = canonical_json(*r.canonical);
  if (r.focus) j["focus"] = focus_json(*r.focus);

  if (r.focus_route()) {
    const FocusCanonicalParams& f = *r.focus;
    Json pieces;
    pieces["upper"] = piece_json(classify_piece(f.a_plus, f.T2, -f.D2, eps));
    pieces["lower"] = piece_json(classify_piece(f.a_minus, f.T1, -f.D1, eps));
    j["pieces"] = pieces;
    j["pair"] = "(Fo,Fo)";
    j["table_status"] = std::string(to_string(TableStatus::FocusFocus));
    j["structure"] = std::string(to_string(StructureKind::FocusFocus));
    j["note"] = "at most one invariant cylinder";
    return j;
  }

  const PairInvariants inv = pair_invariants(*r.canonical, eps);
  const StructureClass sc = structure_of(inv, eps);
  Json pieces;
  pieces["upper"] = piece_json(inv.upper);
  pieces["lower"] = piece_json(inv.lower);
  j["pieces"] = pieces;
  j["pair"] = pair_name(inv.pair);
  j["swapped"] = inv.swapped;
  j["table_status"] = std::string(to_string(inv.status));
  j["alpha"] = inv.alpha;
  j["beta"] = inv.beta;
  j["kappa"] = inv.kappa;
  j["lambda"] = inv.lambda;
  j["alpha_source"] = inv.alpha_source;
  j["beta_source"] = inv.beta_source;
  if (inv.status == TableStatus::Ok && inv.kappa != 0.0)
    j["criterion"] = 1.0 + inv.alpha * inv.alpha * inv.lambda / inv.kappa;
  else
    j["criterion"] = nullptr;
  j["structure"] = std::string(to_string(sc.kind));
  j["clause"] = sc.clause;
  j["listed"] = sc.listed;
  j["reason"] = sc.reason;
  j["note"] = inv.note;
  return j;
}

Json cycles_json(const Scenario& s) {
  Json j = classify_json(s);
  j["command"] = "cycles";
  const ResolvedScenario r = resolve(s);
  const ScanOptions opts = scan_options(s.options);

  PieceParams up, lo;
  PiecewiseSystem sys;
  CylinderScan scan;
  // Sign taking the scan variable to the y coordinate of `sys` on Sigma.
  double y_sign = 1.0;
  if (r.focus_route()) {
    const FocusAnalysis fa = focus_focus_analyze(*r.focus, opts);
    scan = fa.scan;
    up = focus_upper_piece(*r.focus);
    lo = focus_lower_piece(*r.focus);
    sys = r.focus->to_system();
    y_sign = -1.0;
    j["theory_violation"] = fa.theory_violation;
    Json diag = Json::array();
    for (const auto& d : fa.diagnostics) diag.push_back(d);
    j["focus_diagnostics"] = diag;
  } else {
    scan = find_cylinders(*r.canonical, opts);
    up = upper_piece(*r.canonical);
    lo = lower_piece(*r.canonical);
    sys = r.canonical->to_system();
  }

  Json sj;
  sj["y_min"] = opts.y_min;
  sj["y_max"] = opts.y_max;
  sj["nodes"] = opts.nodes;
  sj["continuum"] = scan.continuum;
  sj["continuum_breaks"] = scan.continuum_breaks;
  sj["max_abs_q"] = scan.max_abs_q;
  sj["undefined_nodes"] = scan.undefined_nodes.size();
  Json diag = Json::array();
  for (const auto& d : scan.diagnostics) diag.push_back(d);
  sj["diagnostics"] = diag;
  j["scan"] = sj;

  Json cyls = Json::array();
  int limit_cycles = 0;
  if (!scan.continuum) {
    for (const Cylinder& c : scan.cylinders) {
      Json cj = cylinder_json(c);
      const CycleResult cr = find_limit_cycle(up, lo, c, opts.flow);
      Json cycle = cycle_json(cr);
      if (cr.kind == CycleKind::Isolated && cr.cycle) {
        ++limit_cycles;
        cycle["oracle"] = closure_json(
            oracle_closure(sys, cr.cycle->x0, y_sign * c.y0, cr.cycle->period, true));
      }
      cj["cycle"] = cycle;
      cyls.push_back(cj);
    }
  }
  j["cylinder_count"] = scan.isolated_count();
  j["cylinders"] = cyls;
  j["limit_cycles"] = limit_cycles;

  if (scan.continuum && r.canonical && !r.focus_route()) {
    Json surf;
    try {
      const auto grid = linear_grid(s.options.surface_y_min, s.options.surface_y_max, s.options.surface_n);
      const PeriodicSurface ps = periodic_surface(*r.canonical, grid, opts.flow);
      Json samples = Json::array();
      bool monotone = true;
      int closed = 0;
      for (std::size_t i = 0; i < ps.samples.size(); ++i) {
        const SurfaceSample& ss = ps.samples[i];
        Json sj2;
        sj2["y0"] = ss.y0;
        sj2["y1"] = ss.y1;
        sj2["kind"] = std::string(to_string(ss.kind));
        sj2["x0"] = ss.x0;
        sj2["x1"] = ss.x1;
        sj2["period"] = ss.period;
        sj2["multiplier"] = ss.multiplier;
        sj2["amplitude"] = ss.amplitude;
        sj2["residual"] = ss.residual;
        if (ss.kind == CycleKind::Isolated) {
          ++closed;
          sj2["oracle"] = closure_json(oracle_closure(sys, ss.x0, ss.y0, ss.period, false));
        }
        if (i > 0 && !(ss.amplitude > ps.samples[i - 1].amplitude)) monotone = false;
        samples.push_back(sj2);
      }
      surf["samples"] = samples;
      surf["periodic_orbits"] = closed;
      surf["continuous"] = ps.continuous;
      surf["amplitude_monotone"] = monotone;
    } catch (const TheoryNotApplicable& e) {
      surf["error"] = e.what();
    }
    j["surface"] = surf;
  }
  return j;
}

OrbitResult orbit_run(const Scenario& s) {
  const ResolvedScenario r = resolve(s);
  const Vec3 p0(s.options.orbit_x0, s.options.orbit_y0, s.options.orbit_z0);
  const double t_end = s.options.t_max > 0 ? s.options.t_max : s.options.orbit_t_end;
  OrbitResult out;
  out.trace = integrate(r.original, p0, t_end);
  const auto& cr = out.trace.crossings;
  for (std::size_t i = 0; i < cr.size() && !out.returned; ++i) {
    for (std::size_t k = i + 1; k < cr.size(); ++k) {
      if (cr[k].from != cr[i].from) continue;
      const double scale = 1.0 + std::abs(cr[i].x) + std::abs(cr[i].y);
      if (std::hypot(cr[k].x - cr[i].x, cr[k].y - cr[i].y) < 1e-7 * scale) {
        out.returned = true;
        break;
      }
    }
  }
  const Termination t = out.trace.termination;
  if (out.returned)
    out.marker = "returned";
  else if (t == Termination::EndTime)
    out.marker = "no-return";
  else
    out.marker = std::string(to_string(t));
  return out;
}

Json sweep_json(const Scenario& s) {
  const ScenarioOptions& o = s.options;
  if (o.sweep_param.empty()) throw InvalidInput("sweep needs a parameter (sweep_param or --param)");
  if (o.sweep_n < 1) throw InvalidInput("sweep needs sweep_n >= 1");
  {
    Scenario probe = s;
    set_parameter(probe, o.sweep_param, o.sweep_from);
  }
  Json j;
  j["command"] = "sweep";
  j["mode"] = std::string(to_string(s.mode));
  j["parameter"] = o.sweep_param;
  j["from"] = o.sweep_from;
  j["to"] = o.sweep_to;
  j["steps"] = o.sweep_n;
  j["seed"] = o.seed;
  Json rows = Json::array();
  for (double v : linear_grid(o.sweep_from, o.sweep_to, o.sweep_n)) {
    Scenario t = s;
    set_parameter(t, o.sweep_param, v);
    Json row;
    row["value"] = v;
    try {
      const Json c = cycles_json(t);
      row["pair"] = c["pair"];
      row["structure"] = c["structure"];
      row["kappa"] = c.contains("kappa") ? c["kappa"] : Json(nullptr);
      row["lambda"] = c.contains("lambda") ? c["lambda"] : Json(nullptr);
      row["criterion"] = c.contains("criterion") ? c["criterion"] : Json(nullptr);
      row["continuum"] = c["scan"]["continuum"];
      row["cylinders"] = c["cylinder_count"];
      row["limit_cycles"] = c["limit_cycles"];
      const Json& cyls = c["cylinders"];
      if (!cyls.empty() && cyls[0]["cycle"].contains("multiplier")) {
        row["y0"] = cyls[0]["y0"];
        row["x0"] = cyls[0]["cycle"]["x0"];
        row["multiplier"] = cyls[0]["cycle"]["multiplier"];
      } else {
        row["y0"] = nullptr;
        row["x0"] = nullptr;
        row["multiplier"] = nullptr;
      }
      row["error"] = nullptr;
    } catch (const TheoryNotApplicable& e) {
      row["error"] = e.what();
    }
    rows.push_back(row);
  }
  j["rows"] = rows;
  return j;
}

Json audit_json(const ScenarioOptions& o) {
  const AuditReport rep = audit_tables(o.seed, o.audit_draws, regime_of(o), scan_options(o));
  Json j;
  j["command"] = "audit-tables";
  j["seed"] = rep.seed;
  j["regime"] = std::string(to_string(rep.regime));
  j["draws_per_row"] = rep.draws_per_row;
  int mismatches = 0;
  Json rows = Json::array();
  for (const AuditRow& row : rep.rows) {
    Json rj;
    rj["pair"] = row.name();
    rj["status"] = std::string(to_string(row.status));
    rj["mismatches"] = row.mismatches;
    mismatches += row.mismatches;
    Json draws = Json::array();
    for (const AuditDraw& d : row.draws) {
      Json dj;
      dj["params"] = canonical_json(d.params);
      dj["table_pair"] = pair_name(d.inv.pair);
      dj["kappa"] = d.inv.kappa;
      dj["lambda"] = d.inv.lambda;
      dj["predicted"] = std::string(to_string(d.predicted.kind));
      dj["observed"] = std::string(to_string(d.observed));
      dj["cylinders"] = d.cylinders;
      dj["match"] = d.match;
      draws.push_back(dj);
    }
    rj["draws"] = draws;
    rows.push_back(rj);
  }
  j["rows"] = rows;
  j["mismatches"] = mismatches;
  j["unparseable_rows"] = rep.unparseable_rows;
  Json failures = Json::array();
  for (const auto& f : rep.failures) failures.push_back(f);
  j["failures"] = failures;
  return j;
}

std::string cmd_classify(const Scenario& s) {
  const Json j = classify_json(s);
  return s.options.format == OutputFormat::Csv ? key_value_csv(j) : to_json_text(j);
}

std::string cmd_cycles(const Scenario& s) {
  const Json j = cycles_json(s);
  return s.options.format == OutputFormat::Csv ? key_value_csv(j) : to_json_text(j);
}

std::string cmd_orbit(const Scenario& s) {
  const OrbitResult r = orbit_run(s);
  if (s.options.format == OutputFormat::Csv) {
    std::vector<std::vector<std::string>> rows;
    rows.reserve(r.trace.points.size());
    for (const OrbitPoint& p : r.trace.points) {
      rows.push_back({format_number(p.t), format_number(p.p.x()), format_number(p.p.y()),
                      format_number(p.p.z()), std::string(to_string(p.piece)), p.crossing ? "1" : "0"});
    }
    std::string out = to_csv({"t", "x", "y", "z", "piece", "crossing"}, rows);
    out += "# termination: " + r.marker + "\n";
    return out;
  }
  Json j;
  j["command"] = "orbit";
  j["termination"] = std::string(to_string(r.trace.termination));
  j["marker"] = r.marker;
  j["returned"] = r.returned;
  if (!r.trace.diagnostic.empty()) j["diagnostic"] = r.trace.diagnostic;
  j["crossings"] = r.trace.crossings.size();
  Json pts = Json::array();
  for (const OrbitPoint& p : r.trace.points) {
    Json pj;
    pj["t"] = p.t;
    pj["x"] = p.p.x();
    pj["y"] = p.p.y();
    pj["z"] = p.p.z();
    pj["piece"] = std::string(to_string(p.piece));
    pj["crossing"] = p.crossing ? 1 : 0;
    pts.push_back(pj);
  }
  j["points"] = pts;
  return to_json_text(j);
}

std::string cmd_sweep(const Scenario& s) {
  const Json j = sweep_json(s);
  if (s.options.format != OutputFormat::Csv) return to_json_text(j);
  const std::vector<std::string> cols = {"value", "pair", "structure", "kappa", "lambda",
                                         "criterion", "continuum", "cylinders", "limit_cycles",
                                         "y0", "x0", "multiplier", "error"};
  std::vector<std::vector<std::string>> rows;
  for (const auto& row : j["rows"]) {
    std::vector<std::string> r;
    for (const auto& c : cols) r.push_back(row.contains(c) ? cell(row[c]) : "");
    rows.push_back(std::move(r));
  }
  return to_csv(cols, rows);
}

std::string cmd_audit(const ScenarioOptions& o) {
  const Json j = audit_json(o);
  if (o.format != OutputFormat::Csv) return to_json_text(j);
  std::vector<std::vector<std::string>> rows;
  for (const auto& row : j["rows"]) {
    int k = 0;
    for (const auto& d : row["draws"]) {
      std::vector<std::string> r = {cell(row["pair"]), cell(row["status"]), std::to_string(k++)};
      for (const char* key : {"a_plus", "b_plus", "c_plus", "d_plus", "a_minus", "b_minus",
                              "c_minus", "d_minus", "m"})
        r.push_back(cell(d["params"][key]));
      for (const char* key : {"table_pair", "kappa", "lambda", "predicted", "observed", "cylinders", "match"})
        r.push_back(cell(d[key]));
      rows.push_back(std::move(r));
    }
  }
  return to_csv({"row", "status", "draw", "a_plus", "b_plus", "c_plus", "d_plus", "a_minus",
                 "b_minus", "c_minus", "d_minus", "m", "table_pair", "kappa", "lambda",
                 "predicted", "observed", "cylinders", "match"},
                rows);
}

}  // namespace pwlcyl
