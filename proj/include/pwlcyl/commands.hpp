#pragma once

// The five CLI verbs as pure functions from a scenario to a report.

#include "pwlcyl/audit.hpp"
#include "pwlcyl/cycles.hpp"
#include "pwlcyl/oracle.hpp"
#include "pwlcyl/report.hpp"
#include "pwlcyl/scenario.hpp"

#include <optional>
#include <string>

namespace pwlcyl {

/// The scenario brought to the form the analysis runs on. Canonical (Fo,Fo)
/// systems carry both forms and are analyzed on the focus route.
struct ResolvedScenario {
  std::optional<CanonicalParams> canonical;
  std::optional<FocusCanonicalParams> focus;
  std::optional<QuasinormalParams> quasinormal;
  /// The system in the scenario's own coordinates (used for orbit traces).
  PiecewiseSystem original;
  bool focus_route() const { return focus.has_value(); }
};

ResolvedScenario resolve(const Scenario& s);

ScanOptions scan_options(const ScenarioOptions& o);

Json classify_json(const Scenario& s);
Json cycles_json(const Scenario& s);
Json sweep_json(const Scenario& s);
Json audit_json(const ScenarioOptions& o);

struct OrbitResult {
  OrbitTrace trace;
  /// The orbit came back to an earlier crossing point.
  bool returned = false;
  /// "no-return", "returned", or the termination reason.
  std::string marker;
};

OrbitResult orbit_run(const Scenario& s);

/// Rendered command output in the scenario's format.
std::string cmd_classify(const Scenario& s);
std::string cmd_cycles(const Scenario& s);
std::string cmd_orbit(const Scenario& s);
std::string cmd_sweep(const Scenario& s);
std::string cmd_audit(const ScenarioOptions& o);

}  // namespace pwlcyl
