#pragma once

// Scenario files: flat key=value text with # comments, or a JSON object.

#include "pwlcyl/model.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace pwlcyl {

enum class ScenarioMode { Canonical, Focus, Quasinormal, Raw };
enum class OutputFormat { Json, Csv };

std::string_view to_string(ScenarioMode m);

struct ScenarioOptions {
  double y_min = 1e-3;
  double y_max = 50;
  int grid = 512;
  /// 0 selects the per-piece default horizon.
  double t_max = 0;
  double eps_disc = 1e-12;
  double surface_y_min = 0.25;
  double surface_y_max = 3;
  int surface_n = 12;
  std::uint64_t seed = 1;
  OutputFormat format = OutputFormat::Json;
  double orbit_x0 = 0, orbit_y0 = 1, orbit_z0 = 0;
  double orbit_t_end = 50;
  std::string sweep_param;
  double sweep_from = 0, sweep_to = 0;
  int sweep_n = 0;
  int audit_draws = 5;
  std::string audit_regime = "admissible";
};

struct Scenario {
  ScenarioMode mode = ScenarioMode::Canonical;
  CanonicalParams canonical;
  FocusCanonicalParams focus;
  QuasinormalParams quasinormal;
  PiecewiseSystem raw;
  ScenarioOptions options;
};

/// Parse scenario text. Throws InvalidInput with a line or key diagnostic on
/// unknown, duplicate, missing or malformed keys. Values accept p/q fractions.
Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::string& path);

/// Parameter keys required by a mode.
std::vector<std::string> mode_keys(ScenarioMode m);

/// Set one named model parameter (sweeps). Throws InvalidInput for names the
/// mode does not have.
void set_parameter(Scenario& s, const std::string& key, double value);

}  // namespace pwlcyl
