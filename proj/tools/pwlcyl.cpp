// pwlcyl: classify two-zone piecewise linear systems and construct their
// invariant cylinders and limit cycles.

#include "pwlcyl/commands.hpp"
#include "pwlcyl/errors.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>
#include <optional>

namespace {

enum ExitCode { kOk = 0, kInvalid = 2, kTheory = 3, kNumeric = 4 };

struct Overrides {
  std::string config;
  std::string format;
  std::string out;
  std::optional<double> y_min, y_max, t_max;
  std::optional<std::uint64_t> seed;
  // orbit
  std::optional<double> x0, y0, z0, t_end;
  // sweep
  std::string param;
  std::optional<double> from, to;
  std::optional<int> steps;
  // audit-tables
  std::optional<int> draws;
  std::string regime;
};

void apply(const Overrides& ov, pwlcyl::ScenarioOptions& o) {
  using pwlcyl::InvalidInput;
  if (!ov.format.empty()) {
    if (ov.format == "json")
      o.format = pwlcyl::OutputFormat::Json;
    else if (ov.format == "csv")
      o.format = pwlcyl::OutputFormat::Csv;
    else
      throw InvalidInput("--format must be json or csv");
  }
  if (ov.y_min) o.y_min = *ov.y_min;
  if (ov.y_max) o.y_max = *ov.y_max;
  if (ov.t_max) o.t_max = *ov.t_max;
  if (ov.seed) o.seed = *ov.seed;
  if (ov.x0) o.orbit_x0 = *ov.x0;
  if (ov.y0) o.orbit_y0 = *ov.y0;
  if (ov.z0) o.orbit_z0 = *ov.z0;
  if (ov.t_end) o.orbit_t_end = *ov.t_end;
  if (!ov.param.empty()) o.sweep_param = ov.param;
  if (ov.from) o.sweep_from = *ov.from;
  if (ov.to) o.sweep_to = *ov.to;
  if (ov.steps) o.sweep_n = *ov.steps;
  if (ov.draws) o.audit_draws = *ov.draws;
  if (!ov.regime.empty()) {
    if (ov.regime != "admissible" && ov.regime != "extended")
      throw InvalidInput("--regime must be admissible or extended");
    o.audit_regime = ov.regime;
  }
  if (!(o.y_min > 0 && o.y_max > o.y_min)) throw InvalidInput("need 0 < y-min < y-max");
  if (o.t_max < 0) throw InvalidInput("--t-max must be non-negative");
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw pwlcyl::InvalidInput("cannot write '" + path + "'");
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Invariant cylinders and limit cycles of sewed piecewise linear systems"};
  app.require_subcommand(1);
  Overrides ov;

  auto common = [&](CLI::App* sub, bool need_config) {
    auto* c = sub->add_option("--config", ov.config, "Scenario file (key=value or JSON)");
    if (need_config) c->required()->check(CLI::ExistingFile);
    sub->add_option("--format", ov.format, "Output format: json or csv");
    sub->add_option("--out", ov.out, "Write output to this file instead of stdout");
    sub->add_option("--y-min", ov.y_min, "Lower end of the cylinder scan range");
    sub->add_option("--y-max", ov.y_max, "Upper end of the cylinder scan range");
    sub->add_option("--t-max", ov.t_max, "Return-time horizon (orbit: end time)");
    sub->add_option("--seed", ov.seed, "RNG seed");
  };

  auto* classify = app.add_subcommand("classify", "Spectral types, invariants and predicted structure");
  common(classify, true);
  auto* cycles = app.add_subcommand("cycles", "Invariant cylinders, limit cycles, periodic surfaces");
  common(cycles, true);
  auto* orbit = app.add_subcommand("orbit", "Trace one orbit with the event-detecting integrator");
  common(orbit, true);
  orbit->add_option("--x0", ov.x0, "Initial x");
  orbit->add_option("--y0", ov.y0, "Initial y");
  orbit->add_option("--z0", ov.z0, "Initial z");
  orbit->add_option("--t-end", ov.t_end, "End time when --t-max is not given");
  auto* sweep = app.add_subcommand("sweep", "Classify and count cylinders along a parameter range");
  common(sweep, true);
  sweep->add_option("--param", ov.param, "Parameter key to vary");
  sweep->add_option("--from", ov.from, "First value");
  sweep->add_option("--to", ov.to, "Last value");
  sweep->add_option("--steps", ov.steps, "Number of values");
  auto* audit = app.add_subcommand("audit-tables", "Randomized check of the structure tables");
  common(audit, false);
  audit->add_option("--draws", ov.draws, "Draws per table row");
  audit->add_option("--regime", ov.regime, "admissible or extended");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInvalid;
  }

  try {
    if (audit->parsed()) {
      pwlcyl::ScenarioOptions o;
      if (!ov.config.empty()) o = pwlcyl::load_scenario(ov.config).options;
      apply(ov, o);
      emit(pwlcyl::cmd_audit(o), ov.out);
      return kOk;
    }
    pwlcyl::Scenario s = pwlcyl::load_scenario(ov.config);
    apply(ov, s.options);
    if (classify->parsed())
      emit(pwlcyl::cmd_classify(s), ov.out);
    else if (cycles->parsed())
      emit(pwlcyl::cmd_cycles(s), ov.out);
    else if (orbit->parsed())
      emit(pwlcyl::cmd_orbit(s), ov.out);
    else if (sweep->parsed())
      emit(pwlcyl::cmd_sweep(s), ov.out);
    return kOk;
  } catch (const pwlcyl::InvalidInput& e) {
    std::cerr << "invalid scenario: " << e.what() << "\n";
    return kInvalid;
  } catch (const pwlcyl::TheoryNotApplicable& e) {
    std::cerr << "theory not applicable: " << e.what() << "\n";
    return kTheory;
  } catch (const pwlcyl::NumericFailure& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kNumeric;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kNumeric;
  }
}
