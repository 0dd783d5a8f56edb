#include "pwlcyl/scenario.hpp"

#include "pwlcyl/errors.hpp"

#include "json.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <variant>

namespace pwlcyl {

namespace {

struct Entry {
  std::string key;
  std::variant<double, std::string> value;
  int line = 0;  // 0 for JSON input
};

std::string where(const Entry& e) {
  if (e.line > 0) return "line " + std::to_string(e.line) + ": key '" + e.key + "'";
  return "key '" + e.key + "'";
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::optional<double> parse_plain(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

/// Decimal or p/q fraction.
std::optional<double> parse_number(std::string_view s) {
  const auto slash = s.find('/');
  if (slash == std::string_view::npos) return parse_plain(s);
  const auto num = parse_plain(trim(s.substr(0, slash)));
  const auto den = parse_plain(trim(s.substr(slash + 1)));
  if (!num || !den || *den == 0) return std::nullopt;
  return *num / *den;
}

std::vector<Entry> read_key_value(const std::string& text) {
  std::vector<Entry> out;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw InvalidInput("line " + std::to_string(lineno) + ": expected key = value");
    Entry e;
    e.key = trim(std::string_view(line).substr(0, eq));
    e.line = lineno;
    if (e.key.empty()) throw InvalidInput("line " + std::to_string(lineno) + ": empty key");
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (value.empty()) throw InvalidInput(where(e) + ": empty value");
    if (const auto v = parse_number(value))
      e.value = *v;
    else
      e.value = value;
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<Entry> read_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidInput(std::string("JSON parse error: ") + e.what());
  }
  if (!j.is_object()) throw InvalidInput("JSON scenario must be an object");
  std::vector<Entry> out;
  for (const auto& [k, v] : j.items()) {
    Entry e;
    e.key = k;
    if (v.is_number())
      e.value = v.get<double>();
    else if (v.is_string()) {
      const auto s = v.get<std::string>();
      if (const auto num = parse_number(s))
        e.value = *num;
      else
        e.value = s;
    } else {
      throw InvalidInput(where(e) + ": value must be a number or a string");
    }
    out.push_back(std::move(e));
  }
  return out;
}

double number(const Entry& e) {
  if (const auto* d = std::get_if<double>(&e.value)) {
    if (!std::isfinite(*d)) throw InvalidInput(where(e) + ": value is not finite");
    return *d;
  }
  throw InvalidInput(where(e) + ": expected a number, got '" + std::get<std::string>(e.value) + "'");
}

int integer(const Entry& e) {
  const double d = number(e);
  if (d != std::floor(d) || std::abs(d) > 1e9)
    throw InvalidInput(where(e) + ": expected an integer");
  return static_cast<int>(d);
}

std::string text(const Entry& e) {
  if (const auto* s = std::get_if<std::string>(&e.value)) return *s;
  throw InvalidInput(where(e) + ": expected a string");
}

using Setter = std::function<void(Scenario&, double)>;

std::map<std::string, Setter> parameter_setters(ScenarioMode mode) {
  std::map<std::string, Setter> m;
  switch (mode) {
    case ScenarioMode::Canonical: {
      m["a_plus"] = [](Scenario& s, double v) { s.canonical.a_plus = v; };
      m["b_plus"] = [](Scenario& s, double v) { s.canonical.b_plus = v; };
      m["c_plus"] = [](Scenario& s, double v) { s.canonical.c_plus = v; };
      m["d_plus"] = [](Scenario& s, double v) { s.canonical.d_plus = v; };
      m["a_minus"] = [](Scenario& s, double v) { s.canonical.a_minus = v; };
      m["b_minus"] = [](Scenario& s, double v) { s.canonical.b_minus = v; };
      m["c_minus"] = [](Scenario& s, double v) { s.canonical.c_minus = v; };
      m["d_minus"] = [](Scenario& s, double v) { s.canonical.d_minus = v; };
      m["m"] = [](Scenario& s, double v) { s.canonical.m = v; };
      break;
    }
    case ScenarioMode::Focus: {
      m["a_plus"] = [](Scenario& s, double v) { s.focus.a_plus = v; };
      m["b_plus"] = [](Scenario& s, double v) { s.focus.b_plus = v; };
      m["a_minus"] = [](Scenario& s, double v) { s.focus.a_minus = v; };
      m["b_minus"] = [](Scenario& s, double v) { s.focus.b_minus = v; };
      m["m"] = [](Scenario& s, double v) { s.focus.m = v; };
      m["D1"] = [](Scenario& s, double v) { s.focus.D1 = v; };
      m["D2"] = [](Scenario& s, double v) { s.focus.D2 = v; };
      m["T1"] = [](Scenario& s, double v) { s.focus.T1 = v; };
      m["T2"] = [](Scenario& s, double v) { s.focus.T2 = v; };
      m["a1"] = [](Scenario& s, double v) { s.focus.a1 = v; };
      m["a2"] = [](Scenario& s, double v) { s.focus.a2 = v; };
      break;
    }
    case ScenarioMode::Quasinormal: {
      using F = double QuasinormalPiece::*;
      const std::pair<const char*, F> fields[] = {
          {"a11", &QuasinormalPiece::a11}, {"a12", &QuasinormalPiece::a12},
          {"a13", &QuasinormalPiece::a13}, {"a21", &QuasinormalPiece::a21},
          {"a22", &QuasinormalPiece::a22}, {"a23", &QuasinormalPiece::a23},
          {"a33", &QuasinormalPiece::a33}, {"b1", &QuasinormalPiece::b1},
          {"b2", &QuasinormalPiece::b2}};
      for (const auto& [name, f] : fields) {
        m[std::string(name) + "_plus"] = [f = f](Scenario& s, double v) { s.quasinormal.upper.*f = v; };
        m[std::string(name) + "_minus"] = [f = f](Scenario& s, double v) { s.quasinormal.lower.*f = v; };
      }
      break;
    }
    case ScenarioMode::Raw: {
      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
          const std::string name = "A" + std::to_string(i + 1) + std::to_string(j + 1);
          m[name + "_plus"] = [i, j](Scenario& s, double v) { s.raw.upper.A(i, j) = v; };
          m[name + "_minus"] = [i, j](Scenario& s, double v) { s.raw.lower.A(i, j) = v; };
        }
        const std::string name = "b" + std::to_string(i + 1);
        m[name + "_plus"] = [i](Scenario& s, double v) { s.raw.upper.b(i) = v; };
        m[name + "_minus"] = [i](Scenario& s, double v) { s.raw.lower.b(i) = v; };
      }
      break;
    }
  }
  return m;
}

using OptionSetter = std::function<void(Scenario&, const Entry&)>;

const std::map<std::string, OptionSetter>& option_setters() {
  static const std::map<std::string, OptionSetter> m = {
      {"y_min", [](Scenario& s, const Entry& e) { s.options.y_min = number(e); }},
      {"y_max", [](Scenario& s, const Entry& e) { s.options.y_max = number(e); }},
      {"grid", [](Scenario& s, const Entry& e) { s.options.grid = integer(e); }},
      {"t_max", [](Scenario& s, const Entry& e) { s.options.t_max = number(e); }},
      {"eps_disc", [](Scenario& s, const Entry& e) { s.options.eps_disc = number(e); }},
      {"surface_y_min", [](Scenario& s, const Entry& e) { s.options.surface_y_min = number(e); }},
      {"surface_y_max", [](Scenario& s, const Entry& e) { s.options.surface_y_max = number(e); }},
      {"surface_n", [](Scenario& s, const Entry& e) { s.options.surface_n = integer(e); }},
      {"seed",
       [](Scenario& s, const Entry& e) {
         const int v = integer(e);
         if (v < 0) throw InvalidInput(where(e) + ": seed must be non-negative");
         s.options.seed = static_cast<std::uint64_t>(v);
       }},
      {"format",
       [](Scenario& s, const Entry& e) {
         const auto f = text(e);
         if (f == "json")
           s.options.format = OutputFormat::Json;
         else if (f == "csv")
           s.options.format = OutputFormat::Csv;
         else
           throw InvalidInput(where(e) + ": format must be json or csv");
       }},
      {"orbit_x0", [](Scenario& s, const Entry& e) { s.options.orbit_x0 = number(e); }},
      {"orbit_y0", [](Scenario& s, const Entry& e) { s.options.orbit_y0 = number(e); }},
      {"orbit_z0", [](Scenario& s, const Entry& e) { s.options.orbit_z0 = number(e); }},
      {"orbit_t_end", [](Scenario& s, const Entry& e) { s.options.orbit_t_end = number(e); }},
      {"sweep_param", [](Scenario& s, const Entry& e) { s.options.sweep_param = text(e); }},
      {"sweep_from", [](Scenario& s, const Entry& e) { s.options.sweep_from = number(e); }},
      {"sweep_to", [](Scenario& s, const Entry& e) { s.options.sweep_to = number(e); }},
      {"sweep_n", [](Scenario& s, const Entry& e) { s.options.sweep_n = integer(e); }},
      {"audit_draws", [](Scenario& s, const Entry& e) { s.options.audit_draws = integer(e); }},
      {"audit_regime",
       [](Scenario& s, const Entry& e) {
         const auto r = text(e);
         if (r != "admissible" && r != "extended")
           throw InvalidInput(where(e) + ": audit_regime must be admissible or extended");
         s.options.audit_regime = r;
       }},
  };
  return m;
}

ScenarioMode parse_mode(const Entry& e) {
  const auto m = text(e);
  if (m == "canonical") return ScenarioMode::Canonical;
  if (m == "focus") return ScenarioMode::Focus;
  if (m == "quasinormal") return ScenarioMode::Quasinormal;
  if (m == "raw") return ScenarioMode::Raw;
  throw InvalidInput(where(e) + ": unknown mode '" + m + "'");
}

}  // namespace

std::string_view to_string(ScenarioMode m) {
  switch (m) {
    case ScenarioMode::Canonical: return "canonical";
    case ScenarioMode::Focus: return "focus";
    case ScenarioMode::Quasinormal: return "quasinormal";
    case ScenarioMode::Raw: return "raw";
  }
  return "?";
}

std::vector<std::string> mode_keys(ScenarioMode m) {
  std::vector<std::string> keys;
  for (const auto& [k, _] : parameter_setters(m)) keys.push_back(k);
  return keys;
}

Scenario parse_scenario(const std::string& input) {
  const auto first = input.find_first_not_of(" \t\r\n");
  const bool is_json = first != std::string::npos && input[first] == '{';
  const std::vector<Entry> entries = is_json ? read_json(input) : read_key_value(input);

  std::set<std::string> seen;
  for (const auto& e : entries)
    if (!seen.insert(e.key).second) throw InvalidInput(where(e) + ": duplicate key");

  Scenario s;
  for (const auto& e : entries)
    if (e.key == "mode") s.mode = parse_mode(e);

  const auto params = parameter_setters(s.mode);
  const auto& options = option_setters();
  std::set<std::string> assigned;
  for (const auto& e : entries) {
    if (e.key == "mode") continue;
    if (e.key == "z_row") {
      if (s.mode != ScenarioMode::Quasinormal)
        throw InvalidInput(where(e) + ": z_row only applies to quasinormal mode");
      const auto r = text(e);
      if (r == "plus")
        s.quasinormal.z_row = ZRow::PlusY;
      else if (r == "minus")
        s.quasinormal.z_row = ZRow::MinusY;
      else
        throw InvalidInput(where(e) + ": z_row must be plus or minus");
      continue;
    }
    if (const auto it = params.find(e.key); it != params.end()) {
      it->second(s, number(e));
      assigned.insert(e.key);
    } else if (const auto ot = options.find(e.key); ot != options.end()) {
      ot->second(s, e);
    } else {
      throw InvalidInput(where(e) + ": unknown key for " + std::string(to_string(s.mode)) + " mode");
    }
  }

  std::vector<std::string> missing;
  for (const auto& [k, _] : params)
    if (!assigned.count(k)) missing.push_back(k);
  if (!missing.empty()) {
    std::string msg = "missing " + std::string(to_string(s.mode)) + " parameter(s):";
    for (const auto& k : missing) msg += " " + k;
    throw InvalidInput(msg);
  }

  const auto& o = s.options;
  if (!(o.y_min > 0 && o.y_max > o.y_min)) throw InvalidInput("need 0 < y_min < y_max");
  if (o.grid < 8) throw InvalidInput("grid must be at least 8");
  if (o.t_max < 0) throw InvalidInput("t_max must be non-negative");
  if (!(o.surface_y_min > 0 && o.surface_y_max >= o.surface_y_min) || o.surface_n < 1)
    throw InvalidInput("need 0 < surface_y_min <= surface_y_max and surface_n >= 1");
  if (o.orbit_t_end <= 0) throw InvalidInput("orbit_t_end must be positive");
  if (o.audit_draws < 1) throw InvalidInput("audit_draws must be positive");
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot read scenario file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

void set_parameter(Scenario& s, const std::string& key, double value) {
  const auto params = parameter_setters(s.mode);
  const auto it = params.find(key);
  if (it == params.end())
    throw InvalidInput("'" + key + "' is not a " + std::string(to_string(s.mode)) + "-mode parameter");
  it->second(s, value);
}

}  // namespace pwlcyl
