#pragma once

// Run configuration, JSON summaries and CSV trajectories.
//
// CSV: header "t,x1,x2,x3,x4,u,y1,y2", 9 significant digits, one row per
// sample, newline-terminated.
// JSON summaries: top-level keys drawn from {config, system, gains, metrics,
// residuals}. Infinite settling times serialize as null.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <optional>
#include <ostream>
#include <regex>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "pendctl/errors.hpp"
#include "pendctl/matrix.hpp"
#include "pendctl/pendulum.hpp"
#include "pendctl/placement.hpp"
#include "pendctl/properties.hpp"
#include "pendctl/simulation.hpp"

namespace pendctl {

using json = nlohmann::json;

// Named initial conditions: large displacement and rotation, critical, and
// near-equilibrium.
inline State initial_condition(const std::string& name) {
  if (name == "x_u") return {7.0, 0.0, std::numbers::pi / 2, 0.0};
  if (name == "x_c") return {5.0, -1.0, std::numbers::pi / 5, 0.2};
  if (name == "x_s") return {0.5, 0.0, 0.3, 0.0};
  throw ConfigError("unknown initial condition '" + name + "' (expected x_u, x_c or x_s)");
}

inline std::vector<Complex> default_poles() { return {{-2.0, 0.0}, {-3.0, 0.5}, {-3.0, -0.5}, {-4.0, 0.0}}; }

struct InitialCondition {
  std::optional<std::string> name;  // set when given by name
  State state{};

  static InitialCondition named(const std::string& n) { return {n, initial_condition(n)}; }
  static InitialCondition explicit_state(const State& x) { return {std::nullopt, x}; }
  friend bool operator==(const InitialCondition&, const InitialCondition&) = default;
};

struct RunConfig {
  PendulumParams params;
  std::vector<Complex> poles = default_poles();
  InitialCondition initial = InitialCondition::named("x_s");
  std::optional<double> period;   // T
  std::vector<double> periods;    // Ts
  PlantKind plant = PlantKind::nonlinear;
  bool redesign = true;
  double tolerance = kDefaultRankTolerance;
  double t_final = 10.0;
  double step = 1e-3;
  double divergence_bound = 1e3;
  double reference = 0.0;
  std::size_t output_index = 0;
  std::optional<std::string> json_out;
  std::optional<std::string> csv_out;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

// --- number / pole text -------------------------------------------------

inline std::string format_number(double v, int digits = 17) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

inline std::string format_pole(Complex p) {
  if (p.imag() == 0.0) return format_number(p.real());
  char buf[96];
  std::snprintf(buf, sizeof buf, "%.17g%+.17gi", p.real(), p.imag());
  return buf;
}

// Accepts "a", "a+bi", "a-bi", "a+i" and "bi".
inline Complex parse_pole(const std::string& text) {
  static const std::regex number(R"(\s*([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)\s*)");
  static const std::regex imag_only(R"(\s*([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?\s*[ij]\s*)");
  static const std::regex full(
      R"(\s*([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)\s*([+-])\s*((?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?\s*[ij]\s*)");
  std::smatch m;
  if (std::regex_match(text, m, number)) return {std::stod(m[1]), 0.0};
  if (std::regex_match(text, m, full)) {
    const double im = m[3].matched ? std::stod(m[3]) : 1.0;
    return {std::stod(m[1]), m[2] == "-" ? -im : im};
  }
  if (std::regex_match(text, m, imag_only)) {
    return {0.0, m[1].matched ? std::stod(m[1]) : 1.0};
  }
  throw ConfigError("cannot parse pole '" + text + "' (expected a, a+bi or a-bi)");
}

inline std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream in(text);
  while (std::getline(in, cur, sep)) parts.push_back(cur);
  return parts;
}

inline std::vector<Complex> parse_pole_list(const std::string& text) {
  std::vector<Complex> poles;
  for (const auto& p : split(text, ',')) poles.push_back(parse_pole(p));
  if (poles.empty()) throw ConfigError("empty pole list");
  return poles;
}

inline double parse_double(const std::string& text, const char* what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ConfigError(std::string("cannot parse ") + what + " '" + text + "'");
  }
  if (used != text.size() || !std::isfinite(v)) {
    throw ConfigError(std::string("cannot parse ") + what + " '" + text + "'");
  }
  return v;
}

// "start:stop:step" (inclusive) or a comma-separated list.
inline std::vector<double> parse_periods(const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.size() == 3) {
    const double start = parse_double(parts[0], "period range start");
    const double stop = parse_double(parts[1], "period range stop");
    const double inc = parse_double(parts[2], "period range step");
    if (!(inc > 0.0) || stop < start) throw ConfigError("bad period range '" + text + "'");
    std::vector<double> out;
    for (int k = 0;; ++k) {
      const double v = start + k * inc;
      if (v > stop + 1e-9 * inc) break;
      out.push_back(std::round(v * 1e12) / 1e12);
    }
    return out;
  }
  if (parts.size() != 1) throw ConfigError("bad period list '" + text + "'");
  std::vector<double> out;
  for (const auto& p : split(text, ',')) out.push_back(parse_double(p, "sampling period"));
  return out;
}

inline PlantKind parse_plant(const std::string& s) {
  if (s == "nonlinear") return PlantKind::nonlinear;
  if (s == "linearized" || s == "linear") return PlantKind::linearized;
  throw ConfigError("unknown plant '" + s + "' (expected nonlinear or linearized)");
}

// --- JSON ----------------------------------------------------------------

inline json to_json(const Matrix& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline json to_json(std::span<const Complex> poles) {
  json a = json::array();
  for (const Complex& p : poles) a.push_back(format_pole(p));
  return a;
}

inline json to_json(const State& x) { return json::array({x[0], x[1], x[2], x[3]}); }

inline json to_json(const LinearSystem& sys) {
  json j{{"A", to_json(sys.A)}, {"B", to_json(sys.B)}, {"C", to_json(sys.C)}};
  j["time_domain"] = sys.is_discrete() ? "discrete" : "continuous";
  if (sys.sample_period) j["T"] = *sys.sample_period;
  return j;
}

inline json to_json(const PropertyReport& r) {
  return {{"matrix", to_json(r.matrix)},
          {"rank", r.rank},
          {"required", r.required},
          {"tolerance", r.tolerance},
          {"holds", r.holds}};
}

inline json to_json(const GainSpec& g) {
  json j{{"poles", to_json(g.desired_poles)},
         {"achieved_poles", to_json(g.achieved_poles)},
         {"K", to_json(g.K).at(0)},
         {"residual", g.residual}};
  j["domain"] = g.sample_period ? "discrete" : "continuous";
  if (g.sample_period) j["T"] = *g.sample_period;
  if (g.psi) j["psi"] = *g.psi;
  return j;
}

inline json to_json(const PerfMetrics& m) {
  json j{{"peak_y1", m.peak_y1}, {"overshoot_y1", m.overshoot_y1}, {"stable", m.stable}};
  j["settling_time"] = std::isfinite(m.settling_time) ? json(m.settling_time) : json(nullptr);
  return j;
}

inline json to_json(const RunConfig& c) {
  json j;
  j["params"] = {{"M", c.params.cart_mass}, {"L", c.params.length}, {"F", c.params.friction}, {"g", c.params.gravity}};
  j["poles"] = to_json(c.poles);
  j["initial"] = c.initial.name ? json(*c.initial.name) : to_json(c.initial.state);
  j["T"] = c.period ? json(*c.period) : json(nullptr);
  j["Ts"] = c.periods;
  j["plant"] = to_string(c.plant);
  j["redesign"] = c.redesign;
  j["tol"] = c.tolerance;
  j["t_final"] = c.t_final;
  j["h"] = c.step;
  j["divergence_bound"] = c.divergence_bound;
  j["reference"] = c.reference;
  j["output_index"] = c.output_index;
  json out = json::object();
  if (c.json_out) out["json"] = *c.json_out;
  if (c.csv_out) out["csv"] = *c.csv_out;
  j["outputs"] = out;
  return j;
}

namespace detail {

template <typename T>
T get_as(const json& j, const char* key) {
  try {
    return j.get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config field '") + key + "': " + e.what());
  }
}

}  // namespace detail

// Overlays the fields present in `j` onto `base`. Unknown keys are rejected.
inline RunConfig config_from_json(const json& j, RunConfig base = {}) {
  using detail::get_as;
  if (!j.is_object()) throw ConfigError("config: expected a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (key == "params") {
      if (!value.is_object()) throw ConfigError("config field 'params' must be an object");
      for (const auto& [pk, pv] : value.items()) {
        const double v = get_as<double>(pv, "params");
        if (pk == "M") base.params.cart_mass = v;
        else if (pk == "L") base.params.length = v;
        else if (pk == "F") base.params.friction = v;
        else if (pk == "g") base.params.gravity = v;
        else throw ConfigError("config: unknown parameter '" + pk + "'");
      }
    } else if (key == "poles") {
      base.poles.clear();
      if (value.is_string()) {
        base.poles = parse_pole_list(value.get<std::string>());
      } else {
        for (const auto& p : get_as<std::vector<json>>(value, "poles")) {
          base.poles.push_back(p.is_number() ? Complex(p.get<double>(), 0.0) : parse_pole(get_as<std::string>(p, "poles")));
        }
      }
    } else if (key == "initial") {
      if (value.is_string()) {
        base.initial = InitialCondition::named(value.get<std::string>());
      } else {
        const auto v = get_as<std::vector<double>>(value, "initial");
        if (v.size() != 4) throw ConfigError("config field 'initial' needs 4 entries");
        base.initial = InitialCondition::explicit_state({v[0], v[1], v[2], v[3]});
      }
    } else if (key == "T") {
      base.period = value.is_null() ? std::nullopt : std::optional<double>(get_as<double>(value, "T"));
    } else if (key == "Ts") {
      base.periods = value.is_string() ? parse_periods(value.get<std::string>())
                                       : get_as<std::vector<double>>(value, "Ts");
    } else if (key == "plant") {
      base.plant = parse_plant(get_as<std::string>(value, "plant"));
    } else if (key == "redesign") {
      base.redesign = get_as<bool>(value, "redesign");
    } else if (key == "tol") {
      base.tolerance = get_as<double>(value, "tol");
    } else if (key == "t_final") {
      base.t_final = get_as<double>(value, "t_final");
    } else if (key == "h") {
      base.step = get_as<double>(value, "h");
    } else if (key == "divergence_bound") {
      base.divergence_bound = get_as<double>(value, "divergence_bound");
    } else if (key == "reference") {
      base.reference = get_as<double>(value, "reference");
    } else if (key == "output_index") {
      base.output_index = get_as<std::size_t>(value, "output_index");
    } else if (key == "outputs") {
      if (value.contains("json")) base.json_out = get_as<std::string>(value["json"], "outputs.json");
      else base.json_out.reset();
      if (value.contains("csv")) base.csv_out = get_as<std::string>(value["csv"], "outputs.csv");
      else base.csv_out.reset();
    } else {
      throw ConfigError("config: unknown key '" + key + "'");
    }
  }
  return base;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

// --- CSV -----------------------------------------------------------------

inline constexpr const char* kCsvHeader = "t,x1,x2,x3,x4,u,y1,y2";

inline void write_csv(std::ostream& out, const Trajectory& traj) {
  out << kCsvHeader << '\n';
  char buf[512];
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const State& x = traj.states[i];
    const Output& y = traj.outputs[i];
    std::snprintf(buf, sizeof buf, "%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g\n", traj.times[i], x[0], x[1], x[2],
                  x[3], traj.inputs[i], y.cart_position, y.angle);
    out << buf;
  }
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << content;
  if (!out) throw ConfigError("failed writing '" + path + "'");
}

}  // namespace pendctl
