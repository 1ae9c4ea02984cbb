#pragma once

// The CLI's subcommands as library functions. Each run_* builds a JSON
// summary; execute() adds file output and maps failures to exit codes
// (0 success, 1 verification/property/library failure, 2 configuration).

#include <functional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>

#include "pendctl/discretization.hpp"
#include "pendctl/errors.hpp"
#include "pendctl/io.hpp"
#include "pendctl/pendulum.hpp"
#include "pendctl/placement.hpp"
#include "pendctl/properties.hpp"
#include "pendctl/simulation.hpp"

namespace pendctl {

inline constexpr int kExitSuccess = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;

class StageFailure : public Error {
 public:
  StageFailure(std::string stage, int exit_code, const std::string& message)
      : Error(stage + ": " + message), stage_(std::move(stage)), exit_code_(exit_code) {}
  [[nodiscard]] const std::string& stage() const noexcept { return stage_; }
  [[nodiscard]] int exit_code() const noexcept { return exit_code_; }

 private:
  std::string stage_;
  int exit_code_;
};

template <typename F>
auto in_stage(std::string_view stage, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const StageFailure&) {
    throw;
  } catch (const ConfigError& e) {
    throw StageFailure(std::string(stage), kExitConfig, e.what());
  } catch (const Error& e) {
    throw StageFailure(std::string(stage), kExitFailure, e.what());
  }
}

struct CommandResult {
  json summary;
  bool passed = true;                // verification outcome for check/place
  std::optional<Trajectory> trajectory;
};

inline CommandResult run_linearize(const RunConfig& cfg) {
  const LinearSystem sys = in_stage("linearize", [&] { return linearize(cfg.params); });
  json eq = json::array();
  for (const auto& e : equilibria(cfg.params)) {
    eq.push_back({{"equilibrium", to_string(e.which)}, {"state", to_json(e.state)}, {"stability", to_string(e.stability)}});
  }
  json system = to_json(sys);
  system["equilibria"] = std::move(eq);
  return {{{"config", to_json(cfg)}, {"system", std::move(system)}}, true, std::nullopt};
}

inline CommandResult run_check(const RunConfig& cfg, const LinearSystem& sys) {
  const SystemProperties props = in_stage("check", [&] { return check(sys, cfg.tolerance); });
  json system = to_json(sys);
  system["controllability"] = to_json(props.controllability);
  system["observability"] = to_json(props.observability);
  const bool ok = props.controllability.holds && props.observability.holds;
  return {{{"config", to_json(cfg)}, {"system", std::move(system)}}, ok, std::nullopt};
}

inline CommandResult run_check(const RunConfig& cfg) {
  return run_check(cfg, in_stage("linearize", [&] { return linearize(cfg.params); }));
}

inline GainSpec design_continuous(const RunConfig& cfg, const LinearSystem& sys) {
  GainSpec g = in_stage("place", [&] { return place(sys, cfg.poles, cfg.tolerance); });
  if (cfg.reference != 0.0) {
    g.psi = in_stage("feedforward", [&] { return feedforward_gain(sys, g.K, cfg.output_index); });
  }
  return g;
}

inline GainSpec design_discrete(const RunConfig& cfg, const LinearSystem& continuous, double period) {
  const LinearSystem d = in_stage("discretize", [&] { return zoh_discretize(continuous, period); });
  const auto z = in_stage("map poles", [&] { return map_poles_s_to_z(cfg.poles, period); });
  GainSpec g = in_stage("place (discrete)", [&] { return place(d, z, cfg.tolerance); });
  if (cfg.reference != 0.0) {
    g.psi = in_stage("feedforward (discrete)", [&] { return feedforward_gain(d, g.K, cfg.output_index); });
  }
  return g;
}

inline CommandResult run_place(const RunConfig& cfg, const LinearSystem& sys) {
  json gains;
  json residuals;
  const GainSpec c = design_continuous(cfg, sys);
  gains["continuous"] = to_json(c);
  residuals["continuous"] = c.residual;
  if (cfg.period) {
    const GainSpec d = design_discrete(cfg, sys, *cfg.period);
    gains["discrete"] = to_json(d);
    residuals["discrete"] = d.residual;
  }
  return {{{"config", to_json(cfg)}, {"system", to_json(sys)}, {"gains", gains}, {"residuals", residuals}},
          true,
          std::nullopt};
}

inline CommandResult run_place(const RunConfig& cfg) {
  return run_place(cfg, in_stage("linearize", [&] { return linearize(cfg.params); }));
}

inline std::vector<double> requested_periods(const RunConfig& cfg, const char* stage) {
  if (!cfg.periods.empty()) return cfg.periods;
  if (cfg.period) return {*cfg.period};
  throw StageFailure(stage, kExitConfig, "no sampling period given (set T or Ts)");
}

inline CommandResult run_discretize(const RunConfig& cfg) {
  const LinearSystem sys = in_stage("linearize", [&] { return linearize(cfg.params); });
  const auto periods = requested_periods(cfg, "discretize");
  const auto systems = in_stage("discretize", [&] { return sweep_discretize(sys, periods); });
  json discrete = json::object();
  for (const auto& d : systems) discrete[format_number(*d.sample_period, 12)] = to_json(d);
  json system{{"continuous", to_json(sys)}, {"discrete", std::move(discrete)}};
  return {{{"config", to_json(cfg)}, {"system", std::move(system)}}, true, std::nullopt};
}

inline SimConfig sim_config(const RunConfig& cfg) {
  SimConfig s;
  s.plant = cfg.plant;
  s.params = cfg.params;
  s.x0 = cfg.initial.state;
  s.t_final = cfg.t_final;
  s.step = cfg.step;
  s.divergence_bound = cfg.divergence_bound;
  return s;
}

// Without T: continuous feedback. With T: sampled feedback using the
// redesigned discrete gain, or the continuous gain when redesign is off.
inline CommandResult run_simulate(const RunConfig& cfg) {
  const LinearSystem sys = in_stage("linearize", [&] { return linearize(cfg.params); });
  const GainSpec cont = design_continuous(cfg, sys);
  SimConfig sim = sim_config(cfg);
  json gains{{"continuous", to_json(cont)}};
  json residuals{{"continuous", cont.residual}};
  if (cfg.period) {
    SampledController ctrl;
    ctrl.period = *cfg.period;
    ctrl.reference = cfg.reference;
    if (cfg.redesign) {
      const GainSpec d = design_discrete(cfg, sys, *cfg.period);
      gains["discrete"] = to_json(d);
      residuals["discrete"] = d.residual;
      ctrl.K = d.K;
      ctrl.psi = d.psi.value_or(0.0);
    } else {
      ctrl.K = cont.K;
      ctrl.psi = cont.psi.value_or(0.0);
    }
    sim.controller = ctrl;
  } else {
    sim.controller = ContinuousController{cont.K, cont.psi.value_or(0.0), cfg.reference};
  }
  Trajectory traj = in_stage("simulate", [&] { return simulate(sim); });
  const PerfMetrics metrics = evaluate(traj);
  json m = to_json(metrics);
  m["samples"] = traj.size();
  m["terminated_early"] = traj.terminated_early;
  if (traj.terminated_early) m["termination_reason"] = traj.termination_reason;
  m["final_state"] = to_json(traj.states.back());
  return {{{"config", to_json(cfg)}, {"gains", gains}, {"metrics", m}, {"residuals", residuals}},
          true,
          std::move(traj)};
}

inline CommandResult run_sweep(const RunConfig& cfg) {
  const LinearSystem sys = in_stage("linearize", [&] { return linearize(cfg.params); });
  const GainSpec cont = design_continuous(cfg, sys);
  const auto periods = requested_periods(cfg, "sweep");
  SimConfig base = sim_config(cfg);
  base.controller = ContinuousController{cont.K, cont.psi.value_or(0.0), cfg.reference};
  const auto points = in_stage("sweep", [&] { return sweep_sampling(base, cont, periods, cfg.redesign); });
  json table = json::array();
  for (const auto& p : points) {
    json row = to_json(p.metrics);
    row["T"] = p.period;
    row["K"] = to_json(p.K).at(0);
    table.push_back(std::move(row));
  }
  return {{{"config", to_json(cfg)},
           {"gains", {{"continuous", to_json(cont)}}},
           {"metrics", {{"redesign", cfg.redesign}, {"sweep", std::move(table)}}},
           {"residuals", {{"continuous", cont.residual}}}},
          true,
          std::nullopt};
}

inline std::optional<std::function<CommandResult(const RunConfig&)>> find_command(std::string_view name) {
  if (name == "linearize") return [](const RunConfig& c) { return run_linearize(c); };
  if (name == "check") return [](const RunConfig& c) { return run_check(c); };
  if (name == "place") return [](const RunConfig& c) { return run_place(c); };
  if (name == "discretize") return run_discretize;
  if (name == "simulate") return run_simulate;
  if (name == "sweep") return run_sweep;
  return std::nullopt;
}

// Runs a command, prints its JSON summary to `out`, writes the JSON/CSV files
// named in the config, and returns the exit code. A CSV run always gets a
// JSON summary file next to it (csv path + ".json" unless one is named).
inline int execute(const std::function<CommandResult(const RunConfig&)>& command, const RunConfig& cfg,
                   std::ostream& out, std::ostream& err) {
  try {
    CommandResult r = command(cfg);
    const std::string text = r.summary.dump(2) + "\n";
    out << text;
    std::optional<std::string> json_path = cfg.json_out;
    if (cfg.csv_out && r.trajectory) {
      std::ostringstream csv;
      write_csv(csv, *r.trajectory);
      in_stage("write csv", [&] { write_text_file(*cfg.csv_out, csv.str()); });
      if (!json_path) json_path = *cfg.csv_out + ".json";
    }
    if (json_path) in_stage("write json", [&] { write_text_file(*json_path, text); });
    if (!r.passed) {
      err << "verification failed\n";
      return kExitFailure;
    }
    return kExitSuccess;
  } catch (const StageFailure& e) {
    err << "error in stage '" << e.stage() << "': " << e.what() << "\n";
    return e.exit_code();
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

inline int execute(std::string_view name, const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto command = find_command(name);
  if (!command) {
    err << "unknown command '" << name << "'\n";
    return kExitConfig;
  }
  return execute(*command, cfg, out, err);
}

}  // namespace pendctl
