#pragma once

#include <cmath>
#include <future>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "pendctl/discretization.hpp"
#include "pendctl/errors.hpp"
#include "pendctl/matrix.hpp"
#include "pendctl/pendulum.hpp"
#include "pendctl/placement.hpp"

namespace pendctl {

enum class PlantKind { nonlinear, linearized };

inline std::string to_string(PlantKind p) { return p == PlantKind::nonlinear ? "nonlinear" : "linearized"; }

// u = -K x + psi * reference, recomputed at every integrator step.
struct ContinuousController {
  Matrix K;
  double psi = 0.0;
  double reference = 0.0;
};

// Same law, evaluated only at t = kT and held in between.
struct SampledController {
  Matrix K;
  double psi = 0.0;
  double reference = 0.0;
  double period = 0.1;
};

using Controller = std::variant<ContinuousController, SampledController>;

struct SimConfig {
  PlantKind plant = PlantKind::nonlinear;
  PendulumParams params;
  Controller controller;
  State x0{};
  double t_final = 10.0;
  double step = 1e-3;
  double divergence_bound = 1e3;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<State> states;
  std::vector<double> inputs;
  std::vector<Output> outputs;
  bool terminated_early = false;
  std::string termination_reason;

  [[nodiscard]] std::size_t size() const noexcept { return times.size(); }
};

struct PerfMetrics {
  double peak_y1 = 0.0;
  double overshoot_y1 = 0.0;
  double settling_time = std::numeric_limits<double>::infinity();
  bool stable = false;
};

// One classical RK4 step with u held constant. Returns nullopt if any stage
// goes non-finite.
template <typename Derivative>
std::optional<State> step_rk4(Derivative&& f, const State& x, double u, double h) {
  if (!(h > 0.0)) throw ConfigError("step_rk4: step must be positive");
  auto axpy = [](const State& a, double s, const State& b) {
    return State{a[0] + s * b[0], a[1] + s * b[1], a[2] + s * b[2], a[3] + s * b[3]};
  };
  try {
    const State k1 = f(x, u);
    const State k2 = f(axpy(x, h / 2, k1), u);
    const State k3 = f(axpy(x, h / 2, k2), u);
    const State k4 = f(axpy(x, h, k3), u);
    State next;
    for (std::size_t i = 0; i < 4; ++i) next[i] = x[i] + h / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
    if (!is_finite(next)) return std::nullopt;
    return next;
  } catch (const NonFiniteError&) {
    return std::nullopt;
  }
}

namespace detail {

inline double feedback(const Matrix& k, double psi, double reference, const State& x) {
  double u = psi * reference;
  for (std::size_t i = 0; i < 4; ++i) u -= k(0, i) * x[i];
  return u;
}

inline void validate(const SimConfig& cfg, const Matrix& k) {
  cfg.params.validate();
  if (!(cfg.step > 0.0) || !(cfg.t_final >= cfg.step) || !std::isfinite(cfg.t_final)) {
    throw ConfigError("simulate: require 0 < h <= t_final");
  }
  if (!(cfg.divergence_bound > 0.0)) throw ConfigError("simulate: divergence bound must be positive");
  if (k.rows() != 1 || k.cols() != 4) throw DimensionError("simulate: K must be 1 x 4");
  require_finite(k, "simulate: K");
  if (!is_finite(cfg.x0)) throw ConfigError("simulate: non-finite initial state");
}

// Derivative of the selected plant; the linearized plant is the angle-zero
// Jacobian model.
class Plant {
 public:
  explicit Plant(const SimConfig& cfg) : kind_(cfg.plant), params_(cfg.params) {
    if (kind_ == PlantKind::linearized) model_ = linearize(params_);
  }

  State operator()(const State& x, double u) const {
    if (kind_ == PlantKind::nonlinear) return dynamics(x, u, params_);
    State dx{};
    for (std::size_t i = 0; i < 4; ++i) {
      double v = model_.B(i, 0) * u;
      for (std::size_t j = 0; j < 4; ++j) v += model_.A(i, j) * x[j];
      dx[i] = v;
    }
    return dx;
  }

 private:
  PlantKind kind_;
  PendulumParams params_;
  LinearSystem model_;
};

// Shared fixed-step loop. `substeps` integrator steps per controller update;
// 1 means continuous feedback.
inline Trajectory run(const SimConfig& cfg, const Matrix& k, double psi, double reference,
                      std::size_t substeps) {
  const Plant plant(cfg);
  const double h = cfg.step;
  const auto steps = static_cast<std::size_t>(std::llround(cfg.t_final / h));

  Trajectory traj;
  traj.times.reserve(steps + 1);
  traj.states.reserve(steps + 1);
  traj.inputs.reserve(steps + 1);
  traj.outputs.reserve(steps + 1);

  State x = cfg.x0;
  double u = 0.0;
  for (std::size_t i = 0;; ++i) {
    if (i % substeps == 0) u = feedback(k, psi, reference, x);
    traj.times.push_back(static_cast<double>(i) * h);
    traj.states.push_back(x);
    traj.inputs.push_back(u);
    traj.outputs.push_back(output(x));
    if (norm_inf(x) > cfg.divergence_bound) {
      traj.terminated_early = true;
      traj.termination_reason = "state norm exceeded divergence bound at t=" + std::to_string(traj.times.back());
      break;
    }
    if (i == steps) break;
    // Continuous feedback is re-evaluated at every RK4 stage; sampled
    // feedback holds u across the stages and substeps.
    const auto next = substeps == 1
                          ? step_rk4([&](const State& s, double) { return plant(s, feedback(k, psi, reference, s)); },
                                     x, u, h)
                          : step_rk4(plant, x, u, h);
    if (!next) {
      traj.terminated_early = true;
      traj.termination_reason = "non-finite state after t=" + std::to_string(traj.times.back());
      break;
    }
    x = *next;
  }
  return traj;
}

}  // namespace detail

inline Trajectory simulate_continuous(const SimConfig& cfg) {
  const auto* ctrl = std::get_if<ContinuousController>(&cfg.controller);
  if (ctrl == nullptr) throw ConfigError("simulate_continuous: configuration holds a sampled controller");
  detail::validate(cfg, ctrl->K);
  return detail::run(cfg, ctrl->K, ctrl->psi, ctrl->reference, 1);
}

inline Trajectory simulate_sampled(const SimConfig& cfg) {
  const auto* ctrl = std::get_if<SampledController>(&cfg.controller);
  if (ctrl == nullptr) throw ConfigError("simulate_sampled: configuration holds a continuous controller");
  detail::validate(cfg, ctrl->K);
  if (!(ctrl->period > 0.0)) throw ConfigError("simulate_sampled: sampling period must be positive");
  const double ratio = ctrl->period / cfg.step;
  const auto substeps = std::llround(ratio);
  if (substeps < 1 || std::abs(static_cast<double>(substeps) * cfg.step - ctrl->period) > 1e-9 * ctrl->period) {
    throw ConfigError("simulate_sampled: integrator step " + std::to_string(cfg.step) +
                      " does not divide sampling period " + std::to_string(ctrl->period));
  }
  return detail::run(cfg, ctrl->K, ctrl->psi, ctrl->reference, static_cast<std::size_t>(substeps));
}

inline Trajectory simulate(const SimConfig& cfg) {
  return std::holds_alternative<ContinuousController>(cfg.controller) ? simulate_continuous(cfg)
                                                                      : simulate_sampled(cfg);
}

// peak_y1: max |y1|. overshoot_y1: largest excursion of y1 past zero on the
// side opposite y1(0), as a fraction of |y1(0)| (0 when y1(0) == 0).
// settling_time: start of the final stretch where ||x||_inf stays within 2%
// of ||x0||_inf; infinite if the last sample is outside the band.
inline PerfMetrics evaluate(const Trajectory& traj) {
  if (traj.size() == 0) throw Error("evaluate: empty trajectory");
  PerfMetrics m;
  const double y0 = traj.outputs.front().cart_position;
  double opposite = 0.0;
  for (const Output& y : traj.outputs) {
    m.peak_y1 = std::max(m.peak_y1, std::abs(y.cart_position));
    if (y0 != 0.0) opposite = std::max(opposite, -std::copysign(1.0, y0) * y.cart_position);
  }
  m.overshoot_y1 = y0 != 0.0 ? std::max(0.0, opposite) / std::abs(y0) : 0.0;

  if (traj.terminated_early) {
    m.stable = false;
    return m;
  }
  const double band = 0.02 * norm_inf(traj.states.front());
  std::optional<std::size_t> last_outside;
  for (std::size_t i = traj.size(); i-- > 0;) {
    if (norm_inf(traj.states[i]) > band) {
      last_outside = i;
      break;
    }
  }
  if (!last_outside) {
    m.settling_time = 0.0;
  } else if (*last_outside + 1 < traj.size()) {
    m.settling_time = traj.times[*last_outside + 1] - traj.times.front();
  }
  m.stable = std::isfinite(m.settling_time);
  return m;
}

struct SweepPoint {
  double period;
  Matrix K;  // gain actually applied
  PerfMetrics metrics;
};

// For each period: sample the plant with either a gain re-placed on the ZOH
// model at the z-mapped poles (redesign) or the continuous gain as is. Entries
// run concurrently and come back in input order.
inline std::vector<SweepPoint> sweep_sampling(const SimConfig& base, const GainSpec& continuous_design,
                                              std::span<const double> periods, bool redesign) {
  if (periods.empty()) throw ConfigError("sweep_sampling: no sampling periods given");
  const LinearSystem model = linearize(base.params);
  const double reference = std::visit([](const auto& c) { return c.reference; }, base.controller);

  auto one = [&](double period) {
    SampledController ctrl;
    ctrl.period = period;
    ctrl.reference = reference;
    if (redesign) {
      const LinearSystem discrete = zoh_discretize(model, period);
      const auto z = map_poles_s_to_z(continuous_design.desired_poles, period);
      ctrl.K = place(discrete, z).K;
      if (reference != 0.0) ctrl.psi = feedforward_gain(discrete, ctrl.K, 0);
    } else {
      ctrl.K = continuous_design.K;
      ctrl.psi = continuous_design.psi.value_or(0.0);
    }
    SimConfig cfg = base;
    cfg.controller = ctrl;
    return SweepPoint{period, ctrl.K, evaluate(simulate_sampled(cfg))};
  };

  std::vector<std::future<SweepPoint>> jobs;
  jobs.reserve(periods.size());
  for (double t : periods) jobs.push_back(std::async(std::launch::async, one, t));
  std::vector<SweepPoint> out;
  out.reserve(periods.size());
  for (auto& j : jobs) out.push_back(j.get());
  return out;
}

}  // namespace pendctl
