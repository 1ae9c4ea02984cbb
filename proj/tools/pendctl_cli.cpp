// pendctl: command-line front end for the cart-pendulum control pipeline.
//
//   pendctl linearize  [--config f.json] [--M .. --L .. --F .. --g ..]
//   pendctl check      [--tol 1e-9]
//   pendctl place      [--poles "-2,-3+0.5i,-3-0.5i,-4"] [--T 0.25]
//   pendctl discretize --T 0.1 | --Ts 0.1,0.2,0.5
//   pendctl simulate   [--initial x_s] [--T 0.1] [--plant nonlinear] [--csv out.csv]
//   pendctl sweep      --Ts 0.05:0.5:0.05 [--redesign | --no-redesign]
//
// A JSON config file supplies defaults; flags given on the command line win.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "pendctl/commands.hpp"
#include "pendctl/io.hpp"

namespace {

struct Flags {
  std::string config;
  double M = 0, L = 0, F = 0, g = 0;
  std::string poles;
  std::string initial;
  double T = 0;
  std::string Ts;
  std::string plant;
  bool redesign = true;
  double tol = 0, t_final = 0, h = 0, divergence_bound = 0, reference = 0;
  std::size_t output_index = 0;
  std::string json_out, csv_out;
};

struct Options {
  CLI::Option *config, *M, *L, *F, *g, *poles, *initial, *T, *Ts, *plant, *redesign, *tol, *t_final, *h,
      *divergence_bound, *reference, *output_index, *json_out, *csv_out;
};

Options add_common(CLI::App* app, Flags& f) {
  Options o{};
  o.config = app->add_option("--config", f.config, "JSON run configuration");
  o.M = app->add_option("--M", f.M, "cart mass (kg)");
  o.L = app->add_option("--L", f.L, "pendulum length (m)");
  o.F = app->add_option("--F", f.F, "friction coefficient (kg/s)");
  o.g = app->add_option("--g", f.g, "gravitational acceleration (m/s^2)");
  o.poles = app->add_option("--poles", f.poles, "desired continuous poles, e.g. \"-2,-3+0.5i,-3-0.5i,-4\"");
  o.initial = app->add_option("--initial", f.initial, "x_u, x_c, x_s or \"s,sdot,phi,phidot\"");
  o.T = app->add_option("--T", f.T, "sampling period (s)");
  o.Ts = app->add_option("--Ts", f.Ts, "sampling periods: list \"a,b,c\" or range \"start:stop:step\"");
  o.plant = app->add_option("--plant", f.plant, "nonlinear or linearized");
  o.redesign = app->add_flag("--redesign,!--no-redesign", f.redesign,
                             "re-place discrete gains at z-mapped poles for each T (default on)");
  o.tol = app->add_option("--tol", f.tol, "relative rank tolerance");
  o.t_final = app->add_option("--t-final", f.t_final, "simulation horizon (s)");
  o.h = app->add_option("--step", f.h, "integrator step (s)");
  o.divergence_bound = app->add_option("--divergence-bound", f.divergence_bound, "abort when ||x||_inf exceeds this");
  o.reference = app->add_option("--reference", f.reference, "constant reference for the feedforward path");
  o.output_index = app->add_option("--output-index", f.output_index, "output tracked by the feedforward (0 = s, 1 = phi)");
  o.json_out = app->add_option("--out", f.json_out, "write the JSON summary here");
  o.csv_out = app->add_option("--csv", f.csv_out, "write the trajectory CSV here (simulate)");
  return o;
}

pendctl::RunConfig resolve(const Flags& f, const Options& o) {
  pendctl::RunConfig cfg = o.config->count() ? pendctl::load_config(f.config) : pendctl::RunConfig{};
  if (o.M->count()) cfg.params.cart_mass = f.M;
  if (o.L->count()) cfg.params.length = f.L;
  if (o.F->count()) cfg.params.friction = f.F;
  if (o.g->count()) cfg.params.gravity = f.g;
  if (o.poles->count()) cfg.poles = pendctl::parse_pole_list(f.poles);
  if (o.initial->count()) {
    if (f.initial.rfind("x_", 0) == 0) {
      cfg.initial = pendctl::InitialCondition::named(f.initial);
    } else {
      const auto parts = pendctl::split(f.initial, ',');
      if (parts.size() != 4) throw pendctl::ConfigError("--initial needs a name or 4 comma-separated values");
      pendctl::State x{};
      for (std::size_t i = 0; i < 4; ++i) x[i] = pendctl::parse_double(parts[i], "initial state");
      cfg.initial = pendctl::InitialCondition::explicit_state(x);
    }
  }
  if (o.T->count()) cfg.period = f.T;
  if (o.Ts->count()) cfg.periods = pendctl::parse_periods(f.Ts);
  if (o.plant->count()) cfg.plant = pendctl::parse_plant(f.plant);
  if (o.redesign->count()) cfg.redesign = f.redesign;
  if (o.tol->count()) cfg.tolerance = f.tol;
  if (o.t_final->count()) cfg.t_final = f.t_final;
  if (o.h->count()) cfg.step = f.h;
  if (o.divergence_bound->count()) cfg.divergence_bound = f.divergence_bound;
  if (o.reference->count()) cfg.reference = f.reference;
  if (o.output_index->count()) cfg.output_index = f.output_index;
  if (o.json_out->count()) cfg.json_out = f.json_out;
  if (o.csv_out->count()) cfg.csv_out = f.csv_out;
  cfg.params.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"State-feedback design and simulation for the inverted pendulum on a cart"};
  app.require_subcommand(1);

  const char* names[] = {"linearize", "check", "place", "discretize", "simulate", "sweep"};
  const char* help[] = {
      "linearize the plant and list its equilibria",
      "controllability and observability rank tests",
      "continuous (and, with --T, discrete) pole placement",
      "ZOH discretization for --T or --Ts",
      "simulate one closed-loop run",
      "sampling-period sweep of the sampled closed loop",
  };
  Flags flags;
  std::vector<std::pair<CLI::App*, Options>> subs;
  for (std::size_t i = 0; i < std::size(names); ++i) {
    CLI::App* sub = app.add_subcommand(names[i], help[i]);
    subs.emplace_back(sub, add_common(sub, flags));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : pendctl::kExitConfig;
  }

  for (const auto& [sub, opts] : subs) {
    if (!sub->parsed()) continue;
    pendctl::RunConfig cfg;
    try {
      cfg = resolve(flags, opts);
    } catch (const pendctl::Error& e) {
      std::cerr << "configuration error: " << e.what() << "\n";
      return pendctl::kExitConfig;
    }
    return pendctl::execute(sub->get_name(), cfg, std::cout, std::cerr);
  }
  return pendctl::kExitConfig;
}
