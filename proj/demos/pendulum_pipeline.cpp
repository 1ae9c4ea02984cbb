// Full pipeline on the default cart-pendulum: linearize, check, place,
// discretize, then compare sampled closed loops over a range of periods.
//
//   ./pendulum_pipeline [csv_dir]
//
// With csv_dir, writes one trajectory CSV per sampling period.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "pendctl/pendctl.hpp"

using namespace pendctl;

namespace {

void print_matrix(const char* name, const Matrix& m) {
  std::printf("%s =\n", name);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    std::printf("  ");
    for (std::size_t c = 0; c < m.cols(); ++c) std::printf("%12.6f", m(r, c));
    std::printf("\n");
  }
}

}  // namespace

int main(int argc, char** argv) {
  const PendulumParams params{};
  const LinearSystem sys = linearize(params);
  print_matrix("A", sys.A);
  print_matrix("B", sys.B);

  for (const auto& e : equilibria(params))
    std::printf("equilibrium %-9s %s\n", to_string(e.which).c_str(), to_string(e.stability).c_str());

  const SystemProperties props = check(sys);
  std::printf("rank ctrb = %zu, rank obsv = %zu\n", props.controllability.rank, props.observability.rank);

  const std::vector<Complex> poles = default_poles();
  const GainSpec cont = place(sys, poles);
  print_matrix("K", cont.K);
  std::printf("placement residual %.3g\n\n", cont.residual);

  SimConfig base;
  base.x0 = initial_condition("x_s");
  base.controller = ContinuousController{cont.K, 0.0, 0.0};

  const std::vector<double> periods{0.05, 0.1, 0.2, 0.3, 0.4, 0.5};
  const auto with = sweep_sampling(base, cont, periods, true);
  const auto without = sweep_sampling(base, cont, periods, false);

  std::printf("%6s  %-28s  %-28s\n", "T", "redesigned K_d", "continuous K, sampled");
  for (std::size_t i = 0; i < periods.size(); ++i) {
    auto cell = [](const PerfMetrics& m) {
      char buf[64];
      if (m.stable)
        std::snprintf(buf, sizeof buf, "peak %.4f  ts %.2f s", m.peak_y1, m.settling_time);
      else
        std::snprintf(buf, sizeof buf, "unstable");
      return std::string(buf);
    };
    std::printf("%6.2f  %-28s  %-28s\n", periods[i], cell(with[i].metrics).c_str(), cell(without[i].metrics).c_str());
  }

  if (argc > 1) {
    const std::filesystem::path dir(argv[1]);
    std::filesystem::create_directories(dir);
    for (const auto& p : with) {
      SimConfig cfg = base;
      SampledController ctrl;
      ctrl.K = p.K;
      ctrl.period = p.period;
      cfg.controller = ctrl;
      const std::string name = "sampled_T" + format_number(p.period, 6) + ".csv";
      std::ofstream out(dir / name);
      write_csv(out, simulate_sampled(cfg));
    }
    std::printf("\nwrote %zu CSV files to %s\n", with.size(), dir.c_str());
  }
  return 0;
}
