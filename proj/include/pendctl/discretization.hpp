#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "pendctl/errors.hpp"
#include "pendctl/matrix.hpp"
#include "pendctl/pendulum.hpp"

namespace pendctl {

// Zero-order-hold equivalent: A_d = e^{AT}, B_d = int_0^T e^{A(T - tau)} B dtau,
// C_d = C. Both come out of a single exponential of the augmented block
//   [[A, B], [0, 0]] * T  ->  [[A_d, B_d], [0, I]]
// which needs no inverse of A (the pendulum's A is singular).
inline LinearSystem zoh_discretize(const LinearSystem& sys, double period) {
  if (!(period > 0.0) || !std::isfinite(period)) {
    throw ConfigError("zoh_discretize: sampling period must be positive, got " + std::to_string(period));
  }
  if (sys.is_discrete()) throw ConfigError("zoh_discretize: system is already discrete");
  sys.validate();
  const std::size_t n = sys.order();
  const std::size_t m = sys.B.cols();
  Matrix augmented(n + m, n + m);
  augmented.set_block(0, 0, sys.A * period);
  augmented.set_block(0, n, sys.B * period);
  const Matrix e = mat_exp(augmented);
  LinearSystem d{e.block(0, 0, n, n), e.block(0, n, n, m), sys.C, period};
  require_finite(d.A, "zoh_discretize");
  require_finite(d.B, "zoh_discretize");
  return d;
}

inline std::vector<LinearSystem> sweep_discretize(const LinearSystem& sys, std::span<const double> periods) {
  std::vector<LinearSystem> out;
  out.reserve(periods.size());
  for (double t : periods) out.push_back(zoh_discretize(sys, t));
  return out;
}

}  // namespace pendctl
