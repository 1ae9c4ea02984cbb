#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "pendctl/errors.hpp"
#include "pendctl/matrix.hpp"

namespace pendctl {

// Physical constants of the cart-pendulum plant. The pendulum bob is a point
// mass small enough to drop out of the cart equation, so it has no field.
struct PendulumParams {
  double cart_mass = 1.0;   // M, kg
  double length = 0.842;    // L, m
  double friction = 1.0;    // F, kg/s
  double gravity = 9.8093;  // g, m/s^2

  void validate() const {
    const bool finite = std::isfinite(cart_mass) && std::isfinite(length) &&
                        std::isfinite(friction) && std::isfinite(gravity);
    if (!finite || cart_mass <= 0.0 || length <= 0.0 || gravity <= 0.0 || friction < 0.0) {
      throw ConfigError("PendulumParams: require M > 0, L > 0, g > 0, F >= 0 (got M=" +
                        std::to_string(cart_mass) + ", L=" + std::to_string(length) +
                        ", F=" + std::to_string(friction) + ", g=" + std::to_string(gravity) + ")");
    }
  }

  friend bool operator==(const PendulumParams&, const PendulumParams&) = default;
};

// [s, s_dot, phi, phi_dot]. The angle is never wrapped.
using State = std::array<double, 4>;

struct Output {
  double cart_position;  // y1 = s
  double angle;          // y2 = phi
  friend bool operator==(const Output&, const Output&) = default;
};

inline bool is_finite(const State& x) noexcept {
  return std::isfinite(x[0]) && std::isfinite(x[1]) && std::isfinite(x[2]) && std::isfinite(x[3]);
}

inline double norm_inf(const State& x) noexcept {
  return std::max({std::abs(x[0]), std::abs(x[1]), std::abs(x[2]), std::abs(x[3])});
}

inline Matrix to_column(const State& x) { return Matrix::column(x); }

inline State to_state(const Matrix& column) {
  if (column.rows() != 4 || column.cols() != 1) throw DimensionError("to_state: expected 4x1");
  return {column(0, 0), column(1, 0), column(2, 0), column(3, 0)};
}

// (A, B, C) with an optional sampling period; a system is discrete iff it
// carries one.
struct LinearSystem {
  Matrix A;
  Matrix B;
  Matrix C;
  std::optional<double> sample_period;

  [[nodiscard]] std::size_t order() const noexcept { return A.rows(); }
  [[nodiscard]] bool is_discrete() const noexcept { return sample_period.has_value(); }

  void validate() const {
    if (!A.is_square() || A.rows() == 0) throw DimensionError("LinearSystem: A must be square and non-empty");
    if (B.rows() != A.rows()) throw DimensionError("LinearSystem: B rows must match A");
    if (C.cols() != A.cols()) throw DimensionError("LinearSystem: C columns must match A");
    if (sample_period && !(*sample_period > 0.0)) {
      throw ConfigError("LinearSystem: discrete systems need a positive sampling period");
    }
    require_finite(A, "LinearSystem A");
    require_finite(B, "LinearSystem B");
    require_finite(C, "LinearSystem C");
  }
};

// Nonlinear state equations with the pendulum point mass eliminated from the
// cart balance:
//   s''   = -(F/M) s' + u/M
//   phi'' = (g/L) sin(phi) + (F/(ML)) cos(phi) s' - (1/(ML)) cos(phi) u
inline State dynamics(const State& x, double u, const PendulumParams& p) {
  if (!is_finite(x) || !std::isfinite(u)) throw NonFiniteError("dynamics: non-finite state or input");
  const double m = p.cart_mass;
  const double ml = p.cart_mass * p.length;
  const double c = std::cos(x[2]);
  return {
      x[1],
      -(p.friction / m) * x[1] + u / m,
      x[3],
      (p.gravity / p.length) * std::sin(x[2]) + (p.friction / ml) * c * x[1] - c * u / ml,
  };
}

inline Output output(const State& x) { return {x[0], x[2]}; }

enum class Equilibrium { angle_zero, angle_pi };

inline std::string to_string(Equilibrium e) {
  return e == Equilibrium::angle_zero ? "angle-zero" : "angle-pi";
}

// Jacobian linearization about phi = 0 or phi = pi (u = 0, s' = phi' = 0).
// About pi the angle coordinate is shifted, phi' = phi - pi, so cos -> -1 and
// sin -> -phi'.
inline LinearSystem linearize(const PendulumParams& p, Equilibrium eq = Equilibrium::angle_zero) {
  p.validate();
  const double m = p.cart_mass;
  const double ml = p.cart_mass * p.length;
  const double sign = eq == Equilibrium::angle_zero ? 1.0 : -1.0;
  Matrix a{
      {0.0, 1.0, 0.0, 0.0},
      {0.0, -p.friction / m, 0.0, 0.0},
      {0.0, 0.0, 0.0, 1.0},
      {0.0, sign * p.friction / ml, sign * p.gravity / p.length, 0.0},
  };
  Matrix b{{0.0}, {1.0 / m}, {0.0}, {-sign / ml}};
  Matrix c{{1.0, 0.0, 0.0, 0.0}, {0.0, 0.0, 1.0, 0.0}};
  return {std::move(a), std::move(b), std::move(c), std::nullopt};
}

enum class Stability { stable, marginal, unstable };

inline std::string to_string(Stability s) {
  switch (s) {
    case Stability::stable: return "stable";
    case Stability::marginal: return "marginal";
    case Stability::unstable: return "unstable";
  }
  return "unknown";
}

// Classifies a continuous-time A by the real parts of its eigenvalues
// (computed as roots of the characteristic polynomial).
inline Stability classify_continuous(const Matrix& a, double tol = 1e-7) {
  const auto roots = poly_roots(char_poly(a));
  bool marginal = false;
  for (const Complex& r : roots) {
    if (r.real() > tol) return Stability::unstable;
    if (r.real() >= -tol) marginal = true;
  }
  return marginal ? Stability::marginal : Stability::stable;
}

struct EquilibriumPoint {
  Equilibrium which;
  State state;  // any cart position is an equilibrium; s = 0 is reported
  Stability stability;
};

inline std::vector<EquilibriumPoint> equilibria(const PendulumParams& p) {
  p.validate();
  std::vector<EquilibriumPoint> out;
  for (Equilibrium e : {Equilibrium::angle_zero, Equilibrium::angle_pi}) {
    const double phi = e == Equilibrium::angle_zero ? 0.0 : std::numbers::pi;
    out.push_back({e, State{0.0, 0.0, phi, 0.0}, classify_continuous(linearize(p, e).A)});
  }
  return out;
}

}  // namespace pendctl
