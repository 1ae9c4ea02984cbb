#include "pendctl/pendulum.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

namespace pendctl {
namespace {

constexpr double kPi = std::numbers::pi;

TEST(Dynamics, EquilibriumHasZeroDerivative) {
  const State dx = dynamics({0, 0, 0, 0}, 0.0, PendulumParams{});
  for (double v : dx) EXPECT_EQ(v, 0.0);
}

TEST(Dynamics, HorizontalPendulumFallsAtGOverL) {
  const State dx = dynamics({0, 0, kPi / 2, 0}, 0.0, PendulumParams{});
  EXPECT_EQ(dx[0], 0.0);
  EXPECT_EQ(dx[1], 0.0);
  EXPECT_EQ(dx[2], 0.0);
  EXPECT_NEAR(dx[3], 11.65, 1e-4);
  EXPECT_NEAR(dx[3], 9.8093 / 0.842, 1e-12);
}

TEST(Dynamics, FrictionAndForceCancelWhenFEqualsM) {
  // F = M = 1: the s'' terms -F/M * 1 + 1/M cancel, and so do the phi'' ones.
  const State dx = dynamics({0, 1, 0, 0}, 1.0, PendulumParams{});
  EXPECT_EQ(dx[0], 1.0);
  EXPECT_NEAR(dx[1], 0.0, 1e-15);
  EXPECT_EQ(dx[2], 0.0);
  EXPECT_NEAR(dx[3], 0.0, 1e-15);
}

TEST(Dynamics, RejectsNonFiniteInput) {
  EXPECT_THROW(dynamics({0, NAN, 0, 0}, 0.0, PendulumParams{}), NonFiniteError);
  EXPECT_THROW(dynamics({0, 0, 0, 0}, INFINITY, PendulumParams{}), NonFiniteError);
}

TEST(Dynamics, PeriodicInAngle) {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> d(-3.0, 3.0);
  const PendulumParams p;
  for (int trial = 0; trial < 100; ++trial) {
    const State x{d(rng), d(rng), d(rng), d(rng)};
    const State shifted{x[0], x[1], x[2] + 2 * kPi, x[3]};
    const double u = d(rng);
    const State a = dynamics(x, u, p);
    const State b = dynamics(shifted, u, p);
    for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(a[i], b[i], 1e-12);
  }
}

TEST(Dynamics, AffineInInput) {
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> d(-2.0, 2.0);
  const PendulumParams p;
  for (int trial = 0; trial < 50; ++trial) {
    const State x{d(rng), d(rng), d(rng), d(rng)};
    const State f0 = dynamics(x, 0.0, p);
    const State f1 = dynamics(x, 1.0, p);
    for (double u : {-1.0, 0.0, 1.0, 2.0}) {
      const State fu = dynamics(x, u, p);
      for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(fu[i] - f0[i], u * (f1[i] - f0[i]), 1e-12);
    }
  }
}

TEST(Output, ProjectsPositionAndAngle) {
  EXPECT_EQ(output({0.5, 0, 0.3, 0}), (Output{0.5, 0.3}));
  EXPECT_EQ(output({0, 0, 0, 0}), (Output{0.0, 0.0}));
  EXPECT_EQ(output({7, 0, kPi / 2, 0}), (Output{7.0, kPi / 2}));
}

TEST(Linearize, PendulumParametersReproduceTheReferenceMatrices) {
  const LinearSystem sys = linearize(PendulumParams{});
  const Matrix a_expected{{0, 1, 0, 0}, {0, -1, 0, 0}, {0, 0, 0, 1}, {0, 1.1876, 11.6500, 0}};
  const Matrix b_expected{{0}, {1}, {0}, {-1.1876}};
  for (std::size_t r = 0; r < 4; ++r) {
    for (std::size_t c = 0; c < 4; ++c) EXPECT_NEAR(sys.A(r, c), a_expected(r, c), 5e-5);
    EXPECT_NEAR(sys.B(r, 0), b_expected(r, 0), 5e-5);
  }
  EXPECT_EQ(sys.C, (Matrix{{1, 0, 0, 0}, {0, 0, 1, 0}}));
  EXPECT_FALSE(sys.is_discrete());
}

TEST(Linearize, FrictionlessUnitSystem) {
  const LinearSystem sys = linearize({1.0, 1.0, 0.0, 1.0});
  EXPECT_EQ(sys.A(3, 2), 1.0);
  EXPECT_EQ(sys.A(1, 1), 0.0);
  EXPECT_EQ(sys.A(3, 1), 0.0);
}

TEST(Linearize, InvalidParametersAreRejected) {
  EXPECT_THROW(linearize({0.0, 1.0, 1.0, 9.8}), ConfigError);
  EXPECT_THROW(linearize({1.0, -1.0, 1.0, 9.8}), ConfigError);
  EXPECT_THROW(linearize({1.0, 1.0, -0.1, 9.8}), ConfigError);
  EXPECT_THROW(linearize({1.0, 1.0, 1.0, 0.0}), ConfigError);
  EXPECT_THROW(linearize({NAN, 1.0, 1.0, 9.8}), ConfigError);
}

TEST(Linearize, TaylorRemainderIsSmallNearTheOrigin) {
  const PendulumParams p;
  const LinearSystem sys = linearize(p);
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> d(-1e-2, 1e-2);
  for (int trial = 0; trial < 200; ++trial) {
    const State x{d(rng), d(rng), d(rng), d(rng)};
    const double u = d(rng);
    const State f = dynamics(x, u, p);
    const Matrix lin = sys.A * to_column(x) + sys.B * u;
    for (std::size_t i = 0; i < 4; ++i) EXPECT_LE(std::abs(f[i] - lin(i, 0)), 1e-3);
  }
}

TEST(Linearize, JacobianMatchesCentralDifferences) {
  const PendulumParams p;
  for (Equilibrium eq : {Equilibrium::angle_zero, Equilibrium::angle_pi}) {
    const LinearSystem sys = linearize(p, eq);
    const State x0{0, 0, eq == Equilibrium::angle_zero ? 0.0 : kPi, 0};
    const double h = 1e-6;
    for (std::size_t j = 0; j < 4; ++j) {
      State xp = x0, xm = x0;
      xp[j] += h;
      xm[j] -= h;
      const State fp = dynamics(xp, 0.0, p);
      const State fm = dynamics(xm, 0.0, p);
      for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR((fp[i] - fm[i]) / (2 * h), sys.A(i, j), 1e-6);
    }
    const State fp = dynamics(x0, h, p);
    const State fm = dynamics(x0, -h, p);
    for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR((fp[i] - fm[i]) / (2 * h), sys.B(i, 0), 1e-6);
  }
}

TEST(Linearize, CartRowsDoNotSeeThePendulum) {
  for (Equilibrium eq : {Equilibrium::angle_zero, Equilibrium::angle_pi}) {
    const LinearSystem sys = linearize(PendulumParams{}, eq);
    for (std::size_t r = 0; r < 2; ++r)
      for (std::size_t c = 2; c < 4; ++c) EXPECT_EQ(sys.A(r, c), 0.0);
  }
  // Nonlinear: cart derivatives ignore phi and phi'.
  const PendulumParams p;
  const State a = dynamics({1, 2, 0.1, 0.2}, 0.5, p);
  const State b = dynamics({1, 2, 2.9, -4.0}, 0.5, p);
  EXPECT_EQ(a[0], b[0]);
  EXPECT_EQ(a[1], b[1]);
}

TEST(Linearize, OutputIsCTimesState) {
  const LinearSystem sys = linearize(PendulumParams{});
  const State x{0.1, -0.2, 0.3, 0.4};
  const Matrix y = sys.C * to_column(x);
  EXPECT_EQ(y(0, 0), output(x).cart_position);
  EXPECT_EQ(y(1, 0), output(x).angle);
}

TEST(Equilibria, StabilityComesFromEigenvalues) {
  const auto eqs = equilibria(PendulumParams{});
  ASSERT_EQ(eqs.size(), 2u);
  EXPECT_EQ(eqs[0].which, Equilibrium::angle_zero);
  EXPECT_EQ(eqs[0].stability, Stability::unstable);  // +sqrt(g/L) ~ +3.4132
  EXPECT_EQ(eqs[1].which, Equilibrium::angle_pi);
  EXPECT_EQ(eqs[1].stability, Stability::marginal);  // +-i sqrt(g/L), 0, -F/M
  EXPECT_NEAR(std::sqrt(9.8093 / 0.842), 3.4132, 1e-4);
}

TEST(Equilibria, AreFixedPoints) {
  for (const PendulumParams& p : {PendulumParams{}, PendulumParams{2.0, 0.5, 0.0, 3.7}}) {
    for (const auto& e : equilibria(p)) {
      const State dx = dynamics(e.state, 0.0, p);
      for (double v : dx) EXPECT_NEAR(v, 0.0, 1e-12);
    }
  }
}

}  // namespace
}  // namespace pendctl
