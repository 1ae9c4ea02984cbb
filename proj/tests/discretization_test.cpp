#include "pendctl/discretization.hpp"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"

namespace pendctl {
namespace {

void expect_matrix_near(const Matrix& a, const Matrix& b, double tol) {
  ASSERT_EQ(a.rows(), b.rows());
  ASSERT_EQ(a.cols(), b.cols());
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c) EXPECT_NEAR(a(r, c), b(r, c), tol) << "(" << r << "," << c << ")";
}

TEST(Zoh, ZeroDynamicsIntegratesTheInput) {
  const LinearSystem sys{Matrix(2, 2), Matrix{{1.5}, {-2}}, Matrix{{1, 0}}, std::nullopt};
  const LinearSystem d = zoh_discretize(sys, 0.3);
  expect_matrix_near(d.A, Matrix::identity(2), 1e-15);
  expect_matrix_near(d.B, Matrix{{0.45}, {-0.6}}, 1e-15);
  EXPECT_EQ(d.C, sys.C);
  ASSERT_TRUE(d.sample_period.has_value());
  EXPECT_EQ(*d.sample_period, 0.3);
}

TEST(Zoh, ScalarClosedForm) {
  for (double a : {-2.0, -0.5, 0.7, 3.0}) {
    for (double t : {0.01, 0.1, 0.5}) {
      const LinearSystem d = zoh_discretize({Matrix{{a}}, Matrix{{1}}, Matrix{{1}}, std::nullopt}, t);
      EXPECT_NEAR(d.A(0, 0), std::exp(a * t), 1e-14);
      EXPECT_NEAR(d.B(0, 0), (std::exp(a * t) - 1.0) / a, 1e-14);
    }
  }
}

TEST(Zoh, PendulumMatchesSimpsonQuadrature) {
  const LinearSystem sys = linearize(PendulumParams{});
  for (double t : {0.1, 0.25, 0.5}) {
    const LinearSystem d = zoh_discretize(sys, t);
    expect_matrix_near(d.A, oracle::expm(sys.A * t), 1e-12);
    expect_matrix_near(d.B, oracle::simpson_zoh_input(sys.A, sys.B, t), 1e-8);
  }
}

TEST(Zoh, Errors) {
  const LinearSystem sys = linearize(PendulumParams{});
  EXPECT_THROW(zoh_discretize(sys, 0.0), ConfigError);
  EXPECT_THROW(zoh_discretize(sys, -0.1), ConfigError);
  EXPECT_THROW(zoh_discretize(sys, NAN), ConfigError);
  EXPECT_THROW(zoh_discretize(zoh_discretize(sys, 0.1), 0.1), ConfigError);
}

TEST(Sweep, OrderPreservingAndEmpty) {
  const LinearSystem sys = linearize(PendulumParams{});
  const std::vector<double> ts{0.1, 0.2, 0.5};
  const auto out = sweep_discretize(sys, ts);
  ASSERT_EQ(out.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(*out[i].sample_period, ts[i]);
    EXPECT_EQ(out[i].A, zoh_discretize(sys, ts[i]).A);
  }
  EXPECT_TRUE(sweep_discretize(sys, std::vector<double>{}).empty());
  EXPECT_THROW(sweep_discretize(sys, std::vector<double>{0.1, -1.0}), ConfigError);
}

TEST(Sweep, ShortPeriodIsFirstOrder) {
  const LinearSystem sys = linearize(PendulumParams{});
  const auto out = sweep_discretize(sys, std::vector<double>{0.01});
  expect_matrix_near(out[0].A, Matrix::identity(4) + sys.A * 0.01, 1e-3);
}

TEST(Zoh, SemigroupConsistency) {
  const LinearSystem sys = linearize(PendulumParams{});
  std::mt19937 rng(81);
  std::uniform_real_distribution<double> t(0.01, 0.5);
  for (int trial = 0; trial < 30; ++trial) {
    const double t1 = t(rng), t2 = t(rng);
    expect_matrix_near(zoh_discretize(sys, t1 + t2).A, zoh_discretize(sys, t2).A * zoh_discretize(sys, t1).A, 1e-9);
  }
}

TEST(Zoh, EigenvaluesMapThroughExponential) {
  std::mt19937 rng(83);
  std::uniform_real_distribution<double> ev(-3.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    // Diagonalizable: V diag(lambda) V^{-1}.
    const std::vector<double> lambda{ev(rng), ev(rng), ev(rng), ev(rng)};
    const Matrix v = oracle::random_well_conditioned(rng, 4);
    const Matrix a = v * Matrix::diagonal(lambda) * inverse(v);
    const double t = 0.05 + 0.1 * (trial % 5);
    const LinearSystem d = zoh_discretize({a, Matrix{{1}, {0}, {0}, {0}}, Matrix{{1, 0, 0, 0}}, std::nullopt}, t);
    std::vector<Complex> expected;
    for (double l : lambda) expected.emplace_back(std::exp(l * t), 0.0);
    EXPECT_LT(oracle::multiset_distance(oracle::eigenvalues(d.A), expected), 1e-8);
  }
  // Pendulum: eigenvalues 0, -1, +-sqrt(g/L).
  const LinearSystem sys = linearize(PendulumParams{});
  const double w = std::sqrt(9.8093 / 0.842);
  const LinearSystem d = zoh_discretize(sys, 0.2);
  const std::vector<Complex> expected{1.0, std::exp(-0.2), std::exp(w * 0.2), std::exp(-w * 0.2)};
  EXPECT_LT(oracle::multiset_distance(oracle::eigenvalues(d.A), expected), 1e-8);
}

TEST(Zoh, ShortPeriodLimits) {
  const LinearSystem sys = linearize(PendulumParams{});
  double prev_b = 0.0, prev_a = 0.0;
  for (double t : {1e-2, 1e-3}) {
    const LinearSystem d = zoh_discretize(sys, t);
    const double b_err = (d.B - sys.B * t).max_abs() / t;  // -> 0 like T
    const double a_err = (d.A - Matrix::identity(4)).max_abs();  // -> 0 like T
    if (prev_b > 0.0) {
      EXPECT_NEAR(b_err / prev_b, 0.1, 0.02);
      EXPECT_NEAR(a_err / prev_a, 0.1, 0.02);
    }
    prev_b = b_err;
    prev_a = a_err;
  }
}

}  // namespace
}  // namespace pendctl
