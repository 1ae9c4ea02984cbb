#include "pendctl/properties.hpp"

#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "pendctl/discretization.hpp"

namespace pendctl {
namespace {

LinearSystem make(Matrix a, Matrix b, Matrix c) { return {std::move(a), std::move(b), std::move(c), std::nullopt}; }

TEST(Controllability, PendulumMatrixMatchesReference) {
  const Matrix ctrb = controllability_matrix(linearize(PendulumParams{}));
  const Matrix expected{{0, 1, -1, 1},
                        {1, -1, 1, -1},
                        {0, -1.1876, 1.1876, -15.0238},
                        {-1.1876, 1.1876, -15.0238, 15.0238}};
  for (std::size_t r = 0; r < 4; ++r)
    for (std::size_t c = 0; c < 4; ++c) EXPECT_NEAR(ctrb(r, c), expected(r, c), 5e-5) << r << "," << c;
  EXPECT_EQ(rank(ctrb, 1e-9), 4u);
}

TEST(Controllability, SymbolicEntriesHold) {
  // Closed forms in M, L, F, g for a non-unit parameter set.
  const PendulumParams p{2.0, 0.5, 0.3, 9.0};
  const double M = p.cart_mass, L = p.length, F = p.friction, g = p.gravity;
  const Matrix ctrb = controllability_matrix(linearize(p));
  const Matrix expected{
      {0, 1 / M, -F / (M * M), F * F / (M * M * M)},
      {1 / M, -F / (M * M), F * F / (M * M * M), -F * F * F / (M * M * M * M)},
      {0, -1 / (M * L), F / (M * M * L), -F * F / (M * M * M * L) - g / (M * L * L)},
      {-1 / (M * L), F / (M * M * L), -F * F / (M * M * M * L) - g / (M * L * L),
       F * F * F / (M * M * M * M * L) + F * g / (M * M * L * L)},
  };
  for (std::size_t r = 0; r < 4; ++r)
    for (std::size_t c = 0; c < 4; ++c) EXPECT_NEAR(ctrb(r, c), expected(r, c), 1e-12);
}

TEST(Controllability, SmallExamples) {
  const Matrix zero_a = controllability_matrix(make(Matrix(2, 2), Matrix{{1}, {0}}, Matrix{{1, 0}}));
  EXPECT_EQ(zero_a, (Matrix{{1, 0}, {0, 0}}));
  EXPECT_EQ(rank(zero_a), 1u);

  const Matrix dbl = controllability_matrix(make(Matrix{{0, 1}, {0, 0}}, Matrix{{0}, {1}}, Matrix{{1, 0}}));
  EXPECT_EQ(dbl, (Matrix{{0, 1}, {1, 0}}));
  EXPECT_EQ(rank(dbl), 2u);
}

TEST(Controllability, RejectsMultiInputAndBadShapes) {
  EXPECT_THROW(controllability_matrix(make(Matrix::identity(2), Matrix::identity(2), Matrix{{1, 0}})),
               DimensionError);
  EXPECT_THROW(controllability_matrix(make(Matrix::identity(2), Matrix{{1}, {0}, {0}}, Matrix{{1, 0}})),
               DimensionError);
}

TEST(Controllability, ColumnsFollowTheKrylovRecurrence) {
  std::mt19937 rng(41);
  for (int trial = 0; trial < 20; ++trial) {
    const LinearSystem sys = make(oracle::random_matrix(rng, 4, 4), oracle::random_matrix(rng, 4, 1),
                                  oracle::random_matrix(rng, 2, 4));
    const Matrix ctrb = controllability_matrix(sys);
    for (std::size_t j = 0; j + 1 < 4; ++j) {
      const Matrix next = sys.A * ctrb.col_at(j);
      for (std::size_t r = 0; r < 4; ++r) EXPECT_NEAR(ctrb(r, j + 1), next(r, 0), 1e-14);
    }
  }
}

TEST(Controllability, RankInvariantUnderSimilarity) {
  std::mt19937 rng(43);
  for (int trial = 0; trial < 50; ++trial) {
    Matrix a = oracle::random_matrix(rng, 4, 4);
    Matrix b = oracle::random_matrix(rng, 4, 1);
    if (trial % 3 == 0) {
      // Uncontrollable: block-diagonal A with B only in the first block.
      a = Matrix::diagonal(std::vector<double>{-1.0, -2.0, 0.5, 3.0});
      b = Matrix{{1}, {1}, {0}, {0}};
    }
    const Matrix t = oracle::random_well_conditioned(rng, 4);
    const Matrix t_inv = inverse(t);
    const std::size_t r0 = rank(controllability_matrix(make(a, b, Matrix{{1, 0, 0, 0}})));
    const std::size_t r1 = rank(controllability_matrix(make(t * a * t_inv, t * b, Matrix{{1, 0, 0, 0}})));
    EXPECT_EQ(r0, r1);
  }
}

TEST(Observability, PendulumMatrixMatchesReference) {
  const Matrix obsv = observability_matrix(linearize(PendulumParams{}));
  const Matrix expected{{1, 0, 0, 0},       {0, 0, 1, 0},      {0, 1, 0, 0},     {0, 0, 0, 1},
                        {0, -1, 0, 0},      {0, 1.1876, 11.65, 0}, {0, 1, 0, 0}, {0, -1.1876, 0, 11.65}};
  ASSERT_EQ(obsv.rows(), 8u);
  ASSERT_EQ(obsv.cols(), 4u);
  for (std::size_t r = 0; r < 8; ++r)
    for (std::size_t c = 0; c < 4; ++c) EXPECT_NEAR(obsv(r, c), expected(r, c), 5e-5) << r << "," << c;
}

TEST(Observability, SmallExamples) {
  std::mt19937 rng(47);
  const LinearSystem full = make(oracle::random_matrix(rng, 2, 2), Matrix{{1}, {0}}, Matrix::identity(2));
  EXPECT_EQ(rank(observability_matrix(full)), 2u);

  const LinearSystem hidden = make(Matrix{{1, 0}, {0, 2}}, Matrix{{1}, {0}}, Matrix{{1, 0}});
  const Matrix obsv = observability_matrix(hidden);
  EXPECT_EQ(obsv, (Matrix{{1, 0}, {1, 0}}));
  EXPECT_EQ(rank(obsv), 1u);
}

TEST(Check, PendulumIsControllableAndObservable) {
  const SystemProperties props = check(linearize(PendulumParams{}), 1e-9);
  EXPECT_TRUE(props.controllability.holds);
  EXPECT_TRUE(props.observability.holds);
  EXPECT_EQ(props.controllability.rank, 4u);
  EXPECT_EQ(props.observability.rank, 4u);
  EXPECT_EQ(props.controllability.required, 4u);
  EXPECT_EQ(props.controllability.tolerance, 1e-9);
}

TEST(Check, DetectsMissingProperties) {
  const LinearSystem sys = make(Matrix{{1, 0}, {0, 2}}, Matrix{{1}, {0}}, Matrix{{1, 0}});
  const SystemProperties props = check(sys, 1e-9);
  EXPECT_FALSE(props.controllability.holds);
  EXPECT_FALSE(props.observability.holds);
  EXPECT_EQ(props.controllability.rank, 1u);
  EXPECT_THROW(check(sys, 0.0), ConfigError);
}

TEST(Check, ReportInvariant) {
  std::mt19937 rng(53);
  for (int trial = 0; trial < 30; ++trial) {
    const LinearSystem sys = make(oracle::random_matrix(rng, 3, 3), oracle::random_matrix(rng, 3, 1),
                                  oracle::random_matrix(rng, 1, 3));
    const SystemProperties props = check(sys);
    EXPECT_EQ(props.controllability.holds, props.controllability.rank == props.controllability.required);
    EXPECT_EQ(props.observability.holds, props.observability.rank == props.observability.required);
  }
}

TEST(Check, DiscretizedPendulumStaysControllableAcrossTheSweep) {
  const LinearSystem sys = linearize(PendulumParams{});
  for (double t : {0.01, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.4, 0.5}) {
    const SystemProperties props = check(zoh_discretize(sys, t), 1e-9);
    EXPECT_TRUE(props.controllability.holds) << "T=" << t;
    EXPECT_TRUE(props.observability.holds) << "T=" << t;
  }
}

}  // namespace
}  // namespace pendctl
