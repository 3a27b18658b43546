#include <gtest/gtest.h>

#include <random>

#include "quadloco/lp.hpp"

using namespace quadloco;
using lp::LinearProgram;
using lp::Simplex;
using lp::Status;

TEST(Simplex, TextbookMaximisation) {
  // max 3x + 5y  s.t.  x <= 4, 2y <= 12, 3x + 2y <= 18  ->  (2, 6), value 36.
  LinearProgram p(2);
  p.objective << 3, 5;
  p.a_le.resize(3, 2);
  p.a_le << 1, 0, 0, 2, 3, 2;
  p.b_le.resize(3);
  p.b_le << 4, 12, 18;
  const auto s = Simplex().solve(p);
  ASSERT_EQ(s.status, Status::Optimal);
  EXPECT_NEAR(s.value, 36.0, 1e-9);
  EXPECT_NEAR(s.x(0), 2.0, 1e-9);
  EXPECT_NEAR(s.x(1), 6.0, 1e-9);
}

TEST(Simplex, EqualitiesAndNegativeRightHandSides) {
  // max -x - y  s.t.  x + y = 2,  -x <= -0.5  ->  any split; value -2 with x >= 0.5.
  LinearProgram p(2);
  p.objective << -1, -1;
  p.a_eq.resize(1, 2);
  p.a_eq << 1, 1;
  p.b_eq.resize(1);
  p.b_eq << 2;
  p.a_le.resize(1, 2);
  p.a_le << -1, 0;
  p.b_le.resize(1);
  p.b_le << -0.5;
  const auto s = Simplex().solve(p);
  ASSERT_EQ(s.status, Status::Optimal);
  EXPECT_NEAR(s.value, -2.0, 1e-9);
  EXPECT_GE(s.x(0), 0.5 - 1e-9);
  EXPECT_NEAR(s.x(0) + s.x(1), 2.0, 1e-9);
}

TEST(Simplex, DetectsInfeasibility) {
  LinearProgram p(1);
  p.objective << 1;
  p.a_eq.resize(1, 1);
  p.a_eq << 1;
  p.b_eq.resize(1);
  p.b_eq << -1;
  EXPECT_EQ(Simplex().solve(p).status, Status::Infeasible);
}

TEST(Simplex, DetectsUnboundedness) {
  LinearProgram p(2);
  p.objective << 1, 0;
  p.a_le.resize(1, 2);
  p.a_le << 0, 1;
  p.b_le.resize(1);
  p.b_le << 1;
  EXPECT_EQ(Simplex().solve(p).status, Status::Unbounded);
}

TEST(Simplex, RedundantEqualityRows) {
  LinearProgram p(2);
  p.objective << 1, 2;
  p.a_eq.resize(2, 2);
  p.a_eq << 1, 1, 2, 2;
  p.b_eq.resize(2);
  p.b_eq << 1, 2;
  const auto s = Simplex().solve(p);
  ASSERT_EQ(s.status, Status::Optimal);
  EXPECT_NEAR(s.value, 2.0, 1e-9);
}

TEST(Simplex, BealeCyclingExampleTerminates) {
  // Classic degenerate instance that cycles under the largest-coefficient rule.
  LinearProgram p(4);
  p.objective << 0.75, -150, 0.02, -6;
  p.a_le.resize(3, 4);
  p.a_le << 0.25, -60, -0.04, 9, 0.5, -90, -0.02, 3, 0, 0, 1, 0;
  p.b_le.resize(3);
  p.b_le << 0, 0, 1;
  const auto s = Simplex().solve(p);
  ASSERT_EQ(s.status, Status::Optimal);
  EXPECT_NEAR(s.value, 0.05, 1e-9);
}

TEST(Simplex, RandomFeasibleProgramsSatisfyConstraintsAndWeakDuality) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> d(0.1, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 5, m = 4;
    LinearProgram p(n);
    p.a_le = Eigen::MatrixXd(m, n);
    p.b_le = Eigen::VectorXd(m);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < n; ++j) p.a_le(i, j) = d(rng);
      p.b_le(i) = d(rng);
    }
    for (int j = 0; j < n; ++j) p.objective(j) = d(rng);
    const auto s = Simplex().solve(p);
    ASSERT_EQ(s.status, Status::Optimal);
    EXPECT_TRUE(((p.a_le * s.x - p.b_le).array() <= 1e-9).all());
    EXPECT_TRUE((s.x.array() >= -1e-12).all());
    // Any y >= 0 with A'y >= c bounds the optimum: y_i = max_j c_j / a_ij on one row.
    for (int i = 0; i < m; ++i) {
      double scale = 0.0;
      for (int j = 0; j < n; ++j) scale = std::max(scale, p.objective(j) / p.a_le(i, j));
      EXPECT_LE(s.value, scale * p.b_le(i) + 1e-9);
    }
  }
}
