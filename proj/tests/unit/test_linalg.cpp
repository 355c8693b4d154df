#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "optcal/error.hpp"
#include "optcal/linalg.hpp"

using namespace optcal;

TEST(Linalg, SymMatrixSymmetrizes) {
  Matrix a(2, 2);
  a << 1.0, 2.0, 4.0, 3.0;
  const SymMatrix s(a);
  EXPECT_EQ(s(0, 1), s(1, 0));
  EXPECT_EQ(s(0, 1), 3.0);
}

TEST(Linalg, CholeskyOfIdentity) {
  const CholFactor f = cholesky(SymMatrix(Matrix::Identity(3, 3)));
  EXPECT_TRUE(f.lower().isApprox(Matrix::Identity(3, 3)));
}

TEST(Linalg, CholeskyHandComputed) {
  Matrix a(2, 2);
  a << 4.0, 2.0, 2.0, 3.0;
  const Matrix l = cholesky(SymMatrix(a)).lower();
  EXPECT_NEAR(l(0, 0), 2.0, 1e-15);
  EXPECT_NEAR(l(1, 0), 1.0, 1e-15);
  EXPECT_NEAR(l(1, 1), std::sqrt(2.0), 1e-15);
  EXPECT_EQ(l(0, 1), 0.0);
}

TEST(Linalg, CholeskyRejectsIndefinite) {
  Matrix a = Matrix::Identity(3, 3);
  a(1, 1) = -1.0;
  EXPECT_THROW(cholesky(SymMatrix(a)), NotPositiveDefinite);
}

TEST(Linalg, CholeskyReconstructs) {
  std::mt19937_64 gen(1);
  const Matrix a = oracle::random_spd(gen, 12);
  const Matrix l = cholesky(SymMatrix(a)).lower();
  EXPECT_LE((l * l.transpose() - a).norm() / a.norm(), 1e-10);
}

TEST(Linalg, SolveSimpleSystems) {
  const Vector b = Vector::LinSpaced(4, 1.0, 4.0);
  EXPECT_TRUE(solve_spd(cholesky(SymMatrix(Matrix::Identity(4, 4))), b).isApprox(b));
  Vector b2(2);
  b2 << 2.0, 4.0;
  const Vector x = solve_spd(cholesky(SymMatrix(2.0 * Matrix::Identity(2, 2))), b2);
  EXPECT_DOUBLE_EQ(x(0), 1.0);
  EXPECT_DOUBLE_EQ(x(1), 2.0);
}

TEST(Linalg, SolveDimensionMismatch) {
  const CholFactor f = cholesky(SymMatrix(Matrix::Identity(3, 3)));
  EXPECT_THROW(solve_spd(f, Vector(Vector::Ones(2))), DimensionMismatch);
}

TEST(Linalg, SolveMatchesExplicitInverse) {
  std::mt19937_64 gen(7);
  const Matrix a = oracle::random_spd(gen, 5);
  const Vector b = oracle::random_vector(gen, 5);
  const Vector expected = oracle::dense_inverse(a) * b;
  const Vector x = solve_spd(cholesky(SymMatrix(a)), b);
  EXPECT_LE((x - expected).norm(), 1e-9 * expected.norm());
}

TEST(Linalg, SolveResidualBoundOnRandomSpd) {
  std::mt19937_64 gen(11);
  for (Eigen::Index n : {2, 3, 8, 16, 33, 64}) {
    const Matrix a = oracle::random_spd(gen, n, 0.1);
    const Vector b = oracle::random_vector(gen, n);
    const Vector x = solve_spd(cholesky(SymMatrix(a)), b);
    EXPECT_LE((a * x - b).norm(), 1e-8 * b.norm()) << "order " << n;
  }
}

TEST(Linalg, TraceOfInfluenceIdentity) {
  EXPECT_NEAR(trace_of_influence(SymMatrix(Matrix::Identity(2, 2)), 1.0), 1.0, 1e-15);
}

TEST(Linalg, TraceOfInfluenceLargePenaltyVanishes) {
  std::mt19937_64 gen(3);
  Matrix a = oracle::random_spd(gen, 6);
  a /= a.diagonal().maxCoeff();
  EXPECT_LE(trace_of_influence(SymMatrix(a), 1e12), 1e-10 * 6);
}

TEST(Linalg, TraceOfInfluenceMatchesEigenOracle) {
  std::mt19937_64 gen(5);
  const Matrix a = oracle::random_spd(gen, 4);
  for (double nl : {1e-3, 0.1, 1.0, 10.0})
    EXPECT_NEAR(trace_of_influence(SymMatrix(a), nl), oracle::influence_trace_eigen(a, nl), 1e-9);
}

TEST(Linalg, TraceOfInfluenceDecreasesInPenalty) {
  std::mt19937_64 gen(8);
  const SymMatrix a(oracle::random_spd(gen, 10));
  double previous = trace_of_influence(a, 1e-8);
  for (double nl = 1e-7; nl < 1e4; nl *= 3.0) {
    const double t = trace_of_influence(a, nl);
    EXPECT_LE(t, previous);
    previous = t;
  }
}

TEST(Linalg, TraceOfInverse) {
  std::mt19937_64 gen(4);
  const Matrix a = oracle::random_spd(gen, 7);
  EXPECT_NEAR(trace_of_inverse(cholesky(SymMatrix(a))), oracle::dense_inverse(a).trace(), 1e-10);
}

TEST(Linalg, ExpOfZeroIsIdentity) {
  EXPECT_TRUE(matrix_exponential(Matrix::Zero(3, 3)).isApprox(Matrix::Identity(3, 3)));
}

TEST(Linalg, ExpOfDiagonal) {
  Matrix a = Matrix::Zero(2, 2);
  a(0, 0) = 1.0;
  a(1, 1) = 2.0;
  const Matrix e = matrix_exponential(a);
  EXPECT_NEAR(e(0, 0), std::exp(1.0), 1e-13);
  EXPECT_NEAR(e(1, 1), std::exp(2.0), 1e-13 * std::exp(2.0));
  EXPECT_NEAR(e(0, 1), 0.0, 1e-15);
}

TEST(Linalg, ExpOfNilpotent) {
  Matrix a(2, 2);
  a << 0.0, 1.0, 0.0, 0.0;
  Matrix expected(2, 2);
  expected << 1.0, 1.0, 0.0, 1.0;
  EXPECT_LE((matrix_exponential(a) - expected).norm(), 1e-15);
}

TEST(Linalg, ExpMatchesTaylorOnSmallNorm) {
  std::mt19937_64 gen(21);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index n = 2 + trial % 7;
    Matrix a(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) a(i, j) = u(gen);
    a *= 0.5 / a.cwiseAbs().colwise().sum().maxCoeff();
    const Matrix expected = oracle::exp_taylor(a);
    EXPECT_LE((matrix_exponential(a) - expected).norm() / expected.norm(), 1e-10);
  }
}

TEST(Linalg, ExpTimesExpOfNegativeIsIdentity) {
  std::mt19937_64 gen(22);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    Matrix a(4, 4);
    for (Eigen::Index i = 0; i < 4; ++i)
      for (Eigen::Index j = 0; j < 4; ++j) a(i, j) = u(gen);
    a *= (1.0 + trial % 10) / a.cwiseAbs().colwise().sum().maxCoeff();
    const Matrix prod = matrix_exponential(a) * matrix_exponential(-a);
    EXPECT_LE((prod - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(Linalg, ExpRejectsLargeOrder) { EXPECT_THROW(matrix_exponential(Matrix::Zero(9, 9)), InvalidArgument); }
