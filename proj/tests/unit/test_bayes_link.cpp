#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "optcal/bayes_link.hpp"
#include "optcal/error.hpp"

using namespace optcal;

namespace {

LinearComputerModel polynomial(std::size_t p) {
  LinearComputerModel m;
  for (std::size_t j = 0; j < p; ++j)
    m.basis.push_back([j](Point x) { return std::pow(x[0], static_cast<double>(j)); });
  return m;
}

Dataset random_dataset(std::mt19937_64& gen, Eigen::Index n) {
  return Dataset(oracle::random_points(gen, n, 1), oracle::random_vector(gen, n));
}

}  // namespace

TEST(Bayes, LambdaFromHyper) {
  const BayesHyper h{1.0, 2.0, 0.5};
  EXPECT_DOUBLE_EQ(h.lambda(10), 0.5 / 20.0);
}

TEST(Bayes, PosteriorMeanOfZeroData) {
  std::mt19937_64 gen(1);
  const Dataset d(oracle::random_points(gen, 8, 1), Vector::Zero(8));
  const auto m = polynomial(2);
  const double x[1] = {0.4};
  EXPECT_EQ(posterior_mean(d, m, KernelSpec::matern32(0.3), {10.0, 1.0, 0.1}, Point(x, 1)), 0.0);
}

TEST(Bayes, PosteriorMeanMatchesJointGaussian) {
  std::mt19937_64 gen(2);
  const Dataset d = random_dataset(gen, 8);
  const auto m = polynomial(3);
  const KernelSpec k = KernelSpec::matern32(0.3);
  const PointMatrix tests = oracle::random_points(gen, 10, 1);
  for (const BayesHyper h : {BayesHyper{1.0, 1.0, 0.1}, BayesHyper{100.0, 0.5, 0.2}, BayesHyper{0.01, 3.0, 0.05}}) {
    const PosteriorMean pm(d, m, k, h);
    const GramMatrix g = gram(k, d.X);
    const Matrix s = oracle::kernel_matrix(k, d.X, g.jitter);
    const Matrix t = m.design(d.X);
    for (Eigen::Index i = 0; i < tests.rows(); ++i) {
      const Vector kx = cross_kernel(k, d.X, tests.middleRows(i, 1));
      const double expected =
          oracle::joint_gaussian_mean(t, s, d.Y, m.features(row(tests, i)), kx, h.alpha, h.beta, h.sigma2);
      EXPECT_NEAR(pm(row(tests, i)), expected, 1e-8);
    }
  }
}

TEST(Bayes, PosteriorMeanWithoutParametricPartIsRidge) {
  std::mt19937_64 gen(3);
  const Dataset d = random_dataset(gen, 12);
  const auto m = polynomial(1);
  const KernelSpec k = KernelSpec::matern32(0.3);
  const BayesHyper h{1e-12, 1e12, 1.0};
  const DiscrepancyFit ridge = fit_ridge(d, Vector::Zero(12), k, h.lambda(12));
  const double x[1] = {0.55};
  EXPECT_NEAR(posterior_mean(d, m, k, h, Point(x, 1)), predict_discrepancy(ridge, Point(x, 1)), 1e-8);
}

TEST(Bayes, PosteriorMeanIsLinearInY) {
  std::mt19937_64 gen(4);
  const PointMatrix x = oracle::random_points(gen, 10, 1);
  const Vector y1 = oracle::random_vector(gen, 10), y2 = oracle::random_vector(gen, 10);
  const auto m = polynomial(2);
  const KernelSpec k = KernelSpec::matern32(0.3);
  const BayesHyper h{5.0, 1.0, 0.1};
  const double p[1] = {0.3};
  const double a = posterior_mean(Dataset(x, y1), m, k, h, Point(p, 1));
  const double b = posterior_mean(Dataset(x, y2), m, k, h, Point(p, 1));
  const double c = posterior_mean(Dataset(x, 2.0 * y1 - 3.0 * y2), m, k, h, Point(p, 1));
  EXPECT_NEAR(c, 2.0 * a - 3.0 * b, 1e-10);
}

TEST(Bayes, PartialSplineHugeLambdaGivesMean) {
  std::mt19937_64 gen(5);
  const Dataset d = random_dataset(gen, 15);
  const PartialSplineFit f = partial_spline_limit(d, polynomial(1), KernelSpec::matern32(0.3), 1e9);
  EXPECT_NEAR(f.theta_hat(0), d.Y.mean(), 1e-6);
  EXPECT_LE(f.discrepancy.coefficients.norm(), 1e-6);
}

TEST(Bayes, PartialSplineExactSpan) {
  std::mt19937_64 gen(6);
  const PointMatrix x = oracle::random_points(gen, 12, 1);
  Vector y(12);
  for (Eigen::Index i = 0; i < 12; ++i) y(i) = 1.5 - 2.0 * x(i, 0) + 0.5 * x(i, 0) * x(i, 0);
  for (double lambda : {1e-6, 1e-2, 1.0}) {
    const PartialSplineFit f = partial_spline_limit(Dataset(x, y), polynomial(3), KernelSpec::matern32(0.3), lambda);
    EXPECT_NEAR(f.theta_hat(0), 1.5, 1e-8);
    EXPECT_NEAR(f.theta_hat(1), -2.0, 1e-8);
    EXPECT_NEAR(f.theta_hat(2), 0.5, 1e-8);
    EXPECT_LE(f.discrepancy.coefficients.cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(Bayes, PartialSplineMatchesJointNormalEquations) {
  std::mt19937_64 gen(7);
  const Dataset d = random_dataset(gen, 10);
  const auto m = polynomial(2);
  const KernelSpec k = KernelSpec::matern32(0.3);
  for (double lambda : {1e-3, 0.1}) {
    const PartialSplineFit f = partial_spline_limit(d, m, k, lambda);
    const Matrix s = oracle::kernel_matrix(k, d.X, f.discrepancy.jitter);
    const auto [theta, c] = oracle::partial_spline_normal_equations(m.design(d.X), s, d.Y, lambda);
    EXPECT_LE((f.theta_hat - theta).cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_LE((f.discrepancy.coefficients - c).cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(Bayes, PartialSplineStationarity) {
  std::mt19937_64 gen(8);
  const Dataset d = random_dataset(gen, 20);
  const auto m = polynomial(3);
  const KernelSpec k = KernelSpec::matern32(0.3);
  const double lambda = 0.01;
  const PartialSplineFit f = partial_spline_limit(d, m, k, lambda);
  const Matrix t = m.design(d.X);
  const Matrix mm = oracle::kernel_matrix(k, d.X, f.discrepancy.jitter) + 20.0 * lambda * Matrix::Identity(20, 20);
  const Vector r = d.Y - t * f.theta_hat;
  EXPECT_LE((t.transpose() * mm.fullPivLu().solve(r)).cwiseAbs().maxCoeff(), 1e-8);
  EXPECT_LE((mm * f.discrepancy.coefficients - r).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Bayes, PartialSplineRankDeficient) {
  std::mt19937_64 gen(9);
  const Dataset d = random_dataset(gen, 10);
  LinearComputerModel m;
  m.basis = {[](Point) { return 1.0; }, [](Point) { return 2.0; }};
  EXPECT_THROW(partial_spline_limit(d, m, KernelSpec::matern32(0.3), 0.01), RankDeficientBasis);
}

TEST(Bayes, LimitDeviationShrinks) {
  std::mt19937_64 gen(10);
  const Dataset d = random_dataset(gen, 20);
  const auto m = polynomial(3);
  const PointMatrix tests = oracle::random_points(gen, 50, 1);
  const std::vector<double> alphas = {1.0, 1e2, 1e4, 1e6, 1e8};
  const auto dev = verify_proposition_limit(d, m, KernelSpec::matern32(0.3), {1.0, 1.0, 0.1}, alphas, tests);
  ASSERT_EQ(dev.size(), alphas.size());
  for (std::size_t i = 1; i < dev.size(); ++i) EXPECT_LE(dev[i], dev[i - 1]);
  EXPECT_LE(dev.back(), 1e-5 * (d.Y.maxCoeff() - d.Y.minCoeff()));
}

TEST(Bayes, LimitDeviationZeroData) {
  std::mt19937_64 gen(11);
  const Dataset d(oracle::random_points(gen, 10, 1), Vector::Zero(10));
  const PointMatrix tests = oracle::random_points(gen, 5, 1);
  for (double v : verify_proposition_limit(d, polynomial(2), KernelSpec::matern32(0.3), {1.0, 1.0, 0.1},
                                           {1.0, 1e4, 1e8}, tests))
    EXPECT_EQ(v, 0.0);
}
