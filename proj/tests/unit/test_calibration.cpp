#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "optcal/bayes_link.hpp"
#include "optcal/calibration.hpp"
#include "optcal/error.hpp"
#include "optcal/models.hpp"
#include "optcal/optimizer.hpp"

using namespace optcal;

namespace {

ComputerModel constant_model() {
  return ComputerModel{"const", 1, Box({-10.0}, {10.0}), [](Point, Point t) { return t[0]; }};
}

Dataset noiseless(const ComputerModel& model, std::vector<double> theta, Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  PointMatrix x = oracle::random_points(gen, n, static_cast<Eigen::Index>(model.input_dim));
  Vector y = model.evaluate(x, theta);
  return Dataset(std::move(x), std::move(y));
}

}  // namespace

TEST(Optimizer, ReflectIntoBox) {
  EXPECT_DOUBLE_EQ(reflect_into(0.5, 0.0, 1.0), 0.5);
  EXPECT_DOUBLE_EQ(reflect_into(-0.25, 0.0, 1.0), 0.25);
  EXPECT_DOUBLE_EQ(reflect_into(1.25, 0.0, 1.0), 0.75);
  const double r = reflect_into(7.3, 0.0, 1.0);
  EXPECT_GE(r, 0.0);
  EXPECT_LE(r, 1.0);
}

TEST(Optimizer, Quadratic) {
  const auto f = [](std::span<const double> t) { return (t[0] - 0.3) * (t[0] - 0.3); };
  const BoxMinimum m = minimize_box(f, Box::unit(1), 5, RngStream(1, 0));
  EXPECT_NEAR(m.argmin[0], 0.3, 1e-5);
  EXPECT_EQ(m.starts, 5u);
}

TEST(Optimizer, ConstantObjective) {
  const auto f = [](std::span<const double>) { return 2.5; };
  const Box box({-1.0, 0.0}, {1.0, 3.0});
  const BoxMinimum m = minimize_box(f, box, 3, RngStream(1, 0));
  EXPECT_EQ(m.value, 2.5);
  EXPECT_TRUE(box.contains(m.argmin));
}

TEST(Optimizer, Rosenbrock) {
  const auto f = [](std::span<const double> t) {
    return 100.0 * std::pow(t[1] - t[0] * t[0], 2) + std::pow(1.0 - t[0], 2);
  };
  const BoxMinimum m = minimize_box(f, Box({-2.0, -2.0}, {2.0, 2.0}), 10, RngStream(2, 0));
  EXPECT_LT(m.value, 1e-6);
  EXPECT_NEAR(m.argmin[0], 1.0, 1e-2);
}

TEST(Optimizer, NonFiniteObjective) {
  const auto f = [](std::span<const double> t) { return t[0] > 0.5 ? std::nan("") : t[0]; };
  EXPECT_THROW(minimize_box(f, Box::unit(1), 4, RngStream(3, 0)), ObjectiveNonFinite);
}

TEST(Optimizer, StaysInsideBox) {
  const auto f = [](std::span<const double> t) { return -t[0] - 2.0 * t[1]; };
  const Box box({0.0, 0.0}, {1.0, 1.0});
  const BoxMinimum m = minimize_box(f, box, 4, RngStream(4, 0));
  EXPECT_TRUE(box.contains(m.argmin));
  EXPECT_NEAR(m.value, -3.0, 1e-6);
}

TEST(CalibrateLs, ConstantModelGivesSampleMean) {
  std::mt19937_64 gen(5);
  const Dataset d(oracle::random_points(gen, 30, 1), oracle::random_vector(gen, 30));
  const CalibrationResult r = calibrate_ls(d, constant_model(), 5, RngStream(5, 0));
  EXPECT_NEAR(r.theta_hat[0], d.Y.mean(), 1e-6);
  EXPECT_EQ(r.method, CalibrationMethod::LS);
}

TEST(CalibrateLs, InvariantToShiftWithInterceptModel) {
  std::mt19937_64 gen(6);
  const Dataset d(oracle::random_points(gen, 30, 1), oracle::random_vector(gen, 30));
  const Dataset shifted(d.X, (d.Y.array() + 2.0).matrix());
  const double a = calibrate_ls(d, constant_model(), 5, RngStream(6, 0)).theta_hat[0];
  const double b = calibrate_ls(shifted, constant_model(), 5, RngStream(6, 0)).theta_hat[0];
  EXPECT_NEAR(b - a, 2.0, 1e-6);
}

TEST(CalibrateLs, RecoversNoiselessParameter) {
  const NamedSystem ex2 = make_system(SystemId::Ex2);
  const Dataset d = noiseless(ex2.model, {0.35, 0.6}, 40, 7);
  const CalibrationResult r = calibrate_ls(d, ex2.model, 10, RngStream(7, 0));
  EXPECT_NEAR(r.theta_hat[0], 0.35, 1e-4);
  EXPECT_NEAR(r.theta_hat[1], 0.6, 1e-4);
}

TEST(CalibrateLs, ExampleOneConvergesNearL2Limit) {
  const NamedSystem ex1 = make_system(SystemId::Ex1);
  const Dataset d = generate_dataset(ex1, 200, 0.1, RngStream(kDefaultSeed, 1));
  const CalibrationResult r = calibrate_ls(d, ex1.model, 10, RngStream(kDefaultSeed, 2));
  EXPECT_NEAR(r.theta_hat[0], -0.1780, 0.15);
}

TEST(CalibrateL2, PerfectMatch) {
  const NamedSystem ex1 = make_system(SystemId::Ex1);
  const Dataset d = generate_dataset(ex1, 40, 0.1, RngStream(8, 0));
  const RidgeProblem problem(d, Vector::Zero(40), KernelSpec::matern32(0.3));
  const DiscrepancyFit truth = problem.fit(1e-3);
  const ComputerModel scaled{"scaled", 1, Box({0.0}, {2.0}),
                             [&](Point x, Point t) { return t[0] * predict_discrepancy(truth, x); }};
  const CalibrationResult r = calibrate_l2_from_fit(truth, scaled, 1000, RngStream(8, 1));
  EXPECT_NEAR(r.theta_hat[0], 1.0, 1e-4);
}

TEST(CalibrateL2, Deterministic) {
  const NamedSystem ex1 = make_system(SystemId::Ex1);
  const Dataset d = generate_dataset(ex1, 40, 0.3, RngStream(9, 0));
  const KernelSpec k = KernelSpec::matern32(0.3);
  const auto a = calibrate_l2(d, ex1.model, k, 500, RngStream(9, 1));
  const auto b = calibrate_l2(d, ex1.model, k, 500, RngStream(9, 1));
  EXPECT_EQ(a.theta_hat, b.theta_hat);
  EXPECT_THROW(calibrate_l2(d, ex1.model, k, 99, RngStream(9, 1)), InvalidArgument);
}

TEST(CalibrateL2, ExampleOneConvergesNearL2Limit) {
  const NamedSystem ex1 = make_system(SystemId::Ex1);
  const Dataset d = generate_dataset(ex1, 200, 0.1, RngStream(kDefaultSeed, 1));
  const CalibrationResult r = calibrate_l2(d, ex1.model, KernelSpec::matern32(0.2), 4096, RngStream(kDefaultSeed, 3));
  EXPECT_NEAR(r.theta_hat[0], -0.1780, 0.15);
}

TEST(WeightedObjective, ZeroResidual) {
  const NamedSystem ex1 = make_system(SystemId::Ex1);
  const Dataset d = noiseless(ex1.model, {0.2}, 20, 10);
  const double t[1] = {0.2};
  EXPECT_EQ(weighted_objective(d, ex1.model, KernelSpec::matern32(0.3), 0.01, Point(t, 1)), 0.0);
}

TEST(WeightedObjective, JitterOnlyKernelIsScalarWeight) {
  std::mt19937_64 gen(11);
  const Eigen::Index n = 10;
  const Dataset d(oracle::random_points(gen, n, 1), oracle::random_vector(gen, n));
  const double jitter = 1e-8, lambda = 0.05;
  const GramMatrix g{SymMatrix(jitter * Matrix::Identity(n, n)), jitter, d.X};
  const ComputerModel model = constant_model();
  const WeightedObjective w(d, model, g, lambda);
  const double t[1] = {0.4};
  const double expected = (d.Y.array() - 0.4).matrix().squaredNorm() / (n * lambda + jitter);
  EXPECT_NEAR(w(Point(t, 1)), expected, 1e-12 * expected);
}

TEST(WeightedObjective, EqualsProfiledLagrangianOverLambda) {
  const NamedSystem ex1 = make_system(SystemId::Ex1);
  const Dataset d = generate_dataset(ex1, 30, 0.3, RngStream(12, 0));
  const KernelSpec k = KernelSpec::matern32(0.25);
  std::mt19937_64 gen(12);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    const double t[1] = {u(gen)};
    const double lambda = default_lambda_grid()[static_cast<std::size_t>(trial * 6)];
    const Vector r = d.Y - ex1.model.evaluate(d.X, Point(t, 1));
    const RidgeProblem problem(d, ex1.model.evaluate(d.X, Point(t, 1)), k);
    const double profiled = profiled_lagrangian(problem.gram().sigma, r, lambda);
    const double w = weighted_objective(d, ex1.model, k, lambda, Point(t, 1));
    EXPECT_NEAR(w / (profiled / lambda), 1.0, 1e-9);
    EXPECT_GE(w, 0.0);
  }
}

TEST(OptPred, PerfectModelOneStep) {
  const NamedSystem ex2 = make_system(SystemId::Ex2);
  const Dataset d = noiseless(ex2.model, {0.3, 0.7}, 40, 13);
  const KernelSpec k = KernelSpec::matern32(0.3, 2);
  const CalibrationResult one = calibrate_optpred(d, ex2.model, k, OptPredMode::OneStep, RngStream(13, 0));
  EXPECT_NEAR(one.theta_hat[0], 0.3, 1e-4);
  EXPECT_NEAR(one.theta_hat[1], 0.7, 1e-4);
  ASSERT_TRUE(one.discrepancy.has_value());
  EXPECT_LE(one.discrepancy->coefficients.norm(), 1e-6);
  EXPECT_EQ(one.method, CalibrationMethod::OptPredOneStep);

  const CalibrationResult full = calibrate_optpred(d, ex2.model, k, OptPredMode::Full, RngStream(13, 0));
  EXPECT_NEAR(full.theta_hat[0], one.theta_hat[0], 1e-6);
  EXPECT_NEAR(full.theta_hat[1], one.theta_hat[1], 1e-6);
}

TEST(OptPred, FullModeTraceNonincreasing) {
  const NamedSystem ex1 = make_system(SystemId::Ex1);
  for (std::uint64_t rep = 0; rep < 5; ++rep) {
    const Dataset d = generate_dataset(ex1, 50, std::sqrt(0.1), RngStream(kDefaultSeed, rep));
    const CalibrationResult r =
        calibrate_optpred(d, ex1.model, KernelSpec::matern32(0.2), OptPredMode::Full, RngStream(14, rep), 10);
    ASSERT_GE(r.objective_trace.size(), 2u);
    for (std::size_t i = 1; i < r.objective_trace.size(); ++i)
      EXPECT_LE(r.objective_trace[i], r.objective_trace[i - 1] + 1e-12);
    EXPECT_TRUE(ex1.model.theta_box.contains(r.theta_hat));
  }
}

TEST(OptPred, OneStepDoesNotIncreaseWeightedObjective) {
  const NamedSystem ex1 = make_system(SystemId::Ex1);
  const Dataset d = generate_dataset(ex1, 50, std::sqrt(0.1), RngStream(15, 0));
  const CalibrationResult r =
      calibrate_optpred(d, ex1.model, KernelSpec::matern32(0.2), OptPredMode::OneStep, RngStream(15, 1));
  ASSERT_EQ(r.objective_trace.size(), 2u);
  EXPECT_LE(r.objective_trace[1], r.objective_trace[0]);
}

TEST(OptPred, LinearModelFullModeMatchesPartialSpline) {
  // eta(x, theta) = theta_1 + theta_2 x; optpred with frozen lambda is the partial spline.
  const NamedSystem ex1 = make_system(SystemId::Ex1);
  const Dataset d = generate_dataset(ex1, 40, 0.2, RngStream(16, 0));
  const ComputerModel line{"line", 1, Box({-20.0, -20.0}, {20.0, 20.0}),
                           [](Point x, Point t) { return t[0] + t[1] * x[0]; }};
  const KernelSpec k = KernelSpec::matern32(0.3);
  CalibrationOptions opts;
  opts.nelder_mead.diameter_tol = 1e-11;
  opts.nelder_mead.max_iterations = 5000;
  const CalibrationResult r = calibrate_optpred(d, line, k, OptPredMode::Full, RngStream(16, 1), 10, opts);
  ASSERT_TRUE(r.lambda_used.has_value());

  LinearComputerModel lin;
  lin.basis = {[](Point) { return 1.0; }, [](Point x) { return x[0]; }};
  const PartialSplineFit ps = partial_spline_limit(d, lin, k, *r.lambda_used);
  EXPECT_NEAR(r.theta_hat[0], ps.theta_hat(0), 1e-4);
  EXPECT_NEAR(r.theta_hat[1], ps.theta_hat(1), 1e-4);
}
