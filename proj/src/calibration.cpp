#include "optcal/calibration.hpp"

#include <cmath>
#include <string>

#include "optcal/error.hpp"

namespace optcal {

Vector ComputerModel::evaluate(const PointMatrix& X, Point theta) const {
  if (theta.size() != num_params())
    throw DimensionMismatch("model " + name + ": expected " + std::to_string(num_params()) + " parameters");
  if (static_cast<std::size_t>(X.cols()) != input_dim)
    throw DimensionMismatch("model " + name + ": expected inputs of dimension " + std::to_string(input_dim));
  Vector out(X.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i) out(i) = eta(row(X, i), theta);
  return out;
}

std::string to_string(CalibrationMethod m) {
  switch (m) {
    case CalibrationMethod::LS:
      return "LS";
    case CalibrationMethod::L2:
      return "L2";
    case CalibrationMethod::OptPredOneStep:
      return "OptPred-OneStep";
    case CalibrationMethod::OptPredFull:
      return "OptPred-Full";
  }
  return "unknown";
}

namespace {

void check_model(const Dataset& data, const ComputerModel& model) {
  if (static_cast<std::size_t>(data.dim()) != model.input_dim)
    throw DimensionMismatch("dataset dimension " + std::to_string(data.dim()) + " does not match model " +
                            model.name);
  if (!model.eta) throw InvalidArgument("model " + model.name + " has no eta");
}

}  // namespace

CalibrationResult calibrate_ls(const Dataset& data, const ComputerModel& model, std::size_t starts,
                               RngStream stream, const NelderMeadOptions& nm) {
  check_model(data, model);
  const double n = static_cast<double>(data.size());
  const Objective loss = [&](Point theta) { return (data.Y - model.evaluate(data.X, theta)).squaredNorm() / n; };
  const BoxMinimum m = minimize_box(loss, model.theta_box, starts, stream, {}, nm);

  CalibrationResult r;
  r.theta_hat = m.argmin;
  r.method = CalibrationMethod::LS;
  r.optimizer_starts = m.starts;
  r.objective_evaluations = m.evaluations;
  r.best_objective = m.value;
  r.objective_trace = {m.value};
  return r;
}

CalibrationResult calibrate_l2_from_fit(const DiscrepancyFit& truth_fit, const ComputerModel& model,
                                        std::size_t mc_points, RngStream stream,
                                        const CalibrationOptions& options) {
  if (mc_points < 100) throw InvalidArgument("calibrate_l2: mc_points must be >= 100");
  RngStream mc_stream = stream.substream(1);
  const PointMatrix mc = uniform_points(mc_stream, mc_points, model.input_dim);
  Vector truth_hat(mc.rows());
  for (Eigen::Index i = 0; i < mc.rows(); ++i) truth_hat(i) = predict_discrepancy(truth_fit, row(mc, i));

  const double m = static_cast<double>(mc_points);
  const Objective loss = [&](Point theta) { return (truth_hat - model.evaluate(mc, theta)).squaredNorm() / m; };
  const BoxMinimum best =
      minimize_box(loss, model.theta_box, options.starts, stream.substream(2), {}, options.nelder_mead);

  CalibrationResult r;
  r.theta_hat = best.argmin;
  r.method = CalibrationMethod::L2;
  r.lambda_used = truth_fit.lambda;
  r.optimizer_starts = best.starts;
  r.objective_evaluations = best.evaluations;
  r.best_objective = best.value;
  r.objective_trace = {best.value};
  return r;
}

CalibrationResult calibrate_l2(const Dataset& data, const ComputerModel& model, const KernelSpec& kernel,
                               std::size_t mc_points, RngStream stream, const CalibrationOptions& options) {
  check_model(data, model);
  const RidgeProblem problem(data, Vector::Zero(data.size()), kernel);
  const double lambda = select_lambda_gcv(problem, options.lambda_grid);
  return calibrate_l2_from_fit(problem.fit(lambda), model, mc_points, stream, options);
}

WeightedObjective::WeightedObjective(const Dataset& data, const ComputerModel& model, const GramMatrix& g,
                                     double lambda)
    : data_(data), model_(model), lambda_(lambda) {
  if (!(lambda > 0.0)) throw InvalidArgument("weighted_objective: lambda must be positive");
  if (g.sigma.order() != data.size()) throw DimensionMismatch("weighted_objective: gram/dataset size mismatch");
  factor_ = cholesky(g.sigma.shifted(static_cast<double>(data.size()) * lambda));
}

WeightedObjective::WeightedObjective(const Dataset& data, const ComputerModel& model, const KernelSpec& kernel,
                                     double lambda)
    : WeightedObjective(data, model, gram(kernel, data.X), lambda) {}

double WeightedObjective::operator()(Point theta) const {
  const Vector r = data_.Y - model_.evaluate(data_.X, theta);
  return r.dot(solve_spd(factor_, r));
}

double weighted_objective(const Dataset& data, const ComputerModel& model, const KernelSpec& kernel, double lambda,
                          Point theta) {
  check_model(data, model);
  return WeightedObjective(data, model, kernel, lambda)(theta);
}

CalibrationResult calibrate_optpred_from(const Dataset& data, const ComputerModel& model, const KernelSpec& kernel,
                                         const CalibrationResult& least_squares, OptPredMode mode,
                                         RngStream stream, std::size_t max_outer,
                                         const CalibrationOptions& options) {
  check_model(data, model);
  if (mode == OptPredMode::Full && max_outer < 1) throw InvalidArgument("calibrate_optpred: max_outer must be >= 1");
  const std::size_t rounds = mode == OptPredMode::OneStep ? 1 : max_outer;

  const GramMatrix g = gram(kernel, data.X);
  std::vector<double> theta = least_squares.theta_hat;

  // Discrepancy at the least-squares theta; lambda is chosen here and then frozen.
  const RidgeProblem start_problem(g, data.Y - model.evaluate(data.X, theta), kernel);
  const double lambda = select_lambda_gcv(start_problem, options.lambda_grid);
  const WeightedObjective weighted(data, model, g, lambda);

  CalibrationResult r;
  r.method = mode == OptPredMode::OneStep ? CalibrationMethod::OptPredOneStep : CalibrationMethod::OptPredFull;
  r.lambda_used = lambda;
  r.optimizer_starts = least_squares.optimizer_starts;
  r.objective_evaluations = least_squares.objective_evaluations;
  r.objective_trace.push_back(weighted.lagrangian(theta));

  for (std::size_t round = 0; round < rounds; ++round) {
    const Objective objective = [&](Point t) { return weighted(t); };
    const BoxMinimum m = minimize_box(objective, model.theta_box, options.starts, stream.substream(100 + round),
                                      {theta}, options.nelder_mead);
    theta = m.argmin;
    r.optimizer_starts += m.starts;
    r.objective_evaluations += m.evaluations;
    r.best_objective = m.value;

    const double previous = r.objective_trace.back();
    const double current = lambda * m.value;
    r.objective_trace.push_back(current);
    if (mode == OptPredMode::Full && previous - current < 1e-8 * std::abs(previous)) break;
  }

  r.theta_hat = theta;
  r.discrepancy = RidgeProblem(g, data.Y - model.evaluate(data.X, theta), kernel).fit(lambda);
  return r;
}

CalibrationResult calibrate_optpred(const Dataset& data, const ComputerModel& model, const KernelSpec& kernel,
                                    OptPredMode mode, RngStream stream, std::size_t max_outer,
                                    const CalibrationOptions& options) {
  const CalibrationResult ls = calibrate_ls(data, model, options.starts, stream.substream(1), options.nelder_mead);
  return calibrate_optpred_from(data, model, kernel, ls, mode, stream, max_outer, options);
}

double predict_calibrated(const ComputerModel& model, const CalibrationResult& result, Point x) {
  double v = model.eta(x, result.theta_hat);
  if (result.discrepancy) v += predict_discrepancy(*result.discrepancy, x);
  return v;
}

}  // namespace optcal
