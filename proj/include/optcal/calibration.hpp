#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "optcal/kernels.hpp"
#include "optcal/optimizer.hpp"
#include "optcal/rkhs_regression.hpp"
#include "optcal/rng.hpp"
#include "optcal/types.hpp"

namespace optcal {

/// Parametric computer model eta(x, theta) on [0,1]^d x theta_box.
struct ComputerModel {
  std::string name;
  std::size_t input_dim = 1;
  Box theta_box;
  std::function<double(Point x, Point theta)> eta;

  std::size_t num_params() const { return theta_box.dim(); }
  /// eta(X_i, theta) for every row of X.
  Vector evaluate(const PointMatrix& X, Point theta) const;
};

enum class CalibrationMethod { LS, L2, OptPredOneStep, OptPredFull };

std::string to_string(CalibrationMethod m);

enum class OptPredMode { OneStep, Full };

struct CalibrationResult {
  std::vector<double> theta_hat;
  CalibrationMethod method = CalibrationMethod::LS;
  std::optional<DiscrepancyFit> discrepancy;
  std::optional<double> lambda_used;
  /// Lagrangian values: at the least-squares start, then after each (theta, discrepancy) update.
  std::vector<double> objective_trace;
  std::size_t optimizer_starts = 0;
  std::size_t objective_evaluations = 0;
  double best_objective = 0.0;
};

struct CalibrationOptions {
  std::size_t starts = 10;
  std::vector<double> lambda_grid = default_lambda_grid();
  NelderMeadOptions nelder_mead{};
};

/// theta minimizing (1/n) sum_i [Y_i - eta(X_i, theta)]^2.
CalibrationResult calibrate_ls(const Dataset& data, const ComputerModel& model, std::size_t starts,
                               RngStream stream, const NelderMeadOptions& nm = {});

/**
 * L2 calibration: fit the truth nonparametrically (GCV lambda), then pick the
 * theta minimizing the Monte Carlo estimate of ||zeta_hat - eta(., theta)||^2
 * over `mc_points` uniform draws fixed for the whole call.
 */
CalibrationResult calibrate_l2(const Dataset& data, const ComputerModel& model, const KernelSpec& kernel,
                               std::size_t mc_points, RngStream stream, const CalibrationOptions& options = {});

/// calibrate_l2 for an already fitted nonparametric estimate of the truth.
CalibrationResult calibrate_l2_from_fit(const DiscrepancyFit& truth_fit, const ComputerModel& model,
                                        std::size_t mc_points, RngStream stream,
                                        const CalibrationOptions& options = {});

/// (Y - eta(X, theta))^T (Sigma + n lambda I)^{-1} (Y - eta(X, theta)).
double weighted_objective(const Dataset& data, const ComputerModel& model, const KernelSpec& kernel, double lambda,
                          Point theta);

/// weighted_objective with Sigma + n lambda I factored once; used inside the optimizer.
class WeightedObjective {
 public:
  WeightedObjective(const Dataset& data, const ComputerModel& model, const KernelSpec& kernel, double lambda);
  WeightedObjective(const Dataset& data, const ComputerModel& model, const GramMatrix& gram, double lambda);

  double operator()(Point theta) const;
  /// lambda times the weighted objective: the Lagrangian minimized over the discrepancy.
  double lagrangian(Point theta) const { return lambda_ * (*this)(theta); }

 private:
  const Dataset& data_;
  const ComputerModel& model_;
  double lambda_;
  CholFactor factor_;
};

/**
 * Prediction-oriented calibration.
 *
 * OneStep: theta <- least squares; fit the discrepancy with GCV-chosen lambda
 * and freeze lambda; theta <- argmin of the weighted objective; refit.
 * Full: repeat the last two steps until the Lagrangian drops by less than
 * 1e-8 (relative) or `max_outer` rounds have run.
 */
CalibrationResult calibrate_optpred(const Dataset& data, const ComputerModel& model, const KernelSpec& kernel,
                                    OptPredMode mode, RngStream stream, std::size_t max_outer = 10,
                                    const CalibrationOptions& options = {});

/// Same algorithm, starting from an existing least-squares result (saves re-running it).
CalibrationResult calibrate_optpred_from(const Dataset& data, const ComputerModel& model, const KernelSpec& kernel,
                                         const CalibrationResult& least_squares, OptPredMode mode,
                                         RngStream stream, std::size_t max_outer = 10,
                                         const CalibrationOptions& options = {});

/// eta(x, theta) + discrepancy(x) for a calibrated model.
double predict_calibrated(const ComputerModel& model, const CalibrationResult& result, Point x);

}  // namespace optcal
