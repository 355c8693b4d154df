#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "optcal/bayes_link.hpp"
#include "optcal/calibration.hpp"
#include "optcal/kernels.hpp"
#include "optcal/models.hpp"
#include "optcal/rng.hpp"

namespace optcal {

/// Predictors compared in the benchmark tables.
enum class Method { NoBiasCorr, NP, LSCal, OptCal };

std::string method_name(Method m);
Method method_from_name(const std::string& name);

using Predictor = std::function<double(Point)>;

struct PsiPolicy {
  /// Empty means five-fold cross-validation over `grid`.
  std::optional<double> fixed;
  std::vector<double> grid;
};

/// {0.05, 0.1, 0.2, 0.3, 0.5, 1.0} scaled by sqrt(d).
std::vector<double> default_psi_grid(std::size_t dim);

struct ExperimentConfig {
  std::string system = "ex1";
  std::size_t n = 50;
  std::vector<double> sigma2 = {0.1};
  std::size_t replicates = 100;
  std::size_t mc_test_points = 100000;
  std::vector<Method> methods = {Method::NoBiasCorr, Method::NP, Method::LSCal, Method::OptCal};
  PsiPolicy psi;
  std::vector<double> lambda_grid = default_lambda_grid();
  std::size_t starts = 10;
  std::size_t l2_mc_points = 4096;
  OptPredMode optcal_mode = OptPredMode::OneStep;
  std::size_t max_outer = 10;
  std::uint64_t seed = kDefaultSeed;
  std::size_t threads = 1;
  std::string output;

  /// Throws InvalidArgument on a violated invariant.
  void validate() const;
  CalibrationOptions calibration_options() const;
};

/// Parses flat key=value lines ('#' starts a comment, lists are comma-separated).
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::string& path);

/**
 * Five-fold cross-validation for the kernel scale.
 *
 * Folds come from a seeded shuffle. For each psi the ridge fit (GCV lambda
 * on the four training folds) predicts eta_at_X + discrepancy on the held-out
 * fold; the psi with the smallest summed squared error wins, ties to the larger psi.
 */
double cv5_select_psi(const Dataset& data, KernelFamily family, const std::vector<double>& psi_grid,
                      const Vector& eta_at_X, RngStream stream,
                      const std::vector<double>& lambda_grid = default_lambda_grid());

/// Monte Carlo test inputs with the noiseless truth at each.
struct TestSet {
  PointMatrix x;
  Vector truth;
};

TestSet make_test_set(const NamedSystem& system, std::size_t points, RngStream stream);
double pmse(const Predictor& predictor, const TestSet& test);
/// Mean of [predictor(x*) - zeta(x*)]^2 over uniform x*.
double pmse(const Predictor& predictor, const NamedSystem& system, std::size_t mc_test_points, RngStream stream);

struct PredictorSet {
  std::map<Method, Predictor> predictors;
  double psi_np = 0.0;
  double psi_calibration = 0.0;
  std::optional<CalibrationResult> l2;
  std::optional<CalibrationResult> ls;
  std::optional<DiscrepancyFit> ls_discrepancy;
  std::optional<CalibrationResult> optpred;
};

PredictorSet build_predictors(const Dataset& data, const NamedSystem& system, const ExperimentConfig& config,
                              RngStream stream);

struct ReplicateRecord {
  std::size_t replicate = 0;
  double sigma2 = 0.0;
  std::map<Method, double> pmse;
  double psi_np = 0.0;
  double psi_calibration = 0.0;
  std::map<Method, std::vector<double>> theta;
  std::vector<double> optcal_trace;
};

struct PmseRow {
  Method method;
  double sigma2;
  double mean_pmse;
  double se_pmse;
  std::size_t replicates;
};

struct PmseReport {
  /// Sorted by (method name, sigma2).
  std::vector<PmseRow> rows;
  /// Ordered by (sigma2 index, replicate).
  std::vector<ReplicateRecord> records;

  const PmseRow* find(Method m, double sigma2) const;
};

/// Runs every (replicate, sigma2) cell; results do not depend on config.threads.
PmseReport run_experiment(const ExperimentConfig& config);

void write_report_csv(const PmseReport& report, std::ostream& out);
void write_replicates_csv(const PmseReport& report, std::ostream& out);

/// Sum with pairwise splitting, so the result depends only on the element order.
double pairwise_sum(std::span<const double> values);

/// "%.17g"
std::string format_real(double v);

enum class ProfileNorm { L2, Rkhs };

struct ProfileOptions {
  /// Median (and mode) of the 5-fold CV choice on ex1 at n = 50, sigma2 = 0.1.
  double psi = 1.0;
  double theta_step = 1e-3;
  std::size_t rkhs_grid = 200;
  std::size_t quadrature_points = 4096;
};

struct ProfilePoint {
  double theta;
  double norm_sq;
};

/// ||zeta - eta(., theta)||^2 over a theta grid for a one-parameter system.
std::vector<ProfilePoint> discrepancy_profile(const NamedSystem& system, ProfileNorm norm,
                                              const ProfileOptions& options);

/// Indices of interior local minima of the profile.
std::vector<std::size_t> profile_local_minima(const std::vector<ProfilePoint>& profile);

}  // namespace optcal

namespace optcal {

/// Random linear-basis instance for checking the large-alpha Bayes limit.
struct PropositionInstance {
  Dataset data;
  LinearComputerModel model;
  KernelSpec kernel;
  PointMatrix test_points;
};

/// n uniform inputs, polynomial basis 1, x, ..., x^{p-1}, Y = ex1 truth + N(0, sigma2).
PropositionInstance make_proposition_instance(std::size_t n, std::size_t p, double sigma2, double psi,
                                              std::size_t test_points, RngStream stream);

}  // namespace optcal
