#pragma once

#include <vector>

#include "optcal/kernels.hpp"
#include "optcal/linalg.hpp"
#include "optcal/types.hpp"

namespace optcal {

/// 60 log-spaced values on [1e-8, 1e1].
std::vector<double> default_lambda_grid();

/**
 * Kernel ridge fit h = sum_i c_i K(X_i, .) of a residual vector r.
 *
 * For a calibration residual r = Y - eta(X, theta) this is the discrepancy
 * estimate; with r = Y it is the plain nonparametric estimate of the truth.
 */
struct DiscrepancyFit {
  Vector coefficients;
  double lambda = 0.0;
  KernelSpec kernel;
  PointMatrix points;
  Vector residual;
  double jitter = 0.0;
};

/// Kernel matrix of a dataset together with the residual it will regress.
class RidgeProblem {
 public:
  RidgeProblem(const Dataset& data, const Vector& eta_at_X, const KernelSpec& kernel,
               double jitter = kDefaultJitter);
  RidgeProblem(GramMatrix gram, Vector residual, const KernelSpec& kernel);

  Eigen::Index size() const { return residual_.size(); }
  const GramMatrix& gram() const { return gram_; }
  const Vector& residual() const { return residual_; }
  const KernelSpec& kernel() const { return kernel_; }

  /// Cholesky factor of Sigma + n lambda I.
  CholFactor factor(double lambda) const;

  DiscrepancyFit fit(double lambda) const;
  /// GCV(lambda); throws DegenerateTrace when tr(I - A) <= 1e-12 n.
  double gcv(double lambda) const;

 private:
  GramMatrix gram_;
  Vector residual_;
  KernelSpec kernel_;
};

/// Solves (Sigma + n lambda I) c = Y - eta_at_X.
DiscrepancyFit fit_ridge(const Dataset& data, const Vector& eta_at_X, const KernelSpec& kernel, double lambda);

/// sum_i c_i K(X_i, x)
double predict_discrepancy(const DiscrepancyFit& fit, Point x);

/// [n^-1 ||r - A r||^2] / [n^-1 tr(I - A)]^2 with A = Sigma (Sigma + n lambda I)^{-1}.
double gcv_score(const Dataset& data, const Vector& eta_at_X, const KernelSpec& kernel, double lambda);

/// Grid minimizer of gcv_score; ties go to the larger lambda. Degenerate grid points are skipped.
double select_lambda_gcv(const Dataset& data, const Vector& eta_at_X, const KernelSpec& kernel,
                         const std::vector<double>& grid);
double select_lambda_gcv(const RidgeProblem& problem, const std::vector<double>& grid);

/// (1/n) ||r - Sigma c||^2 + lambda c^T Sigma c for an arbitrary coefficient vector.
double lagrangian_value(const SymMatrix& sigma, const Vector& residual, const Vector& c, double lambda);

/// lambda r^T (Sigma + n lambda I)^{-1} r, the Lagrangian minimized over the discrepancy.
double profiled_lagrangian(const SymMatrix& sigma, const Vector& residual, double lambda);

}  // namespace optcal
