#pragma once

#include <functional>
#include <limits>
#include <vector>

#include "optcal/kernels.hpp"
#include "optcal/rkhs_regression.hpp"
#include "optcal/types.hpp"

namespace optcal {

/// eta(x, theta) = sum_j theta_j h_j(x).
struct LinearComputerModel {
  std::vector<std::function<double(Point)>> basis;

  std::size_t num_params() const { return basis.size(); }
  /// T_ij = h_j(X_i)
  Matrix design(const PointMatrix& X) const;
  Vector features(Point x) const;
};

/// Prior theta ~ N(0, alpha I), delta ~ GP(0, beta K), noise N(0, sigma2).
struct BayesHyper {
  double alpha = 1.0;
  double beta = 1.0;
  double sigma2 = 1.0;

  /// lambda = sigma2 / (n beta)
  double lambda(Eigen::Index n) const { return sigma2 / (static_cast<double>(n) * beta); }
};

/**
 * Posterior mean E[zeta(x) | Y] under the Gaussian prior above.
 *
 * With a = alpha/beta, M = Sigma + n lambda I and G = T^T M^{-1} T the
 * mean is h(x)^T theta_a + k(x)^T M^{-1} (Y - T theta_a) where
 * theta_a = (I/a + G)^{-1} T^T M^{-1} Y. This is the Woodbury form of
 * [a h(x)^T T^T + k(x)^T] (a T T^T + M)^{-1} Y and stays well conditioned
 * for large alpha.
 */
class PosteriorMean {
 public:
  PosteriorMean(const Dataset& data, const LinearComputerModel& model, const KernelSpec& kernel,
                const BayesHyper& hyper);
  double operator()(Point x) const;
  const Vector& theta() const { return theta_; }

 private:
  const LinearComputerModel& model_;
  DiscrepancyFit fit_;
  Vector theta_;
};

double posterior_mean(const Dataset& data, const LinearComputerModel& model, const KernelSpec& kernel,
                      const BayesHyper& hyper, Point x);

struct PartialSplineFit {
  Vector theta_hat;
  DiscrepancyFit discrepancy;

  double predict(const LinearComputerModel& model, Point x) const;
};

/**
 * Joint minimizer over (theta, delta) of
 *   (1/n) sum_i [Y_i - T_i theta - delta(X_i)]^2 + lambda ||delta||_H^2,
 * i.e. theta = (T^T M^{-1} T)^{-1} T^T M^{-1} Y and c = M^{-1}(Y - T theta).
 * Throws RankDeficientBasis when T^T M^{-1} T has an eigenvalue <= 1e-10.
 */
PartialSplineFit partial_spline_limit(const Dataset& data, const LinearComputerModel& model, const KernelSpec& kernel,
                                      double lambda);

/// max over test points of |posterior mean at alpha - partial spline predictor|, one entry per alpha.
std::vector<double> verify_proposition_limit(const Dataset& data, const LinearComputerModel& model,
                                             const KernelSpec& kernel, const BayesHyper& hyper,
                                             const std::vector<double>& alpha_grid, const PointMatrix& test_points);

}  // namespace optcal
