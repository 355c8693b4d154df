#include "optcal/bayes_link.hpp"

#include <cmath>
#include <string>

#include "optcal/error.hpp"

namespace optcal {

Matrix LinearComputerModel::design(const PointMatrix& X) const {
  Matrix t(X.rows(), static_cast<Eigen::Index>(basis.size()));
  for (Eigen::Index i = 0; i < X.rows(); ++i)
    for (std::size_t j = 0; j < basis.size(); ++j) t(i, static_cast<Eigen::Index>(j)) = basis[j](row(X, i));
  return t;
}

Vector LinearComputerModel::features(Point x) const {
  Vector h(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t j = 0; j < basis.size(); ++j) h(static_cast<Eigen::Index>(j)) = basis[j](x);
  return h;
}

namespace {

struct Whitened {
  GramMatrix gram;
  CholFactor m_factor;
  Matrix t;
  Matrix minv_t;  // M^{-1} T
  Vector minv_y;  // M^{-1} Y
  Matrix g;       // T^T M^{-1} T
  Vector b;       // T^T M^{-1} Y
};

Whitened whiten(const Dataset& data, const LinearComputerModel& model, const KernelSpec& kernel, double lambda) {
  if (model.basis.empty()) throw InvalidArgument("linear computer model needs at least one basis function");
  if (!(lambda > 0.0)) throw InvalidArgument("lambda must be positive");
  Whitened w{gram(kernel, data.X), CholFactor{}, model.design(data.X), {}, {}, {}, {}};
  w.m_factor = cholesky(w.gram.sigma.shifted(static_cast<double>(data.size()) * lambda));
  w.minv_t = solve_spd(w.m_factor, w.t);
  w.minv_y = solve_spd(w.m_factor, data.Y);
  w.g = w.t.transpose() * w.minv_t;
  w.g = 0.5 * (w.g + w.g.transpose());
  w.b = w.t.transpose() * w.minv_y;
  return w;
}

DiscrepancyFit make_fit(const Dataset& data, const KernelSpec& kernel, double lambda, const Whitened& w,
                        const Vector& theta) {
  DiscrepancyFit fit;
  fit.coefficients = w.minv_y - w.minv_t * theta;
  fit.lambda = lambda;
  fit.kernel = kernel;
  fit.points = data.X;
  fit.residual = data.Y - w.t * theta;
  fit.jitter = w.gram.jitter;
  return fit;
}

}  // namespace

PosteriorMean::PosteriorMean(const Dataset& data, const LinearComputerModel& model, const KernelSpec& kernel,
                             const BayesHyper& hyper)
    : model_(model) {
  if (!(hyper.alpha > 0.0) || !std::isfinite(hyper.alpha))
    throw InvalidArgument("posterior_mean: alpha must be positive and finite");
  if (!(hyper.beta > 0.0) || !(hyper.sigma2 > 0.0))
    throw InvalidArgument("posterior_mean: beta and sigma2 must be positive");
  const double lambda = hyper.lambda(data.size());
  const Whitened w = whiten(data, model, kernel, lambda);
  const double a = hyper.alpha / hyper.beta;
  Matrix inner = w.g;
  inner.diagonal().array() += 1.0 / a;
  theta_ = cholesky(SymMatrix(inner)).llt().solve(w.b);
  fit_ = make_fit(data, kernel, lambda, w, theta_);
}

double PosteriorMean::operator()(Point x) const {
  return model_.features(x).dot(theta_) + predict_discrepancy(fit_, x);
}

double posterior_mean(const Dataset& data, const LinearComputerModel& model, const KernelSpec& kernel,
                      const BayesHyper& hyper, Point x) {
  return PosteriorMean(data, model, kernel, hyper)(x);
}

double PartialSplineFit::predict(const LinearComputerModel& model, Point x) const {
  return model.features(x).dot(theta_hat) + predict_discrepancy(discrepancy, x);
}

PartialSplineFit partial_spline_limit(const Dataset& data, const LinearComputerModel& model, const KernelSpec& kernel,
                                      double lambda) {
  const Whitened w = whiten(data, model, kernel, lambda);
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(w.g, Eigen::EigenvaluesOnly);
  if (!(eig.eigenvalues().minCoeff() > 1e-10))
    throw RankDeficientBasis("partial_spline_limit: T^T M^{-1} T is singular (smallest eigenvalue " +
                             std::to_string(eig.eigenvalues().minCoeff()) + ")");
  const Vector theta = cholesky(SymMatrix(w.g)).llt().solve(w.b);
  return PartialSplineFit{theta, make_fit(data, kernel, lambda, w, theta)};
}

std::vector<double> verify_proposition_limit(const Dataset& data, const LinearComputerModel& model,
                                             const KernelSpec& kernel, const BayesHyper& hyper,
                                             const std::vector<double>& alpha_grid, const PointMatrix& test_points) {
  for (std::size_t k = 1; k < alpha_grid.size(); ++k)
    if (!(alpha_grid[k] > alpha_grid[k - 1])) throw InvalidArgument("verify_proposition_limit: alpha grid must increase");
  const PartialSplineFit limit = partial_spline_limit(data, model, kernel, hyper.lambda(data.size()));
  Vector limit_values(test_points.rows());
  for (Eigen::Index i = 0; i < test_points.rows(); ++i) limit_values(i) = limit.predict(model, row(test_points, i));

  std::vector<double> deviations;
  deviations.reserve(alpha_grid.size());
  for (double alpha : alpha_grid) {
    BayesHyper h = hyper;
    h.alpha = alpha;
    const PosteriorMean mean(data, model, kernel, h);
    double worst = 0.0;
    for (Eigen::Index i = 0; i < test_points.rows(); ++i)
      worst = std::max(worst, std::abs(mean(row(test_points, i)) - limit_values(i)));
    deviations.push_back(worst);
  }
  return deviations;
}

}  // namespace optcal
