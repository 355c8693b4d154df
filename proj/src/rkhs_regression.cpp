#include "optcal/rkhs_regression.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "optcal/error.hpp"

namespace optcal {

std::vector<double> default_lambda_grid() {
  constexpr int count = 60;
  std::vector<double> grid(count);
  for (int k = 0; k < count; ++k) grid[k] = std::pow(10.0, -8.0 + 9.0 * k / (count - 1));
  return grid;
}

namespace {

void check_lambda(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw InvalidArgument("lambda must be positive and finite");
}

Vector residual_of(const Dataset& data, const Vector& eta_at_X) {
  if (eta_at_X.size() != data.size())
    throw DimensionMismatch("eta_at_X has " + std::to_string(eta_at_X.size()) + " entries, dataset has " +
                            std::to_string(data.size()));
  return data.Y - eta_at_X;
}

}  // namespace

RidgeProblem::RidgeProblem(const Dataset& data, const Vector& eta_at_X, const KernelSpec& kernel, double jitter)
    : gram_(optcal::gram(kernel, data.X, jitter)), residual_(residual_of(data, eta_at_X)), kernel_(kernel) {}

RidgeProblem::RidgeProblem(GramMatrix g, Vector residual, const KernelSpec& kernel)
    : gram_(std::move(g)), residual_(std::move(residual)), kernel_(kernel) {
  if (residual_.size() != gram_.sigma.order()) throw DimensionMismatch("RidgeProblem: residual/gram size mismatch");
}

CholFactor RidgeProblem::factor(double lambda) const {
  check_lambda(lambda);
  return cholesky(gram_.sigma.shifted(static_cast<double>(size()) * lambda));
}

DiscrepancyFit RidgeProblem::fit(double lambda) const {
  const CholFactor f = factor(lambda);
  return DiscrepancyFit{solve_spd(f, residual_), lambda, kernel_, gram_.points, residual_, gram_.jitter};
}

double RidgeProblem::gcv(double lambda) const {
  const double n = static_cast<double>(size());
  const CholFactor f = factor(lambda);
  // r - A r = n lambda M^{-1} r and I - A = n lambda M^{-1}
  const Vector c = solve_spd(f, residual_);
  const double nl = n * lambda;
  const double trace_complement = nl * trace_of_inverse(f);
  if (!(trace_complement > 1e-12 * n))
    throw DegenerateTrace("gcv: tr(I - A(lambda)) vanished at lambda = " + std::to_string(lambda));
  const double rss = (nl * c).squaredNorm() / n;
  const double denom = trace_complement / n;
  return rss / (denom * denom);
}

DiscrepancyFit fit_ridge(const Dataset& data, const Vector& eta_at_X, const KernelSpec& kernel, double lambda) {
  check_lambda(lambda);
  return RidgeProblem(data, eta_at_X, kernel).fit(lambda);
}

double predict_discrepancy(const DiscrepancyFit& fit, Point x) {
  if (x.size() != fit.kernel.dim)
    throw DimensionMismatch("predict_discrepancy: expected a point of dimension " + std::to_string(fit.kernel.dim));
  double s = 0.0;
  for (Eigen::Index i = 0; i < fit.coefficients.size(); ++i)
    s += fit.coefficients(i) * kernel_eval(fit.kernel, row(fit.points, i), x);
  return s;
}

double gcv_score(const Dataset& data, const Vector& eta_at_X, const KernelSpec& kernel, double lambda) {
  return RidgeProblem(data, eta_at_X, kernel).gcv(lambda);
}

double select_lambda_gcv(const RidgeProblem& problem, const std::vector<double>& grid) {
  if (grid.empty()) throw InvalidArgument("select_lambda_gcv: empty grid");
  double best_lambda = std::numeric_limits<double>::quiet_NaN();
  double best_score = std::numeric_limits<double>::infinity();
  for (double lambda : grid) {
    check_lambda(lambda);
    double score;
    try {
      score = problem.gcv(lambda);
    } catch (const DegenerateTrace&) {
      continue;
    } catch (const NotPositiveDefinite&) {
      continue;
    }
    if (!std::isfinite(score)) continue;
    // Order-free rule: lower score wins, equal score goes to the larger lambda.
    if (score < best_score || (score == best_score && lambda > best_lambda)) {
      best_score = score;
      best_lambda = lambda;
    }
  }
  if (std::isnan(best_lambda)) throw AllDegenerate("select_lambda_gcv: every grid point was degenerate");
  return best_lambda;
}

double select_lambda_gcv(const Dataset& data, const Vector& eta_at_X, const KernelSpec& kernel,
                         const std::vector<double>& grid) {
  return select_lambda_gcv(RidgeProblem(data, eta_at_X, kernel), grid);
}

double lagrangian_value(const SymMatrix& sigma, const Vector& residual, const Vector& c, double lambda) {
  // At small lambda the residual r - Sigma c is a near-total cancellation; extended precision keeps
  // the value usable as an independent check of the profiled form.
  using Ext = Eigen::Matrix<long double, Eigen::Dynamic, 1>;
  const Ext ce = c.cast<long double>();
  const Ext fitted = sigma.matrix().cast<long double>() * ce;
  const long double n = static_cast<long double>(residual.size());
  const long double fit_term = (residual.cast<long double>() - fitted).squaredNorm() / n;
  return static_cast<double>(fit_term + static_cast<long double>(lambda) * ce.dot(fitted));
}

double profiled_lagrangian(const SymMatrix& sigma, const Vector& residual, double lambda) {
  check_lambda(lambda);
  const double n = static_cast<double>(residual.size());
  const CholFactor f = cholesky(sigma.shifted(n * lambda));
  return lambda * residual.dot(solve_spd(f, residual));
}

}  // namespace optcal
