#include "optcal/kernels.hpp"

#include <cmath>
#include <string>

#include "optcal/error.hpp"

namespace optcal {

KernelSpec::KernelSpec(KernelFamily f, double scale, std::size_t d) : family(f), psi(scale), dim(d) {
  if (!(psi > 0.0) || !std::isfinite(psi)) throw InvalidArgument("KernelSpec: psi must be positive and finite");
  if (dim == 0) throw InvalidArgument("KernelSpec: dimension must be >= 1");
}

namespace {

inline double matern32(double r, double psi) {
  const double t = r / psi;
  return (1.0 + t) * std::exp(-t);
}

inline double distance(const double* x, const double* y, std::size_t d) {
  if (d == 1) return std::abs(x[0] - y[0]);
  double s = 0.0;
  for (std::size_t k = 0; k < d; ++k) {
    const double diff = x[k] - y[k];
    s += diff * diff;
  }
  return std::sqrt(s);
}

inline double eval_unchecked(const KernelSpec& spec, const double* x, const double* y) {
  switch (spec.family) {
    case KernelFamily::Matern32:
      return matern32(distance(x, y, spec.dim), spec.psi);
  }
  return 0.0;
}

}  // namespace

double kernel_eval(const KernelSpec& spec, Point x, Point y) {
  if (x.size() != spec.dim || y.size() != spec.dim)
    throw DimensionMismatch("kernel_eval: expected points of dimension " + std::to_string(spec.dim));
  return eval_unchecked(spec, x.data(), y.data());
}

Matrix cross_kernel(const KernelSpec& spec, const PointMatrix& a, const PointMatrix& b) {
  if (static_cast<std::size_t>(a.cols()) != spec.dim || static_cast<std::size_t>(b.cols()) != spec.dim)
    throw DimensionMismatch("cross_kernel: point dimension does not match kernel");
  Matrix k(a.rows(), b.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < b.rows(); ++j) k(i, j) = eval_unchecked(spec, &a(i, 0), &b(j, 0));
  return k;
}

GramMatrix gram(const KernelSpec& spec, const PointMatrix& points, double jitter) {
  if (jitter < 0.0) throw InvalidArgument("gram: jitter must be >= 0");
  if (static_cast<std::size_t>(points.cols()) != spec.dim)
    throw DimensionMismatch("gram: point dimension does not match kernel");
  const Eigen::Index n = points.rows();
  Matrix k(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    k(i, i) = 1.0;
    for (Eigen::Index j = 0; j < i; ++j) {
      const double v = eval_unchecked(spec, &points(i, 0), &points(j, 0));
      k(i, j) = v;
      k(j, i) = v;
    }
  }
  const SymMatrix base(k);
  double current = jitter;
  while (true) {
    SymMatrix candidate = base.shifted(current);
    try {
      (void)cholesky(candidate);
      return GramMatrix{std::move(candidate), current, points};
    } catch (const NotPositiveDefinite&) {
      if (current >= kMaxJitter)
        throw NotPositiveDefinite("gram: kernel matrix not positive definite at maximum jitter " +
                                  std::to_string(kMaxJitter) + " (duplicated points?)");
      current = current == 0.0 ? kDefaultJitter : std::min(current * 10.0, kMaxJitter);
    }
  }
}

PointMatrix uniform_grid(std::size_t per_axis, std::size_t dim) {
  if (per_axis < 2) throw InvalidArgument("uniform_grid: need at least 2 points per axis");
  Eigen::Index total = 1;
  for (std::size_t k = 0; k < dim; ++k) total *= static_cast<Eigen::Index>(per_axis);
  PointMatrix g(total, static_cast<Eigen::Index>(dim));
  const double step = 1.0 / static_cast<double>(per_axis - 1);
  for (Eigen::Index i = 0; i < total; ++i) {
    Eigen::Index rem = i;
    for (std::size_t k = 0; k < dim; ++k) {
      g(i, static_cast<Eigen::Index>(k)) = static_cast<double>(rem % static_cast<Eigen::Index>(per_axis)) * step;
      rem /= static_cast<Eigen::Index>(per_axis);
    }
  }
  return g;
}

RkhsNormApprox::RkhsNormApprox(const KernelSpec& spec, std::size_t grid_size)
    : grid_(uniform_grid(grid_size, spec.dim)), factor_(cholesky(gram(spec, grid_).sigma)) {}

double RkhsNormApprox::operator()(const std::function<double(Point)>& g) const {
  Vector values(grid_.rows());
  for (Eigen::Index i = 0; i < grid_.rows(); ++i) values(i) = g(row(grid_, i));
  // g^T A^{-1} g = ||L^{-1} g||^2
  factor_.llt().matrixL().solveInPlace(values);
  return values.squaredNorm();
}

double rkhs_norm_sq_approx(const KernelSpec& spec, const std::function<double(Point)>& g, std::size_t grid_size) {
  return RkhsNormApprox(spec, grid_size)(g);
}

}  // namespace optcal
