#pragma once

#include <cstddef>
#include <functional>

#include "optcal/linalg.hpp"
#include "optcal/types.hpp"

namespace optcal {

inline constexpr double kDefaultJitter = 1e-8;
inline constexpr double kMaxJitter = 1e-4;

enum class KernelFamily { Matern32 };

/**
 * Reproducing kernel K(x, y) of the RKHS used for discrepancy estimation.
 *
 * Matern32: K = (1 + r/psi) exp(-r/psi) with r the Euclidean distance. The
 * native space of this kernel is norm-equivalent to the Sobolev space of
 * smoothness (d+3)/2; `smoothness` records m = 2 for d = 1.
 */
struct KernelSpec {
  KernelFamily family = KernelFamily::Matern32;
  double psi = 0.3;
  std::size_t dim = 1;

  KernelSpec() = default;
  KernelSpec(KernelFamily f, double scale, std::size_t d);

  static KernelSpec matern32(double psi, std::size_t dim = 1) { return {KernelFamily::Matern32, psi, dim}; }

  double smoothness() const { return (static_cast<double>(dim) + 3.0) / 2.0; }
};

/// K(x, y); throws DimensionMismatch when either point has the wrong dimension.
double kernel_eval(const KernelSpec& spec, Point x, Point y);

/// Kernel matrix plus the diagonal jitter that made it factorizable.
struct GramMatrix {
  SymMatrix sigma;
  double jitter = 0.0;
  PointMatrix points;
};

/**
 * Sigma_ij = K(X_i, X_j) + jitter * delta_ij.
 *
 * When the Cholesky check fails the jitter escalates by x10 (starting from
 * kDefaultJitter if `jitter` is zero) until kMaxJitter, then NotPositiveDefinite.
 */
GramMatrix gram(const KernelSpec& spec, const PointMatrix& points, double jitter = kDefaultJitter);

/// Cross-kernel block K(A_i, B_j).
Matrix cross_kernel(const KernelSpec& spec, const PointMatrix& a, const PointMatrix& b);

/// Uniform tensor grid with `per_axis` points per coordinate on [0,1]^dim.
PointMatrix uniform_grid(std::size_t per_axis, std::size_t dim);

/// g(G)^T (Sigma_G + jitter I)^{-1} g(G) on a uniform grid G; a lower approximation of ||g||_H^2.
double rkhs_norm_sq_approx(const KernelSpec& spec, const std::function<double(Point)>& g, std::size_t grid_size);

/// Same quadratic form with a pre-factored grid Gram matrix (reused across many g).
class RkhsNormApprox {
 public:
  RkhsNormApprox(const KernelSpec& spec, std::size_t grid_size);
  double operator()(const std::function<double(Point)>& g) const;
  const PointMatrix& grid() const { return grid_; }

 private:
  PointMatrix grid_;
  CholFactor factor_;
};

}  // namespace optcal
