#include "optcal/types.hpp"

#include <cmath>
#include <string>

#include "optcal/error.hpp"

namespace optcal {

Box::Box(std::vector<double> lo, std::vector<double> hi) : lower(std::move(lo)), upper(std::move(hi)) {
  if (lower.size() != upper.size()) throw DimensionMismatch("Box: lower/upper sizes differ");
  if (lower.empty()) throw InvalidArgument("Box: dimension must be >= 1");
  for (std::size_t k = 0; k < lower.size(); ++k)
    if (!(lower[k] <= upper[k])) throw InvalidArgument("Box: lower bound exceeds upper bound");
}

Box Box::unit(std::size_t dim) { return Box(std::vector<double>(dim, 0.0), std::vector<double>(dim, 1.0)); }

bool Box::contains(Point p) const {
  if (p.size() != dim()) return false;
  for (std::size_t k = 0; k < dim(); ++k)
    if (p[k] < lower[k] || p[k] > upper[k]) return false;
  return true;
}

Dataset::Dataset(PointMatrix x, Vector y) : X(std::move(x)), Y(std::move(y)) {
  if (X.rows() != Y.size())
    throw DimensionMismatch("Dataset: " + std::to_string(X.rows()) + " points but " + std::to_string(Y.size()) +
                            " responses");
  if (Y.size() < 1) throw InvalidArgument("Dataset: needs at least one observation");
  if (X.cols() < 1) throw InvalidArgument("Dataset: input dimension must be >= 1");
  if (!X.allFinite() || !Y.allFinite()) throw InvalidArgument("Dataset: non-finite entry");
}

bool Dataset::in_unit_cube() const { return (X.array() >= 0.0).all() && (X.array() <= 1.0).all(); }

Dataset Dataset::subset(std::span<const Eigen::Index> indices) const {
  PointMatrix x(static_cast<Eigen::Index>(indices.size()), X.cols());
  Vector y(static_cast<Eigen::Index>(indices.size()));
  for (std::size_t i = 0; i < indices.size(); ++i) {
    x.row(static_cast<Eigen::Index>(i)) = X.row(indices[i]);
    y(static_cast<Eigen::Index>(i)) = Y(indices[i]);
  }
  return Dataset(std::move(x), std::move(y));
}

}  // namespace optcal
