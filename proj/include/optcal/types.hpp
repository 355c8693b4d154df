#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <span>
#include <vector>

namespace optcal {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// One point per row; rows are contiguous so a row can be viewed as a span.
using PointMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using Point = std::span<const double>;

inline Point row(const PointMatrix& points, Eigen::Index i) {
  return {points.data() + i * points.cols(), static_cast<std::size_t>(points.cols())};
}

/// Axis-aligned box [lower, upper] in R^p.
struct Box {
  std::vector<double> lower;
  std::vector<double> upper;

  Box() = default;
  Box(std::vector<double> lo, std::vector<double> hi);

  static Box unit(std::size_t dim);

  std::size_t dim() const { return lower.size(); }
  double width(std::size_t k) const { return upper[k] - lower[k]; }
  bool contains(Point p) const;
};

/// Physical observations: n design points (rows of X) and their noisy responses.
struct Dataset {
  PointMatrix X;
  Vector Y;

  Dataset() = default;
  /// Validates |X| == |Y|, n >= 1, finite entries.
  Dataset(PointMatrix x, Vector y);

  Eigen::Index size() const { return Y.size(); }
  Eigen::Index dim() const { return X.cols(); }
  Point point(Eigen::Index i) const { return row(X, i); }
  bool in_unit_cube() const;

  /// Rows selected by `indices`, in that order.
  Dataset subset(std::span<const Eigen::Index> indices) const;
};

}  // namespace optcal
