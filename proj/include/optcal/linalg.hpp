#pragma once

#include <Eigen/Dense>

#include "optcal/types.hpp"

namespace optcal {

/// Dense symmetric matrix; the constructor symmetrizes its input as (A + A^T) / 2.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(const Matrix& a);

  Eigen::Index order() const { return a_.rows(); }
  const Matrix& matrix() const { return a_; }
  double operator()(Eigen::Index i, Eigen::Index j) const { return a_(i, j); }

  /// Copy with `shift` added to the diagonal.
  SymMatrix shifted(double shift) const;

 private:
  Matrix a_;
};

/// Lower-triangular Cholesky factor L with A = L L^T.
class CholFactor {
 public:
  Eigen::Index order() const { return llt_.rows(); }
  Matrix lower() const { return llt_.matrixL(); }
  /// log det A = 2 sum log L_ii
  double log_det() const;

  const Eigen::LLT<Matrix>& llt() const { return llt_; }

 private:
  friend CholFactor cholesky(const SymMatrix& a);
  Eigen::LLT<Matrix> llt_;
};

/// Throws NotPositiveDefinite when a pivot is <= 0 or non-finite.
CholFactor cholesky(const SymMatrix& a);

/// x with A x = b, A given by its factor.
Vector solve_spd(const CholFactor& factor, const Vector& b);
Matrix solve_spd(const CholFactor& factor, const Matrix& b);

/// tr(Sigma (Sigma + n_lambda I)^{-1}) from one factorization and n solves.
double trace_of_influence(const SymMatrix& sigma, double n_lambda);

/// tr((Sigma + n_lambda I)^{-1}) for an already factored Sigma + n_lambda I.
double trace_of_inverse(const CholFactor& factor);

/// exp(A) for a square matrix of order <= 8 (scaling and squaring, diagonal Pade(6,6)).
Matrix matrix_exponential(const Matrix& a);

}  // namespace optcal
