#include "optcal/linalg.hpp"

#include <cmath>
#include <string>

#include "optcal/error.hpp"

namespace optcal {

SymMatrix::SymMatrix(const Matrix& a) {
  if (a.rows() != a.cols()) throw DimensionMismatch("SymMatrix: matrix is not square");
  a_ = 0.5 * (a + a.transpose());
}

SymMatrix SymMatrix::shifted(double shift) const {
  SymMatrix out;
  out.a_ = a_;
  out.a_.diagonal().array() += shift;
  return out;
}

CholFactor cholesky(const SymMatrix& a) {
  CholFactor f;
  f.llt_.compute(a.matrix());
  if (f.llt_.info() != Eigen::Success)
    throw NotPositiveDefinite("cholesky: non-positive pivot in matrix of order " + std::to_string(a.order()));
  const auto diag = f.llt_.matrixLLT().diagonal();
  if (!diag.allFinite() || (diag.array() <= 0.0).any())
    throw NotPositiveDefinite("cholesky: non-positive pivot in matrix of order " + std::to_string(a.order()));
  return f;
}

double CholFactor::log_det() const { return 2.0 * llt_.matrixLLT().diagonal().array().log().sum(); }

Vector solve_spd(const CholFactor& factor, const Vector& b) {
  if (b.size() != factor.order())
    throw DimensionMismatch("solve_spd: rhs has " + std::to_string(b.size()) + " rows, factor has order " +
                            std::to_string(factor.order()));
  return factor.llt().solve(b);
}

Matrix solve_spd(const CholFactor& factor, const Matrix& b) {
  if (b.rows() != factor.order()) throw DimensionMismatch("solve_spd: rhs row count does not match factor");
  return factor.llt().solve(b);
}

double trace_of_influence(const SymMatrix& sigma, double n_lambda) {
  const CholFactor f = cholesky(sigma.shifted(n_lambda));
  return solve_spd(f, sigma.matrix()).trace();
}

double trace_of_inverse(const CholFactor& factor) {
  // tr(A^{-1}) = ||L^{-1}||_F^2
  Matrix linv = Matrix::Identity(factor.order(), factor.order());
  factor.llt().matrixL().solveInPlace(linv);
  return linv.squaredNorm();
}

Matrix matrix_exponential(const Matrix& a) {
  if (a.rows() != a.cols()) throw DimensionMismatch("matrix_exponential: matrix is not square");
  if (a.rows() > 8) throw InvalidArgument("matrix_exponential: order above 8 is out of scope");
  const Eigen::Index n = a.rows();
  if (n == 0) return a;

  // Scale so that ||A / 2^s||_1 <= 0.5.
  const double norm1 = a.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  if (norm1 > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm1 / 0.5)));
  const Matrix scaled = a / std::ldexp(1.0, squarings);

  // Pade(6,6): c_k = (12-k)! 6! / (12! k! (6-k)!)
  constexpr double c[7] = {1.0,
                           1.0 / 2.0,
                           5.0 / 44.0,
                           1.0 / 66.0,
                           1.0 / 792.0,
                           1.0 / 15840.0,
                           1.0 / 665280.0};
  const Matrix ident = Matrix::Identity(n, n);
  Matrix power = ident;
  Matrix even = c[0] * ident;
  Matrix odd = Matrix::Zero(n, n);
  for (int k = 1; k <= 6; ++k) {
    power = power * scaled;
    if (k % 2 == 0)
      even += c[k] * power;
    else
      odd += c[k] * power;
  }
  // N = even + odd, D = even - odd
  Matrix result = (even - odd).partialPivLu().solve(even + odd);
  for (int s = 0; s < squarings; ++s) result = result * result;
  return result;
}

}  // namespace optcal
