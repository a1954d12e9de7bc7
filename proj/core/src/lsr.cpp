#include "idr/lsr.hpp"

#include "idr/error.hpp"

namespace idr {

Matrix lsr_solve(const Matrix& x, double lambda, bool zero_diag) {
  if (!(lambda > 0.0)) {
    throw Error(ErrorCode::kInvalidConfig, "lsr_solve: lambda must be > 0");
  }
  require_finite(x, "lsr_solve: X");
  const auto n = x.cols();
  const Matrix gram = x.transpose() * x;
  Matrix a = gram;
  a.diagonal().array() += lambda;

  if (!zero_diag) return solve_spd(a, gram, Side::kLeft);

  // Column i solves (G + lambda I) z = G e_i - eta e_i with eta chosen so
  // that z_i = 0. Substituting G = A - lambda I gives
  //   z = e_i - (lambda + eta) A^{-1} e_i,  lambda + eta = 1 / [A^{-1}]_ii,
  // i.e. Z = I - A^{-1} diag(1 / diag(A^{-1})). This is the exact
  // constrained optimum, not a post-hoc zeroing.
  const Matrix a_inv = solve_spd(a, Matrix::Identity(n, n), Side::kLeft);
  Matrix z = -a_inv;
  for (Eigen::Index i = 0; i < n; ++i) {
    z.col(i) /= a_inv(i, i);
    z(i, i) = 0.0;
  }
  return z;
}

double lsr_objective(const Matrix& x, const Matrix& z, double lambda) {
  return (x - x * z).squaredNorm() + lambda * z.squaredNorm();
}

}  // namespace idr
