#pragma once

#include <Eigen/Dense>

namespace idr {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

enum class Side { kLeft, kRight };

// Solves A V = B (kLeft) or V A = B (kRight) for symmetric positive
// (semi-)definite A. Only the lower triangle of A is read. A Cholesky
// factorization is tried first; if it breaks down, or the result misses the
// 1e-10 relative residual target after refinement, a complete orthogonal
// decomposition gives the pseudo-inverse solution.
Matrix solve_spd(const Matrix& a, const Matrix& b, Side side = Side::kLeft);

// Column-wise group shrinkage: proximal operator of alpha * ||P||_{2,1}.
Matrix l21_prox(const Matrix& q, double alpha);

// Euclidean projection of M onto {D : Tr(D) = k}. Only the diagonal moves;
// off-diagonal entries are copied unchanged.
Matrix trace_projection(const Matrix& m, int k);

// (max(S,0) + max(S,0)^T) / 2.
Matrix symmetrize_nonneg(const Matrix& s);

// Largest absolute entry; 0 for an empty matrix.
double max_abs(const Matrix& m);

void require_finite(const Matrix& m, const char* what);
void require_square(const Matrix& m, const char* what);

}  // namespace idr
