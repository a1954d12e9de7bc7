#pragma once

#include "idr/linalg.hpp"

namespace idr {

// Least squares regression baseline:
//   min_Z ||X - XZ||_F^2 + lambda ||Z||_F^2   (optionally s.t. diag(Z) = 0).
Matrix lsr_solve(const Matrix& x, double lambda, bool zero_diag);

// Objective value of the above at Z.
double lsr_objective(const Matrix& x, const Matrix& z, double lambda);

}  // namespace idr
