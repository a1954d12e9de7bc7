#pragma once

#include <functional>
#include <string>
#include <vector>

#include "idr/linalg.hpp"

namespace idr {

enum class NormalizationPolicy {
  kAuto,    // rescale columns to unit norm and record a warning
  kStrict,  // reject input whose columns are not unit norm
};

struct SolverConfig {
  double gamma = 0.1;
  double lambda = 0.1;
  int k = 1;
  double mu0 = 1e-6;
  double mu_max = 1e4;
  double rho = 1.1;
  double epsilon = 1e-7;
  int maxiter = 500;
  NormalizationPolicy normalization = NormalizationPolicy::kAuto;
  // ||Z - Z^2||_F^2 costs an extra n^3 product per iteration; sweeps that
  // never look at the trace switch it off (the field is then NaN).
  bool track_idempotent_residual = true;

  // Throws Error(kInvalidConfig / kInvalidK) for n samples.
  void validate(Eigen::Index n) const;
};

// Iterates of the augmented Lagrangian. y3 is the 1 x n multiplier of the
// column-sum constraint.
struct SolverState {
  Matrix z, s, c, d, e;
  Matrix y1, y2, y4;
  RowVector y3;
  double mu = 0.0;
  int h = 0;

  static SolverState zeros(Eigen::Index dim, Eigen::Index n, double mu0);
};

struct Multipliers {
  Matrix y1, y2, y4;
  RowVector y3;
  double mu = 0.0;
};

struct IterationRecord {
  int iter = 0;
  double res_sc = 0.0;    // ||S - C||_inf
  double res_sd = 0.0;    // ||S - D||_inf
  double res_1c = 0.0;    // ||1^T C - 1^T||_inf
  double res_xze = 0.0;   // ||X - XZ - E||_inf
  double idres_z = 0.0;   // ||Z - Z^2||_F^2
  double dz = 0.0;        // ||Z^{h+1} - Z^h||_F^2
  double ds = 0.0;
  double de = 0.0;
  double trace_gap = 0.0; // |Tr(D) - k|
  double mu = 0.0;        // penalty used by this iteration
};

struct SolverOutput {
  Matrix z_star;
  Matrix s_star;
  Matrix e_star;
  int iterations = 0;
  bool converged = false;
  bool input_renormalized = false;
  std::vector<IterationRecord> history;
  std::vector<std::string> warnings;
};

// The Z subproblem matrix 2I + mu X^T X for fixed X and varying mu. When
// rank(X) is small relative to n the inverse is applied through a thin SVD
// of X, X^T X = W diag(s^2) W^T, using
//   (2I + mu W s^2 W^T)^{-1} = (I - W diag(mu s^2 / (2 + mu s^2)) W^T) / 2,
// which is exact and costs O(r n^2) per application. Otherwise it falls back
// to solve_spd.
class ZSystem {
 public:
  explicit ZSystem(const Matrix& x);

  Matrix solve(double mu, const Matrix& rhs) const;
  const Matrix& gram() const { return gram_; }
  bool low_rank() const { return low_rank_; }

 private:
  Matrix gram_;
  Matrix w_;       // n x r right singular vectors
  Vector s2_;      // squared singular values
  bool low_rank_ = false;
};

// Called after every completed iteration with the fresh iterates.
using IterationObserver = std::function<void(const SolverState&)>;

// Block updates. Each returns the exact minimizer of the augmented
// Lagrangian in one variable with the others held fixed.
Matrix update_z(const SolverState& state, const Matrix& x, double mu);
// S update before the non-negativity/symmetry post-processing.
Matrix update_s_raw(const SolverState& state, const Matrix& zp, double mu,
                    double gamma);
Matrix update_s(const SolverState& state, const Matrix& zp, double mu,
                double gamma);
Matrix update_c(const SolverState& state, const Matrix& sp, double mu,
                double gamma);
Matrix update_d(const SolverState& state, const Matrix& sp, double mu, int k);
Matrix update_e(const SolverState& state, const Matrix& zp, const Matrix& x,
                double mu, double lambda);
// Dual ascent on Y1..Y4 with step state.mu, then mu <- min(mu_max, rho*mu).
Multipliers update_multipliers(const SolverState& state, const Matrix& x,
                               const Matrix& zp, const Matrix& sp,
                               const Matrix& cp, const Matrix& dp,
                               const Matrix& ep, const SolverConfig& config);

// Runs the full alternating scheme on column-normalized data X (d x n).
SolverOutput solve_idr(const Matrix& x, const SolverConfig& config,
                       const IterationObserver& observer = {});

// ||Z - Z^2||_F^2
double idempotent_residual(const Matrix& z);

// Largest deviation of a column norm from 1.
double max_column_norm_deviation(const Matrix& x);

}  // namespace idr
