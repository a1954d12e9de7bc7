#include "idr/linalg.hpp"

#include <cmath>
#include <string>

#include "idr/error.hpp"

namespace idr {
namespace {

constexpr double kResidualTarget = 1e-10;
constexpr int kMaxRefinements = 2;

// ||A V - B|| / ||B|| for the left solve, ||V A - B|| / ||B|| for the right.
Matrix apply(const Matrix& a, const Matrix& v, Side side) {
  if (side == Side::kLeft) return a.selfadjointView<Eigen::Lower>() * v;
  return v * a.selfadjointView<Eigen::Lower>();
}

double relative_residual(const Matrix& a, const Matrix& v, const Matrix& b,
                         Side side) {
  const double bnorm = b.norm();
  const double rnorm = (apply(a, v, side) - b).norm();
  return bnorm > 0.0 ? rnorm / bnorm : rnorm;
}

// Freivalds-style estimate of the relative residual from a few fixed sign
// probes; O(n^2) instead of the O(n^2 m) full residual.
bool probe_residual_ok(const Matrix& a, const Matrix& v, const Matrix& b,
                       Side side) {
  const auto m = side == Side::kLeft ? b.cols() : b.rows();
  for (int probe = 0; probe < 2; ++probe) {
    Vector w(m);
    for (Eigen::Index j = 0; j < m; ++j) {
      // Deterministic +-1 pattern, different per probe.
      const auto bits = static_cast<unsigned>(j * 2654435761u + probe * 40503u);
      w(j) = ((bits >> 7) & 1u) ? 1.0 : -1.0;
    }
    Vector bw, r;
    if (side == Side::kLeft) {
      bw = b * w;
      r = a.selfadjointView<Eigen::Lower>() * (v * w) - bw;
    } else {
      bw = b.transpose() * w;
      r = a.selfadjointView<Eigen::Lower>() * (v.transpose() * w) - bw;
    }
    const double scale = bw.norm();
    const double rel = scale > 0.0 ? r.norm() / scale : r.norm();
    if (!(rel <= kResidualTarget)) return false;
  }
  return true;
}

Matrix llt_apply(const Eigen::LLT<Matrix, Eigen::Lower>& llt, const Matrix& b,
                 Side side) {
  // V L L^T = B: peel L^T then L from the right. The right-hand triangular
  // solves run noticeably faster than Eigen's left-hand ones, so the left
  // case goes through the transpose (A is symmetric).
  Matrix v = side == Side::kLeft ? Matrix(b.transpose()) : b;
  llt.matrixU().solveInPlace<Eigen::OnTheRight>(v);
  llt.matrixL().solveInPlace<Eigen::OnTheRight>(v);
  if (side == Side::kLeft) v.transposeInPlace();
  return v;
}

Matrix solve_checked(const Matrix& a, const Matrix& b, Side side) {
  Eigen::LLT<Matrix, Eigen::Lower> llt(a);
  if (llt.info() == Eigen::Success) {
    Matrix v = llt_apply(llt, b, side);
    if (v.allFinite()) {
      if (probe_residual_ok(a, v, b, side)) return v;
      double res = relative_residual(a, v, b, side);
      for (int i = 0; i < kMaxRefinements && res > kResidualTarget; ++i) {
        v += llt_apply(llt, b - apply(a, v, side), side);
        res = relative_residual(a, v, b, side);
      }
      if (res <= kResidualTarget) return v;
    }
  }
  const Matrix full = a.selfadjointView<Eigen::Lower>();
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(full);
  if (side == Side::kLeft) return cod.solve(b);
  return cod.solve(b.transpose()).transpose();
}

}  // namespace

void require_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) {
    throw Error(ErrorCode::kNonFiniteInput,
                std::string(what) + " contains NaN or Inf");
  }
}

void require_square(const Matrix& m, const char* what) {
  if (m.rows() != m.cols()) {
    throw Error(ErrorCode::kDimensionMismatch,
                std::string(what) + " must be square, got " +
                    std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

double max_abs(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

Matrix solve_spd(const Matrix& a, const Matrix& b, Side side) {
  require_square(a, "solve_spd: A");
  require_finite(a, "solve_spd: A");
  require_finite(b, "solve_spd: B");
  if (side == Side::kLeft) {
    if (b.rows() != a.rows()) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "solve_spd: B rows do not match A");
    }
    return solve_checked(a, b, side);
  }
  if (b.cols() != a.rows()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "solve_spd: B cols do not match A");
  }
  return solve_checked(a, b, side);
}

Matrix l21_prox(const Matrix& q, double alpha) {
  if (!(alpha > 0.0)) {
    throw Error(ErrorCode::kNonPositiveAlpha, "l21_prox: alpha must be > 0");
  }
  require_finite(q, "l21_prox: Q");
  Matrix p = Matrix::Zero(q.rows(), q.cols());
  for (Eigen::Index i = 0; i < q.cols(); ++i) {
    const double norm = q.col(i).norm();
    if (alpha < norm) {
      p.col(i) = ((norm - alpha) / norm) * q.col(i);
    }
  }
  return p;
}

Matrix trace_projection(const Matrix& m, int k) {
  require_square(m, "trace_projection: M");
  require_finite(m, "trace_projection: M");
  const auto n = m.rows();
  if (k < 1 || k > n) {
    throw Error(ErrorCode::kInvalidK,
                "trace_projection: k=" + std::to_string(k) +
                    " outside [1, " + std::to_string(n) + "]");
  }
  Matrix d = m;
  const double shift = (static_cast<double>(k) - m.trace()) /
                       static_cast<double>(n);
  d.diagonal().array() += shift;
  return d;
}

Matrix symmetrize_nonneg(const Matrix& s) {
  require_square(s, "symmetrize_nonneg: S");
  const Matrix clipped = s.cwiseMax(0.0);
  Matrix out = 0.5 * (clipped + clipped.transpose());
  return out;
}

}  // namespace idr
