#include "idr/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "idr/error.hpp"

namespace idr {
namespace {

constexpr double kUnitNormTolerance = 1e-8;

void require_shape(const Matrix& m, Eigen::Index rows, Eigen::Index cols,
                   const char* what) {
  if (m.rows() != rows || m.cols() != cols) {
    std::ostringstream os;
    os << what << " is " << m.rows() << "x" << m.cols() << ", expected "
       << rows << "x" << cols;
    throw Error(ErrorCode::kDimensionMismatch, os.str());
  }
}

Matrix z_rhs(const SolverState& state, const Matrix& x, const Matrix& gram,
             double mu) {
  return 2.0 * state.s + mu * (gram - x.transpose() * state.e) +
         x.transpose() * state.y1;
}

}  // namespace

ZSystem::ZSystem(const Matrix& x) : gram_(x.transpose() * x) {
  const auto n = x.cols();
  const auto r = std::min(x.rows(), n);
  if (2 * r < n) {
    Eigen::BDCSVD<Matrix> svd(x, Eigen::ComputeThinV);
    w_ = svd.matrixV();
    s2_ = svd.singularValues().array().square();
    low_rank_ = true;
  }
}

Matrix ZSystem::solve(double mu, const Matrix& rhs) const {
  if (low_rank_) {
    const Vector shrink =
        (mu * s2_.array() / (2.0 + mu * s2_.array())).matrix();
    const Matrix proj = shrink.asDiagonal() * (w_.transpose() * rhs);
    Matrix out = rhs - w_ * proj;
    out *= 0.5;
    return out;
  }
  Matrix lhs = mu * gram_;
  lhs.diagonal().array() += 2.0;
  return solve_spd(lhs, rhs, Side::kLeft);
}

void SolverConfig::validate(Eigen::Index n) const {
  auto fail = [](const std::string& msg) {
    throw Error(ErrorCode::kInvalidConfig, msg);
  };
  if (!(gamma > 0.0)) fail("gamma must be > 0");
  if (!(lambda > 0.0)) fail("lambda must be > 0");
  if (!(mu0 > 0.0)) fail("mu0 must be > 0");
  if (!(mu_max >= mu0)) fail("mu_max must be >= mu0");
  if (!(rho > 1.0)) fail("rho must be > 1");
  if (!(epsilon > 0.0)) fail("epsilon must be > 0");
  if (maxiter < 1) fail("maxiter must be >= 1");
  if (k < 1 || k > n) {
    throw Error(ErrorCode::kInvalidK, "k=" + std::to_string(k) +
                                          " outside [1, " +
                                          std::to_string(n) + "]");
  }
}

SolverState SolverState::zeros(Eigen::Index dim, Eigen::Index n, double mu0) {
  SolverState st;
  st.z = Matrix::Zero(n, n);
  st.s = Matrix::Zero(n, n);
  st.c = Matrix::Zero(n, n);
  st.d = Matrix::Zero(n, n);
  st.e = Matrix::Zero(dim, n);
  st.y1 = Matrix::Zero(dim, n);
  st.y2 = Matrix::Zero(n, n);
  st.y4 = Matrix::Zero(n, n);
  st.y3 = RowVector::Zero(n);
  st.mu = mu0;
  st.h = 0;
  return st;
}

Matrix update_z(const SolverState& state, const Matrix& x, double mu) {
  const auto n = x.cols();
  require_shape(state.s, n, n, "S");
  require_shape(state.e, x.rows(), n, "E");
  require_shape(state.y1, x.rows(), n, "Y1");
  require_finite(x, "update_z: X");
  const ZSystem system(x);
  return system.solve(mu, z_rhs(state, x, system.gram(), mu));
}

Matrix update_s_raw(const SolverState& state, const Matrix& zp, double mu,
                    double gamma) {
  const auto n = zp.rows();
  require_square(zp, "Z");
  require_shape(state.c, n, n, "C");
  require_shape(state.d, n, n, "D");
  require_shape(state.y2, n, n, "Y2");
  require_shape(state.y4, n, n, "Y4");
  Matrix i_minus_c = -state.c;
  i_minus_c.diagonal().array() += 1.0;
  // A plain product is faster than a symmetric rank update at these sizes.
  Matrix lhs(n, n);
  lhs.noalias() = (2.0 * gamma) * i_minus_c * i_minus_c.transpose();
  lhs.diagonal().array() += 2.0 + 2.0 * mu;
  const Matrix rhs =
      2.0 * zp + mu * state.c - state.y2 + mu * state.d - state.y4;
  return solve_spd(lhs, rhs, Side::kRight);
}

Matrix update_s(const SolverState& state, const Matrix& zp, double mu,
                double gamma) {
  return symmetrize_nonneg(update_s_raw(state, zp, mu, gamma));
}

Matrix update_c(const SolverState& state, const Matrix& sp, double mu,
                double gamma) {
  const auto n = sp.rows();
  require_square(sp, "S");
  require_shape(state.y2, n, n, "Y2");
  require_shape(state.y3, 1, n, "Y3");
  Matrix sts(n, n);
  sts.noalias() = (2.0 * gamma) * sp.transpose() * sp;
  Matrix lhs = sts;
  lhs.array() += mu;
  lhs.diagonal().array() += mu;
  Matrix rhs = sts + state.y2 + mu * sp;
  rhs.array() += mu;
  rhs.rowwise() -= state.y3;
  return solve_spd(lhs, rhs, Side::kLeft);
}

Matrix update_d(const SolverState& state, const Matrix& sp, double mu, int k) {
  if (!(mu > 0.0)) {
    throw Error(ErrorCode::kInvalidConfig, "update_d: mu must be > 0");
  }
  require_shape(state.y4, sp.rows(), sp.cols(), "Y4");
  return trace_projection(sp + state.y4 / mu, k);
}

Matrix update_e(const SolverState& state, const Matrix& zp, const Matrix& x,
                double mu, double lambda) {
  if (!(mu > 0.0) || !(lambda > 0.0)) {
    throw Error(ErrorCode::kNonPositiveAlpha,
                "update_e: mu and lambda must be > 0");
  }
  require_shape(state.y1, x.rows(), x.cols(), "Y1");
  const Matrix q = x - x * zp + state.y1 / mu;
  return l21_prox(q, lambda / mu);
}

Multipliers update_multipliers(const SolverState& state, const Matrix& x,
                               const Matrix& zp, const Matrix& sp,
                               const Matrix& cp, const Matrix& dp,
                               const Matrix& ep, const SolverConfig& config) {
  const double mu = state.mu;
  Multipliers out;
  out.y1 = state.y1 + mu * (x - x * zp - ep);
  out.y2 = state.y2 + mu * (sp - cp);
  RowVector col_sums = cp.colwise().sum();
  col_sums.array() -= 1.0;
  out.y3 = state.y3 + mu * col_sums;
  out.y4 = state.y4 + mu * (sp - dp);
  out.mu = std::min(config.mu_max, config.rho * mu);
  require_finite(out.y1, "Y1");
  require_finite(out.y2, "Y2");
  require_finite(out.y3, "Y3");
  require_finite(out.y4, "Y4");
  return out;
}

double idempotent_residual(const Matrix& z) {
  require_square(z, "idempotent_residual: Z");
  require_finite(z, "idempotent_residual: Z");
  return (z - z * z).squaredNorm();
}

double max_column_norm_deviation(const Matrix& x) {
  if (x.cols() == 0) return 0.0;
  return (x.colwise().norm().array() - 1.0).abs().maxCoeff();
}

SolverOutput solve_idr(const Matrix& x_in, const SolverConfig& config,
                       const IterationObserver& observer) {
  if (x_in.rows() < 1 || x_in.cols() < 1) {
    throw Error(ErrorCode::kDimensionMismatch, "solve_idr: empty data");
  }
  require_finite(x_in, "solve_idr: X");
  const auto n = x_in.cols();
  const auto dim = x_in.rows();
  config.validate(n);

  SolverOutput out;
  Matrix x = x_in;
  const double deviation = max_column_norm_deviation(x);
  if (deviation > kUnitNormTolerance) {
    if (config.normalization == NormalizationPolicy::kStrict) {
      throw Error(ErrorCode::kNotNormalized,
                  "column norm deviates from 1 by " +
                      std::to_string(deviation));
    }
    const RowVector norms = x.colwise().norm();
    if ((norms.array() == 0.0).any()) {
      throw Error(ErrorCode::kNotNormalized,
                  "zero column cannot be normalized");
    }
    x.array().rowwise() /= norms.array();
    out.input_renormalized = true;
    out.warnings.push_back("input columns rescaled to unit l2 norm (max deviation " +
                           std::to_string(deviation) + ")");
  }

  const ZSystem z_system(x);
  SolverState st = SolverState::zeros(dim, n, config.mu0);

  while (st.h < config.maxiter) {
    const double mu = st.mu;
    Matrix zp = z_system.solve(mu, z_rhs(st, x, z_system.gram(), mu));
    Matrix sp = update_s(st, zp, mu, config.gamma);
    Matrix cp = update_c(st, sp, mu, config.gamma);
    Matrix dp = update_d(st, sp, mu, config.k);
    Matrix ep = update_e(st, zp, x, mu, config.lambda);
    Multipliers mult = update_multipliers(st, x, zp, sp, cp, dp, ep, config);

    IterationRecord rec;
    rec.iter = st.h + 1;
    rec.dz = (zp - st.z).squaredNorm();
    rec.ds = (sp - st.s).squaredNorm();
    rec.de = (ep - st.e).squaredNorm();
    rec.mu = mu;

    st.z = std::move(zp);
    st.s = std::move(sp);
    st.c = std::move(cp);
    st.d = std::move(dp);
    st.e = std::move(ep);
    st.y1 = std::move(mult.y1);
    st.y2 = std::move(mult.y2);
    st.y3 = std::move(mult.y3);
    st.y4 = std::move(mult.y4);
    st.mu = mult.mu;
    st.h += 1;

    rec.res_sc = max_abs(st.s - st.c);
    rec.res_sd = max_abs(st.s - st.d);
    rec.res_1c = (st.c.colwise().sum().array() - 1.0).abs().maxCoeff();
    rec.res_xze = max_abs(x - x * st.z - st.e);
    rec.idres_z = config.track_idempotent_residual
                      ? (st.z - st.z * st.z).squaredNorm()
                      : std::numeric_limits<double>::quiet_NaN();
    rec.trace_gap = std::abs(st.d.trace() - static_cast<double>(config.k));
    out.history.push_back(rec);

    if (observer) observer(st);

    if (!st.z.allFinite() || !st.s.allFinite() || !st.e.allFinite()) {
      throw Error(ErrorCode::kNonFiniteInput,
                  "solve_idr: iterate became non-finite at iteration " +
                      std::to_string(st.h));
    }
    if (rec.res_sc <= config.epsilon && rec.res_sd <= config.epsilon &&
        rec.res_1c <= config.epsilon) {
      out.converged = true;
      break;
    }
  }

  out.z_star = std::move(st.z);
  out.s_star = std::move(st.s);
  out.e_star = std::move(st.e);
  out.iterations = st.h;
  return out;
}

}  // namespace idr
