#pragma once

// Independent reference computations used only by tests. Nothing here calls
// into the library's numerical kernels.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

namespace idr::oracle {

using Matrix = Eigen::MatrixXd;
using LMatrix = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;

inline LMatrix widen(const Matrix& m) { return m.cast<long double>(); }

// Gauss-Jordan inverse with partial pivoting.
inline Matrix gauss_jordan_inverse(const Matrix& a) {
  const auto n = a.rows();
  Matrix aug(n, 2 * n);
  aug << a, Matrix::Identity(n, n);
  for (Eigen::Index col = 0; col < n; ++col) {
    Eigen::Index pivot = col;
    for (Eigen::Index r = col + 1; r < n; ++r) {
      if (std::abs(aug(r, col)) > std::abs(aug(pivot, col))) pivot = r;
    }
    if (aug(pivot, col) == 0.0) throw std::runtime_error("singular");
    aug.row(col).swap(aug.row(pivot));
    aug.row(col) /= aug(col, col);
    for (Eigen::Index r = 0; r < n; ++r) {
      if (r != col) aug.row(r) -= aug(r, col) * aug.row(col);
    }
  }
  return aug.rightCols(n);
}

// Dense Gaussian elimination with partial pivoting for a square system.
inline std::vector<double> gauss_solve(std::vector<std::vector<double>> a,
                                       std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::abs(a[r][c]) > std::abs(a[p][c])) p = r;
    }
    std::swap(a[c], a[p]);
    std::swap(b[c], b[p]);
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = a[r][c] / a[c][c];
      for (std::size_t j = c; j < n; ++j) a[r][j] -= f * a[c][j];
      b[r] -= f * b[c];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= a[i][j] * x[j];
    x[i] = s / a[i][i];
  }
  return x;
}

// min ||D - M||_F^2 s.t. Tr(D) = k, solved as a generic equality-constrained
// QP through its full KKT system over all n^2 entries plus one multiplier.
inline Matrix trace_projection_kkt(const Matrix& m, int k) {
  const auto n = static_cast<std::size_t>(m.rows());
  const std::size_t vars = n * n;
  std::vector<std::vector<double>> kkt(vars + 1, std::vector<double>(vars + 1, 0.0));
  std::vector<double> rhs(vars + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t v = i * n + j;
      kkt[v][v] = 2.0;
      rhs[v] = 2.0 * m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      if (i == j) {
        kkt[v][vars] = 1.0;
        kkt[vars][v] = 1.0;
      }
    }
  }
  rhs[vars] = static_cast<double>(k);
  const auto sol = gauss_solve(kkt, rhs);
  Matrix d(m.rows(), m.cols());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = sol[i * n + j];
    }
  }
  return d;
}

// alpha * ||P||_{2,1} + 0.5 ||P - Q||_F^2
inline double l21_objective(const Matrix& p, const Matrix& q, double alpha) {
  return alpha * p.colwise().norm().sum() + 0.5 * (p - q).squaredNorm();
}

// Smallest objective gap f(P + delta) - f(P) over random perturbations of
// Frobenius radius up to `radius`; negative means a probe beat P.
inline double l21_probe_gap(const Matrix& p, const Matrix& q, double alpha,
                            int probes, double radius, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double base = l21_objective(p, q, alpha);
  double worst = std::numeric_limits<double>::infinity();
  for (int t = 0; t < probes; ++t) {
    Matrix dir(p.rows(), p.cols());
    for (Eigen::Index i = 0; i < dir.size(); ++i) dir(i) = normal(rng);
    dir *= radius * unit(rng) / dir.norm();
    worst = std::min(worst, l21_objective(p + dir, q, alpha) - base);
  }
  return worst;
}

// Central-difference gradient of f evaluated in long double.
inline Matrix fd_gradient(const std::function<long double(const LMatrix&)>& f,
                          const Matrix& at, double step = 1e-6) {
  LMatrix x = widen(at);
  Matrix g(at.rows(), at.cols());
  const long double h = step;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const long double orig = x(i);
    x(i) = orig + h;
    const long double fp = f(x);
    x(i) = orig - h;
    const long double fm = f(x);
    x(i) = orig;
    g(i) = static_cast<double>((fp - fm) / (2 * h));
  }
  return g;
}

inline long double sq(const LMatrix& m) { return m.squaredNorm(); }
inline long double dot(const LMatrix& a, const LMatrix& b) {
  return a.cwiseProduct(b).sum();
}

// Accuracy by trying every injective relabeling of the predicted clusters.
inline double brute_force_accuracy(const std::vector<int>& truth,
                                   const std::vector<int>& pred) {
  const int kt = *std::max_element(truth.begin(), truth.end()) + 1;
  const int kp = *std::max_element(pred.begin(), pred.end()) + 1;
  const int size = std::max(kt, kp);
  std::vector<int> perm(static_cast<std::size_t>(size));
  std::iota(perm.begin(), perm.end(), 0);
  std::size_t best = 0;
  do {
    std::size_t hits = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
      if (perm[static_cast<std::size_t>(pred[i])] == truth[i]) ++hits;
    }
    best = std::max(best, hits);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return static_cast<double>(best) / static_cast<double>(truth.size());
}

// Normalized cut of a two-way split given by a bit mask.
inline double bipartition_ncut(const Matrix& w, unsigned mask) {
  const auto n = w.rows();
  double cut = 0.0, vol_a = 0.0, vol_b = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const bool in_a = (mask >> i) & 1u;
    for (Eigen::Index j = 0; j < n; ++j) {
      const bool j_in_a = (mask >> j) & 1u;
      (in_a ? vol_a : vol_b) += w(i, j);
      if (in_a && !j_in_a) cut += w(i, j);
    }
  }
  if (vol_a == 0.0 || vol_b == 0.0) return std::numeric_limits<double>::infinity();
  return cut / vol_a + cut / vol_b;
}

// Exhaustive minimum normalized cut over all bipartitions with node 0 fixed
// to side A. Returns labels with node 0 -> 0.
inline std::vector<int> min_ncut_bipartition(const Matrix& w) {
  const auto n = static_cast<unsigned>(w.rows());
  double best = std::numeric_limits<double>::infinity();
  unsigned best_mask = 0;
  for (unsigned rest = 0; rest < (1u << (n - 1)); ++rest) {
    const unsigned mask = 1u | (rest << 1);
    const double v = bipartition_ncut(w, mask);
    if (v < best) {
      best = v;
      best_mask = mask;
    }
  }
  std::vector<int> labels(n);
  for (unsigned i = 0; i < n; ++i) labels[i] = ((best_mask >> i) & 1u) ? 0 : 1;
  return labels;
}

// Normalized membership matrix: block i scaled by 1 / size_i.
inline Matrix normalized_membership(const std::vector<int>& sizes) {
  const int n = std::accumulate(sizes.begin(), sizes.end(), 0);
  Matrix a = Matrix::Zero(n, n);
  int off = 0;
  for (int s : sizes) {
    a.block(off, off, s, s).setConstant(1.0 / s);
    off += s;
  }
  return a;
}

}  // namespace idr::oracle
