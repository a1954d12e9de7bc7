#include "idr/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "idr/error.hpp"
#include "idr/metrics.hpp"

namespace idr {
namespace {

constexpr double kDegreeFloor = 1e-12;

struct KMeansResult {
  Labels labels;
  double cost = std::numeric_limits<double>::infinity();
};

// k-means++ seeding on the rows of `points`.
Matrix seed_centers(const Matrix& points, int k, std::mt19937_64& rng) {
  const auto n = points.rows();
  Matrix centers(k, points.cols());
  std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
  centers.row(0) = points.row(pick(rng));
  Vector dist2 = (points.rowwise() - centers.row(0)).rowwise().squaredNorm();
  for (int c = 1; c < k; ++c) {
    const double total = dist2.sum();
    Eigen::Index chosen = 0;
    if (total > 0.0) {
      std::uniform_real_distribution<double> u(0.0, total);
      double target = u(rng);
      chosen = n - 1;
      for (Eigen::Index i = 0; i < n; ++i) {
        target -= dist2(i);
        if (target <= 0.0 && dist2(i) > 0.0) {
          chosen = i;
          break;
        }
      }
    } else {
      chosen = pick(rng);
    }
    centers.row(c) = points.row(chosen);
    dist2 = dist2.cwiseMin(
        (points.rowwise() - centers.row(c)).rowwise().squaredNorm());
  }
  return centers;
}

KMeansResult lloyd(const Matrix& points, Matrix centers, int max_iterations) {
  const auto n = points.rows();
  const auto k = centers.rows();
  KMeansResult res;
  res.labels.assign(static_cast<std::size_t>(n), -1);
  for (int it = 0; it < max_iterations; ++it) {
    bool changed = false;
    double cost = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      Eigen::Index best = 0;
      const double d =
          (centers.rowwise() - points.row(i)).rowwise().squaredNorm().minCoeff(
              &best);
      cost += d;
      auto& label = res.labels[static_cast<std::size_t>(i)];
      if (label != static_cast<int>(best)) {
        label = static_cast<int>(best);
        changed = true;
      }
    }
    res.cost = cost;
    if (!changed) break;

    Matrix sums = Matrix::Zero(k, points.cols());
    Vector counts = Vector::Zero(k);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto l = res.labels[static_cast<std::size_t>(i)];
      sums.row(l) += points.row(i);
      counts(l) += 1.0;
    }
    for (Eigen::Index c = 0; c < k; ++c) {
      // Empty clusters keep their previous center.
      if (counts(c) > 0.0) centers.row(c) = sums.row(c) / counts(c);
    }
  }
  // Final cost against the converged assignment.
  double cost = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    cost += (points.row(i) -
             centers.row(res.labels[static_cast<std::size_t>(i)]))
                .squaredNorm();
  }
  res.cost = cost;
  return res;
}

// Renumbers labels in order of first appearance so equal partitions compare
// equal regardless of which restart produced them.
Labels canonicalize(const Labels& labels, int k) {
  std::vector<int> map(static_cast<std::size_t>(k), -1);
  int next = 0;
  Labels out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto& m = map[static_cast<std::size_t>(labels[i])];
    if (m < 0) m = next++;
    out[i] = m;
  }
  return out;
}

}  // namespace

AffinityGraph build_affinity(const Matrix& z) {
  require_square(z, "build_affinity: Z");
  require_finite(z, "build_affinity: Z");
  const Matrix a = z.cwiseAbs();
  return AffinityGraph{0.5 * (a + a.transpose())};
}

Labels spectral_partition(const AffinityGraph& graph, int k, std::uint64_t seed,
                          const KMeansOptions& options) {
  const Matrix& w = graph.w;
  require_square(w, "spectral_partition: W");
  require_finite(w, "spectral_partition: W");
  const auto n = w.rows();
  if (k < 1 || k > n) {
    throw Error(ErrorCode::kInvalidK, "spectral_partition: k=" +
                                          std::to_string(k) + " outside [1, " +
                                          std::to_string(n) + "]");
  }
  if (k == 1) return Labels(static_cast<std::size_t>(n), 0);

  const Vector degree = w.rowwise().sum().cwiseMax(kDegreeFloor);
  const Vector inv_sqrt = degree.cwiseSqrt().cwiseInverse();
  Matrix lap = -(inv_sqrt.asDiagonal() * w * inv_sqrt.asDiagonal());
  lap.diagonal().array() += 1.0;

  // Eigenvalues come back in increasing order.
  Eigen::SelfAdjointEigenSolver<Matrix> eig(lap);
  Matrix embed = eig.eigenvectors().leftCols(k);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double norm = embed.row(i).norm();
    if (norm > 0.0) embed.row(i) /= norm;
  }

  std::mt19937_64 rng(seed);
  KMeansResult best;
  for (int r = 0; r < options.restarts; ++r) {
    Matrix centers = seed_centers(embed, k, rng);
    KMeansResult res = lloyd(embed, std::move(centers), options.max_iterations);
    // Strict comparison keeps the earliest restart on ties.
    if (res.cost < best.cost) best = std::move(res);
  }
  return canonicalize(best.labels, k);
}

double normalized_cut(const AffinityGraph& graph, const Labels& labels) {
  const Matrix& w = graph.w;
  const auto n = w.rows();
  if (static_cast<Eigen::Index>(labels.size()) != n) {
    throw Error(ErrorCode::kLengthMismatch, "normalized_cut: label count");
  }
  const int k = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
  std::vector<double> cut(static_cast<std::size_t>(k), 0.0);
  std::vector<double> vol(static_cast<std::size_t>(k), 0.0);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto li = static_cast<std::size_t>(labels[static_cast<std::size_t>(i)]);
    for (Eigen::Index j = 0; j < n; ++j) {
      vol[li] += w(i, j);
      if (labels[static_cast<std::size_t>(j)] != labels[static_cast<std::size_t>(i)]) {
        cut[li] += w(i, j);
      }
    }
  }
  double total = 0.0;
  for (int c = 0; c < k; ++c) {
    const auto ci = static_cast<std::size_t>(c);
    if (vol[ci] > 0.0) total += cut[ci] / vol[ci];
  }
  return total;
}

ClusterResult cluster_from_solver(const SolverOutput& output, int k,
                                  std::uint64_t seed,
                                  const std::optional<Labels>& ground_truth) {
  ClusterResult res;
  const AffinityGraph g1 = build_affinity(output.z_star);
  const AffinityGraph g2 = build_affinity(output.s_star);
  res.labels_z = spectral_partition(g1, k, seed);
  res.labels_s = spectral_partition(g2, k, seed);
  res.ncut_z = normalized_cut(g1, res.labels_z);
  res.ncut_s = normalized_cut(g2, res.labels_s);
  if (ground_truth) {
    res.accuracy_z = segmentation_accuracy(*ground_truth, res.labels_z);
    res.accuracy_s = segmentation_accuracy(*ground_truth, res.labels_s);
    res.chosen = *res.accuracy_s > *res.accuracy_z ? GraphChoice::kS
                                                   : GraphChoice::kZ;
  } else {
    res.chosen = res.ncut_s < res.ncut_z ? GraphChoice::kS : GraphChoice::kZ;
  }
  return res;
}

}  // namespace idr
