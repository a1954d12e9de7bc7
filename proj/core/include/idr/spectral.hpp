#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "idr/linalg.hpp"
#include "idr/solver.hpp"

namespace idr {

using Labels = std::vector<int>;

// Symmetric non-negative affinity W_ij = (|Z_ij| + |Z_ji|) / 2.
struct AffinityGraph {
  Matrix w;
};

AffinityGraph build_affinity(const Matrix& z);

struct KMeansOptions {
  int restarts = 20;
  int max_iterations = 300;
};

// Normalized spectral clustering: bottom-k eigenvectors of
// I - D^{-1/2} W D^{-1/2}, row-normalized, then k-means++ with restarts.
Labels spectral_partition(const AffinityGraph& graph, int k, std::uint64_t seed,
                          const KMeansOptions& options = {});

// Sum over clusters of cut(A, complement) / vol(A).
double normalized_cut(const AffinityGraph& graph, const Labels& labels);

enum class GraphChoice { kZ, kS };

struct ClusterResult {
  Labels labels_z;
  Labels labels_s;
  GraphChoice chosen = GraphChoice::kZ;
  std::optional<double> accuracy_z;
  std::optional<double> accuracy_s;
  double ncut_z = 0.0;
  double ncut_s = 0.0;

  const Labels& chosen_labels() const {
    return chosen == GraphChoice::kZ ? labels_z : labels_s;
  }
};

// Partitions both G1 (from Z*) and G2 (from S*). With ground truth the
// more accurate one is chosen, otherwise the lower normalized cut; ties go
// to Z.
ClusterResult cluster_from_solver(const SolverOutput& output, int k,
                                  std::uint64_t seed,
                                  const std::optional<Labels>& ground_truth = {});

}  // namespace idr
