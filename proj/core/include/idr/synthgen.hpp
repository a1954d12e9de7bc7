#pragma once

#include <cstdint>
#include <vector>

#include "idr/linalg.hpp"

namespace idr {

// Union-of-subspaces data: num_subspaces random subspaces of dimension
// subspace_dim in R^ambient_dim, points_per samples each.
struct SynthSpec {
  int num_subspaces = 5;
  int subspace_dim = 5;
  int ambient_dim = 20;
  int points_per = 50;
  double corruption_fraction = 0.0;
  double noise_scale = 0.3;
  std::uint64_t seed = 0;

  void validate() const;
  int num_points() const { return num_subspaces * points_per; }
};

struct SynthData {
  Matrix x;                  // ambient_dim x n, unit-norm columns
  std::vector<int> truth;    // subspace index per column
  std::vector<Matrix> bases; // orthonormal basis per subspace
  bool renormalized_after_corruption = false;
};

struct CorruptionReport {
  std::vector<Eigen::Index> columns;         // corrupted columns, ascending
  std::vector<double> noise_squared_norms;   // ||noise||^2 before renormalizing
  std::vector<double> column_squared_norms;  // ||x||^2 before corruption
};

// Clean data only; spec.corruption_fraction is ignored here.
SynthData generate_clean(const SynthSpec& spec);

// Clean data followed by corrupt() with the spec's fraction and scale.
SynthData generate(const SynthSpec& spec);

// Adds Gaussian noise of per-entry variance noise_scale * ||x||^2 / D to
// floor(p * n) randomly chosen columns, then rescales those columns to unit
// norm. Untouched columns are bit-identical to the input.
Matrix corrupt(const Matrix& x, double p, double noise_scale,
               std::uint64_t seed, CorruptionReport* report = nullptr);

// Seed stream for the corruption step derived from the data seed.
std::uint64_t corruption_seed(std::uint64_t seed);

}  // namespace idr
