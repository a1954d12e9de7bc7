#include "idr/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "idr/error.hpp"

namespace idr {
namespace {

Matrix standard_normal(Eigen::Index rows, Eigen::Index cols,
                       std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix m(rows, cols);
  // Column-major fill order is part of the determinism contract.
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = normal(rng);
  }
  return m;
}

}  // namespace

void SynthSpec::validate() const {
  auto fail = [](const std::string& msg) {
    throw Error(ErrorCode::kInvalidSpec, msg);
  };
  if (num_subspaces < 1) fail("num_subspaces must be >= 1");
  if (subspace_dim < 1) fail("subspace_dim must be >= 1");
  if (ambient_dim < 1) fail("ambient_dim must be >= 1");
  if (subspace_dim > ambient_dim) fail("subspace_dim must be <= ambient_dim");
  if (points_per < 1) fail("points_per must be >= 1");
  if (!(corruption_fraction >= 0.0 && corruption_fraction <= 1.0)) {
    fail("corruption_fraction must lie in [0, 1]");
  }
  if (!(noise_scale >= 0.0) || !std::isfinite(noise_scale)) {
    fail("noise_scale must be finite and >= 0");
  }
}

std::uint64_t corruption_seed(std::uint64_t seed) {
  // splitmix64 step so the two streams do not overlap.
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

SynthData generate_clean(const SynthSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  const Eigen::Index n = spec.num_points();
  SynthData data;
  data.x.resize(spec.ambient_dim, n);
  data.truth.resize(static_cast<std::size_t>(n));
  Eigen::Index col = 0;
  for (int s = 0; s < spec.num_subspaces; ++s) {
    const Matrix g = standard_normal(spec.ambient_dim, spec.subspace_dim, rng);
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix basis = qr.householderQ() *
                   Matrix::Identity(spec.ambient_dim, spec.subspace_dim);
    const Matrix coeff = standard_normal(spec.subspace_dim, spec.points_per, rng);
    data.x.middleCols(col, spec.points_per) = basis * coeff;
    for (int i = 0; i < spec.points_per; ++i) {
      data.truth[static_cast<std::size_t>(col + i)] = s;
    }
    col += spec.points_per;
    data.bases.push_back(std::move(basis));
  }
  data.x.colwise().normalize();
  return data;
}

SynthData generate(const SynthSpec& spec) {
  SynthData data = generate_clean(spec);
  if (spec.corruption_fraction > 0.0) {
    data.x = corrupt(data.x, spec.corruption_fraction, spec.noise_scale,
                     corruption_seed(spec.seed));
    data.renormalized_after_corruption = true;
  }
  return data;
}

Matrix corrupt(const Matrix& x, double p, double noise_scale,
               std::uint64_t seed, CorruptionReport* report) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw Error(ErrorCode::kInvalidFraction,
                "corruption fraction must lie in [0, 1]");
  }
  if (!(noise_scale >= 0.0)) {
    throw Error(ErrorCode::kInvalidFraction, "noise_scale must be >= 0");
  }
  require_finite(x, "corrupt: X");
  const auto n = x.cols();
  const auto dim = x.rows();
  const auto count = static_cast<Eigen::Index>(
      std::floor(p * static_cast<double>(n)));
  Matrix out = x;
  if (report) *report = CorruptionReport{};
  if (count == 0) return out;

  std::mt19937_64 rng(seed);
  std::vector<Eigen::Index> all(static_cast<std::size_t>(n));
  std::iota(all.begin(), all.end(), Eigen::Index{0});
  std::vector<Eigen::Index> chosen;
  chosen.reserve(static_cast<std::size_t>(count));
  std::sample(all.begin(), all.end(), std::back_inserter(chosen), count, rng);

  std::normal_distribution<double> normal(0.0, 1.0);
  for (Eigen::Index j : chosen) {
    const double sq = x.col(j).squaredNorm();
    const double sigma =
        std::sqrt(noise_scale * sq / static_cast<double>(dim));
    Vector noise(dim);
    for (Eigen::Index i = 0; i < dim; ++i) noise(i) = sigma * normal(rng);
    out.col(j) += noise;
    const double norm = out.col(j).norm();
    if (norm > 0.0) out.col(j) /= norm;
    if (report) {
      report->columns.push_back(j);
      report->noise_squared_norms.push_back(noise.squaredNorm());
      report->column_squared_norms.push_back(sq);
    }
  }
  return out;
}

}  // namespace idr
