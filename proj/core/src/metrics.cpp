#include "idr/metrics.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <string>

#include "idr/error.hpp"

namespace idr {
namespace {

// Maps arbitrary label values onto 0..m-1 in sorted order.
std::vector<int> dense_ids(const std::vector<int>& labels, int& count) {
  std::map<int, int> ids;
  for (int l : labels) ids.emplace(l, 0);
  int next = 0;
  for (auto& [label, id] : ids) id = next++;
  count = next;
  std::vector<int> out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) out[i] = ids.at(labels[i]);
  return out;
}

}  // namespace

// O(n^3) shortest augmenting path formulation with potentials.
std::vector<int> hungarian_min_cost(const std::vector<double>& cost, int size) {
  const auto n = static_cast<std::size_t>(size);
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost[(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> assignment(n, -1);
  for (std::size_t j = 1; j <= n; ++j) {
    if (p[j] != 0) assignment[p[j] - 1] = static_cast<int>(j - 1);
  }
  return assignment;
}

double segmentation_accuracy(const std::vector<int>& truth,
                             const std::vector<int>& pred) {
  if (truth.size() != pred.size()) {
    throw Error(ErrorCode::kLengthMismatch,
                "truth has " + std::to_string(truth.size()) +
                    " labels, prediction has " + std::to_string(pred.size()));
  }
  if (truth.empty()) return 1.0;
  int kt = 0;
  int kp = 0;
  const auto t = dense_ids(truth, kt);
  const auto p = dense_ids(pred, kp);
  const int size = std::max(kt, kp);
  const auto sz = static_cast<std::size_t>(size);

  // Rows: predicted clusters, columns: true clusters, padded square.
  std::vector<double> counts(sz * sz, 0.0);
  for (std::size_t i = 0; i < t.size(); ++i) {
    counts[static_cast<std::size_t>(p[i]) * sz + static_cast<std::size_t>(t[i])] += 1.0;
  }
  std::vector<double> cost(counts.size());
  std::transform(counts.begin(), counts.end(), cost.begin(),
                 [](double c) { return -c; });
  const auto assignment = hungarian_min_cost(cost, size);
  double matched = 0.0;
  for (std::size_t r = 0; r < sz; ++r) {
    matched += counts[r * sz + static_cast<std::size_t>(assignment[r])];
  }
  return matched / static_cast<double>(truth.size());
}

double segmentation_error(const std::vector<int>& truth,
                          const std::vector<int>& pred) {
  return 1.0 - segmentation_accuracy(truth, pred);
}

}  // namespace idr
