#pragma once

#include <vector>

namespace idr {

// Fraction of samples whose predicted label maps to the true label under the
// best injective relabeling (maximum-weight matching on the confusion matrix).
double segmentation_accuracy(const std::vector<int>& truth,
                             const std::vector<int>& pred);

// 1 - segmentation_accuracy.
double segmentation_error(const std::vector<int>& truth,
                          const std::vector<int>& pred);

// Minimum-cost perfect assignment on a square cost matrix given row-major.
// Returns assignment[row] = column.
std::vector<int> hungarian_min_cost(const std::vector<double>& cost, int size);

}  // namespace idr
