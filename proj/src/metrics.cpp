/* Copyright 2026 The LHGNN Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "lhgnn/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

namespace lhgnn {
namespace {

template <typename T>
void check_pair(const Tensor<T>& scores, const Tensor<T>& targets) {
  if (scores.rank() != 2 || scores.shape() != targets.shape()) {
    throw DimensionError("metric needs matching [samples, classes] scores and targets");
  }
  if (scores.dim(0) == 0) throw MetricError("metric over zero samples");
}

}  // namespace

template <typename T>
double average_precision(std::span<const T> scores, std::span<const T> targets) {
  if (scores.size() != targets.size()) throw DimensionError("AP: length mismatch");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  std::size_t hits = 0;
  double total = 0.0;
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    if (targets[order[rank]] >= T(0.5)) {
      ++hits;
      total += double(hits) / double(rank + 1);
    }
  }
  return hits ? total / double(hits) : -1.0;
}

template <typename T>
double mean_average_precision(const Tensor<T>& scores, const Tensor<T>& targets) {
  check_pair(scores, targets);
  const std::size_t rows = scores.dim(0), classes = scores.dim(1);
  std::vector<T> column_scores(rows), column_targets(rows);
  double total = 0.0;
  std::size_t counted = 0;
  for (std::size_t c = 0; c < classes; ++c) {
    for (std::size_t r = 0; r < rows; ++r) {
      column_scores[r] = scores(r, c);
      column_targets[r] = targets(r, c);
    }
    const double ap = average_precision<T>(column_scores, column_targets);
    if (ap < 0.0) continue;
    total += ap;
    ++counted;
  }
  if (counted == 0) throw MetricError("mAP undefined: no class has a positive example");
  return total / double(counted);
}

template <typename T>
double accuracy(const Tensor<T>& scores, const Tensor<T>& targets) {
  check_pair(scores, targets);
  const std::size_t rows = scores.dim(0), classes = scores.dim(1);
  std::size_t correct = 0;
  for (std::size_t r = 0; r < rows; ++r) {
    const T* s = scores.row(r);
    const T* t = targets.row(r);
    const auto predicted = std::max_element(s, s + classes) - s;
    const auto expected = std::max_element(t, t + classes) - t;
    correct += predicted == expected;
  }
  return double(correct) / double(rows);
}

template double average_precision(std::span<const float>, std::span<const float>);
template double average_precision(std::span<const double>, std::span<const double>);
template double mean_average_precision(const Tensor<float>&, const Tensor<float>&);
template double mean_average_precision(const Tensor<double>&, const Tensor<double>&);
template double accuracy(const Tensor<float>&, const Tensor<float>&);
template double accuracy(const Tensor<double>&, const Tensor<double>&);

}  // namespace lhgnn
