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

#ifndef LHGNN_KNN_HPP_
#define LHGNN_KNN_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "lhgnn/tensor.hpp"

namespace lhgnn {

// k nearest neighbours of every node, self excluded. Row i of `indices` is
// sorted by ascending distance, ties by ascending index.
struct NeighborSet {
  std::size_t k = 0;
  std::vector<std::size_t> indices;  // num_nodes * k

  std::size_t num_nodes() const { return k ? indices.size() / k : 0; }
  std::span<const std::size_t> of(std::size_t node) const {
    return {indices.data() + node * k, k};
  }

  // S_i as a [k, C] tensor.
  template <typename T>
  Tensor<T> vectors(const Tensor<T>& nodes, std::size_t node) const {
    const std::size_t c = nodes.dim(1);
    Tensor<T> out({k, c});
    for (std::size_t j = 0; j < k; ++j) {
      const T* src = nodes.row(indices[node * k + j]);
      std::copy(src, src + c, out.row(j));
    }
    return out;
  }
};

// Exact search over a [N, C] node matrix with a blocked distance matrix.
// Requires 1 <= k <= N - 1.
template <typename T>
NeighborSet knn(const Tensor<T>& nodes, std::size_t k);

enum class DistanceMethod {
  kDirect,  // sum of squared differences
  kGram,    // |a|^2 + |b|^2 - 2 a.b
};

// [M, N] squared Euclidean distances between rows of `a` [M, C] and `b` [N, C].
template <typename T>
Tensor<T> pairwise_squared_distances(const Tensor<T>& a, const Tensor<T>& b,
                                     DistanceMethod method = DistanceMethod::kDirect);

}  // namespace lhgnn

#endif  // LHGNN_KNN_HPP_
