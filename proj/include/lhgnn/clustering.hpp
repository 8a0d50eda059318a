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

#ifndef LHGNN_CLUSTERING_HPP_
#define LHGNN_CLUSTERING_HPP_

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "lhgnn/tensor.hpp"

namespace lhgnn {

template <typename T>
struct ClusterState {
  Tensor<T> centroids;    // [P, C]
  Tensor<T> memberships;  // [N, P], rows sum to 1
  double fuzziness = 2.0;
  std::size_t iterations = 1;
  // Clusters whose membership mass vanished during an update and therefore
  // kept their previous centroid.
  std::vector<std::size_t> stale_clusters;
};

// The K centroids attached to each node, strongest first.
struct HigherOrderSet {
  std::size_t k = 0;
  std::vector<std::size_t> indices;  // num_nodes * k, centroid ids

  std::size_t num_nodes() const { return k ? indices.size() / k : 0; }
  std::span<const std::size_t> of(std::size_t node) const {
    return {indices.data() + node * k, k};
  }

  // L_i as a [K, C] tensor.
  template <typename T>
  Tensor<T> vectors(const Tensor<T>& centroids, std::size_t node) const {
    const std::size_t c = centroids.dim(1);
    Tensor<T> out({k, c});
    for (std::size_t j = 0; j < k; ++j) {
      const T* src = centroids.row(indices[node * k + j]);
      std::copy(src, src + c, out.row(j));
    }
    return out;
  }
};

enum class ClusteringMethod { kFuzzyCMeans, kKMeans };

// Centroid p is node floor(p * N / P).
template <typename T>
Tensor<T> init_centroids(const Tensor<T>& nodes, std::size_t num_centroids);

// Fuzzy membership of every node in every centroid. A node sitting exactly on
// a centroid is assigned wholly to the lowest-index such centroid.
template <typename T>
Tensor<T> memberships(const Tensor<T>& nodes, const Tensor<T>& centroids, double m);

// Membership-weighted means with weights u^m. A cluster with zero total
// weight keeps its row from `previous`; its id is appended to `stale` if given.
template <typename T>
Tensor<T> update_centroids(const Tensor<T>& nodes, const Tensor<T>& memberships, double m,
                           const Tensor<T>& previous,
                           std::vector<std::size_t>* stale = nullptr);

// For each row, the K columns with the largest u^m (lowest index on ties).
template <typename T>
HigherOrderSet top_k_memberships(const Tensor<T>& memberships, double m, std::size_t k);

// For each node, the K closest centroids (lowest index on ties).
template <typename T>
HigherOrderSet nearest_centroids(const Tensor<T>& nodes, const Tensor<T>& centroids,
                                 std::size_t k);

// init, then `iterations` rounds of (memberships, update), then memberships
// against the updated centroids and top-K selection.
template <typename T>
std::pair<ClusterState<T>, HigherOrderSet> fuzzy_cmeans(const Tensor<T>& nodes,
                                                        std::size_t num_centroids,
                                                        std::size_t k, double m,
                                                        std::size_t iterations);

// Lloyd iterations with hard one-hot memberships.
template <typename T>
ClusterState<T> kmeans(const Tensor<T>& nodes, std::size_t num_centroids,
                       std::size_t iterations);

struct ClusteringOptions {
  ClusteringMethod method = ClusteringMethod::kFuzzyCMeans;
  std::size_t num_centroids = 50;
  std::size_t top_k = 10;
  double fuzziness = 2.0;
  std::size_t iterations = 1;
};

// Dispatches to the configured backend and builds the higher-order set.
template <typename T>
std::pair<ClusterState<T>, HigherOrderSet> cluster_nodes(const Tensor<T>& nodes,
                                                         const ClusteringOptions& options);

}  // namespace lhgnn

#endif  // LHGNN_CLUSTERING_HPP_
