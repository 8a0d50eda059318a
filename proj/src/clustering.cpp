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

#include "lhgnn/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace lhgnn {
namespace {

template <typename T>
void check_nodes(const Tensor<T>& nodes) {
  if (nodes.rank() != 2) {
    throw DimensionError("clustering expects a [N, C] node matrix, got " +
                         shape_string(nodes.shape()));
  }
}

template <typename T>
double squared_distance(const T* a, const T* b, std::size_t c) {
  double acc = 0.0;
  for (std::size_t i = 0; i < c; ++i) {
    const double d = double(a[i]) - double(b[i]);
    acc += d * d;
  }
  return acc;
}

// Indices of the k largest scores, descending, lowest index first on ties.
std::vector<std::size_t> top_k_desc(const std::vector<double>& scores, std::size_t k) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::partial_sort(order.begin(), order.begin() + std::ptrdiff_t(k), order.end(),
                    [&](std::size_t a, std::size_t b) {
                      return scores[a] > scores[b] || (scores[a] == scores[b] && a < b);
                    });
  order.resize(k);
  return order;
}

void check_top_k(std::size_t k, std::size_t p) {
  if (k == 0 || k > p) {
    throw ParameterError("top-K needs 1 <= K <= P, got K=" + std::to_string(k) +
                         " with P=" + std::to_string(p));
  }
}

}  // namespace

template <typename T>
Tensor<T> init_centroids(const Tensor<T>& nodes, std::size_t num_centroids) {
  check_nodes(nodes);
  const std::size_t n = nodes.dim(0), c = nodes.dim(1);
  if (num_centroids == 0 || n < num_centroids) {
    throw ParameterError("need 1 <= P <= N centroids, got P=" +
                         std::to_string(num_centroids) + " with N=" + std::to_string(n));
  }
  Tensor<T> out({num_centroids, c});
  for (std::size_t p = 0; p < num_centroids; ++p) {
    const T* src = nodes.row(p * n / num_centroids);
    std::copy(src, src + c, out.row(p));
  }
  return out;
}

template <typename T>
Tensor<T> memberships(const Tensor<T>& nodes, const Tensor<T>& centroids, double m) {
  check_nodes(nodes);
  if (centroids.rank() != 2 || centroids.dim(1) != nodes.dim(1)) {
    throw DimensionError("centroid width does not match node width");
  }
  if (!(m > 1.0)) throw ParameterError("fuzziness m must exceed 1");
  const std::size_t n = nodes.dim(0), p = centroids.dim(0), c = nodes.dim(1);
  const double exponent = 1.0 / (m - 1.0);
  Tensor<T> out({n, p});
  std::vector<double> d2(p), w(p);
  for (std::size_t i = 0; i < n; ++i) {
    double nearest = std::numeric_limits<double>::infinity();
    std::size_t nearest_idx = 0;
    for (std::size_t j = 0; j < p; ++j) {
      d2[j] = squared_distance(nodes.row(i), centroids.row(j), c);
      if (d2[j] < nearest) {
        nearest = d2[j];
        nearest_idx = j;
      }
    }
    T* row = out.row(i);
    if (nearest == 0.0) {
      row[nearest_idx] = T{1};
      continue;
    }
    // u_ip = (1/d_p^2)^(1/(m-1)) / sum_j (1/d_j^2)^(1/(m-1)), scaled by the
    // nearest distance so the largest weight is exactly 1.
    double total = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
      w[j] = std::pow(nearest / d2[j], exponent);
      total += w[j];
    }
    for (std::size_t j = 0; j < p; ++j) row[j] = T(w[j] / total);
  }
  return out;
}

template <typename T>
Tensor<T> update_centroids(const Tensor<T>& nodes, const Tensor<T>& memberships, double m,
                           const Tensor<T>& previous, std::vector<std::size_t>* stale) {
  check_nodes(nodes);
  const std::size_t n = nodes.dim(0), c = nodes.dim(1);
  if (memberships.rank() != 2 || memberships.dim(0) != n) {
    throw DimensionError("membership rows must match node count");
  }
  const std::size_t p = memberships.dim(1);
  if (previous.rank() != 2 || previous.dim(0) != p || previous.dim(1) != c) {
    throw DimensionError("previous centroids must be [P, C]");
  }
  std::vector<double> acc(p * c, 0.0), mass(p, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const T* x = nodes.row(i);
    for (std::size_t j = 0; j < p; ++j) {
      const double u = double(memberships(i, j));
      if (u == 0.0) continue;
      const double weight = std::pow(u, m);
      mass[j] += weight;
      double* a = acc.data() + j * c;
      for (std::size_t d = 0; d < c; ++d) a[d] += weight * double(x[d]);
    }
  }
  Tensor<T> out = previous;
  for (std::size_t j = 0; j < p; ++j) {
    if (mass[j] == 0.0) {
      if (stale) stale->push_back(j);
      continue;
    }
    for (std::size_t d = 0; d < c; ++d) out(j, d) = T(acc[j * c + d] / mass[j]);
  }
  return out;
}

template <typename T>
HigherOrderSet top_k_memberships(const Tensor<T>& memberships, double m, std::size_t k) {
  if (memberships.rank() != 2) throw DimensionError("memberships must be [N, P]");
  const std::size_t n = memberships.dim(0), p = memberships.dim(1);
  check_top_k(k, p);
  HigherOrderSet out;
  out.k = k;
  out.indices.reserve(n * k);
  std::vector<double> scores(p);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < p; ++j) scores[j] = std::pow(double(memberships(i, j)), m);
    for (std::size_t idx : top_k_desc(scores, k)) out.indices.push_back(idx);
  }
  return out;
}

template <typename T>
HigherOrderSet nearest_centroids(const Tensor<T>& nodes, const Tensor<T>& centroids,
                                 std::size_t k) {
  check_nodes(nodes);
  const std::size_t n = nodes.dim(0), p = centroids.dim(0), c = nodes.dim(1);
  check_top_k(k, p);
  HigherOrderSet out;
  out.k = k;
  out.indices.reserve(n * k);
  std::vector<double> scores(p);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < p; ++j) {
      scores[j] = -squared_distance(nodes.row(i), centroids.row(j), c);
    }
    for (std::size_t idx : top_k_desc(scores, k)) out.indices.push_back(idx);
  }
  return out;
}

template <typename T>
std::pair<ClusterState<T>, HigherOrderSet> fuzzy_cmeans(const Tensor<T>& nodes,
                                                        std::size_t num_centroids,
                                                        std::size_t k, double m,
                                                        std::size_t iterations) {
  if (iterations == 0) throw ParameterError("fuzzy c-means needs at least one iteration");
  check_top_k(k, num_centroids);
  ClusterState<T> state;
  state.fuzziness = m;
  state.iterations = iterations;
  state.centroids = init_centroids(nodes, num_centroids);
  for (std::size_t it = 0; it < iterations; ++it) {
    const Tensor<T> u = memberships(nodes, state.centroids, m);
    state.centroids = update_centroids(nodes, u, m, state.centroids, &state.stale_clusters);
  }
  state.memberships = memberships(nodes, state.centroids, m);
  HigherOrderSet higher = top_k_memberships(state.memberships, m, k);
  return {std::move(state), std::move(higher)};
}

template <typename T>
ClusterState<T> kmeans(const Tensor<T>& nodes, std::size_t num_centroids,
                       std::size_t iterations) {
  ClusterState<T> state;
  state.fuzziness = 1.0;
  state.iterations = iterations;
  state.centroids = init_centroids(nodes, num_centroids);
  const std::size_t n = nodes.dim(0);
  auto assign = [&]() {
    Tensor<T> one_hot({n, num_centroids});
    const HigherOrderSet nearest = nearest_centroids(nodes, state.centroids, 1);
    for (std::size_t i = 0; i < n; ++i) one_hot(i, nearest.indices[i]) = T{1};
    return one_hot;
  };
  for (std::size_t it = 0; it < iterations; ++it) {
    // With one-hot weights u^m = u for any m, so the fuzzy update is the mean.
    state.centroids = update_centroids(nodes, assign(), 1.0, state.centroids,
                                       &state.stale_clusters);
  }
  state.memberships = assign();
  return state;
}

template <typename T>
std::pair<ClusterState<T>, HigherOrderSet> cluster_nodes(const Tensor<T>& nodes,
                                                         const ClusteringOptions& options) {
  if (options.method == ClusteringMethod::kFuzzyCMeans) {
    return fuzzy_cmeans(nodes, options.num_centroids, options.top_k, options.fuzziness,
                        options.iterations);
  }
  check_top_k(options.top_k, options.num_centroids);
  ClusterState<T> state = kmeans(nodes, options.num_centroids, options.iterations);
  HigherOrderSet higher = nearest_centroids(nodes, state.centroids, options.top_k);
  return {std::move(state), std::move(higher)};
}

#define LHGNN_INSTANTIATE_CLUSTERING(T)                                                   \
  template Tensor<T> init_centroids(const Tensor<T>&, std::size_t);                       \
  template Tensor<T> memberships(const Tensor<T>&, const Tensor<T>&, double);             \
  template Tensor<T> update_centroids(const Tensor<T>&, const Tensor<T>&, double,         \
                                      const Tensor<T>&, std::vector<std::size_t>*);       \
  template HigherOrderSet top_k_memberships(const Tensor<T>&, double, std::size_t);       \
  template HigherOrderSet nearest_centroids(const Tensor<T>&, const Tensor<T>&,           \
                                            std::size_t);                                 \
  template std::pair<ClusterState<T>, HigherOrderSet> fuzzy_cmeans(                       \
      const Tensor<T>&, std::size_t, std::size_t, double, std::size_t);                   \
  template ClusterState<T> kmeans(const Tensor<T>&, std::size_t, std::size_t);            \
  template std::pair<ClusterState<T>, HigherOrderSet> cluster_nodes(                      \
      const Tensor<T>&, const ClusteringOptions&);

LHGNN_INSTANTIATE_CLUSTERING(float)
LHGNN_INSTANTIATE_CLUSTERING(double)

#undef LHGNN_INSTANTIATE_CLUSTERING

}  // namespace lhgnn
