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

#include "lhgnn/knn.hpp"

#include <algorithm>
#include <utility>

namespace lhgnn {
namespace {

constexpr std::size_t kQueryBlock = 64;

template <typename T>
double squared_distance(const T* a, const T* b, std::size_t c) {
  double acc = 0.0;
  for (std::size_t i = 0; i < c; ++i) {
    const double d = double(a[i]) - double(b[i]);
    acc += d * d;
  }
  return acc;
}

}  // namespace

template <typename T>
NeighborSet knn(const Tensor<T>& nodes, std::size_t k) {
  if (nodes.rank() != 2) {
    throw DimensionError("knn expects a [N, C] node matrix, got " +
                         shape_string(nodes.shape()));
  }
  const std::size_t n = nodes.dim(0), c = nodes.dim(1);
  if (k == 0 || k >= n) {
    throw ParameterError("knn needs 1 <= k <= N-1, got k=" + std::to_string(k) +
                         " with N=" + std::to_string(n));
  }
  NeighborSet out;
  out.k = k;
  out.indices.resize(n * k);

  std::vector<double> block(kQueryBlock * n);
  std::vector<std::pair<double, std::size_t>> candidates;
  candidates.reserve(n);
  for (std::size_t q0 = 0; q0 < n; q0 += kQueryBlock) {
    const std::size_t q1 = std::min(n, q0 + kQueryBlock);
    for (std::size_t q = q0; q < q1; ++q) {
      double* drow = block.data() + (q - q0) * n;
      const T* xq = nodes.row(q);
      for (std::size_t j = 0; j < n; ++j) drow[j] = squared_distance(xq, nodes.row(j), c);
    }
    for (std::size_t q = q0; q < q1; ++q) {
      const double* drow = block.data() + (q - q0) * n;
      candidates.clear();
      for (std::size_t j = 0; j < n; ++j) {
        if (j != q) candidates.emplace_back(drow[j], j);
      }
      std::partial_sort(candidates.begin(), candidates.begin() + std::ptrdiff_t(k),
                        candidates.end());
      for (std::size_t j = 0; j < k; ++j) out.indices[q * k + j] = candidates[j].second;
    }
  }
  return out;
}

template <typename T>
Tensor<T> pairwise_squared_distances(const Tensor<T>& a, const Tensor<T>& b,
                                     DistanceMethod method) {
  if (a.rank() != 2 || b.rank() != 2 || a.dim(1) != b.dim(1)) {
    throw DimensionError("pairwise distances need [M, C] and [N, C] inputs");
  }
  const std::size_t m = a.dim(0), n = b.dim(0), c = a.dim(1);
  Tensor<T> out({m, n});
  if (method == DistanceMethod::kDirect) {
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < n; ++j) out(i, j) = T(squared_distance(a.row(i), b.row(j), c));
    }
    return out;
  }
  std::vector<T> norm_a(m), norm_b(n);
  for (std::size_t i = 0; i < m; ++i) {
    T acc = 0;
    for (std::size_t p = 0; p < c; ++p) acc += a(i, p) * a(i, p);
    norm_a[i] = acc;
  }
  for (std::size_t j = 0; j < n; ++j) {
    T acc = 0;
    for (std::size_t p = 0; p < c; ++p) acc += b(j, p) * b(j, p);
    norm_b[j] = acc;
  }
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      T dot = 0;
      for (std::size_t p = 0; p < c; ++p) dot += a(i, p) * b(j, p);
      out(i, j) = std::max(T{0}, norm_a[i] + norm_b[j] - T(2) * dot);
    }
  }
  return out;
}

template NeighborSet knn(const Tensor<float>&, std::size_t);
template NeighborSet knn(const Tensor<double>&, std::size_t);
template Tensor<float> pairwise_squared_distances(const Tensor<float>&, const Tensor<float>&,
                                                  DistanceMethod);
template Tensor<double> pairwise_squared_distances(const Tensor<double>&, const Tensor<double>&,
                                                   DistanceMethod);

}  // namespace lhgnn
