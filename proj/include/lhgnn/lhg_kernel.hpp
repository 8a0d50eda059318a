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

#ifndef LHGNN_LHG_KERNEL_HPP_
#define LHGNN_LHG_KERNEL_HPP_

#include <cstddef>
#include <span>
#include <string>

#include "lhgnn/autograd.hpp"
#include "lhgnn/clustering.hpp"
#include "lhgnn/knn.hpp"
#include "lhgnn/tensor.hpp"

namespace lhgnn {

// Which relative-feature blocks are concatenated after x_i.
enum class KernelVariant {
  kLocalOnly,    // x_i, max(S_i - x_i)
  kHigherOnly,   // x_i, max(L_i - x_i)
  kLocalHigher,  // x_i, max(S_i - x_i), max(L_i - x_i)
};

std::string to_string(KernelVariant variant);
KernelVariant kernel_variant_from_string(const std::string& name);

inline bool uses_local(KernelVariant v) { return v != KernelVariant::kHigherOnly; }
inline bool uses_higher(KernelVariant v) { return v != KernelVariant::kLocalOnly; }

// 2C for the single-relation variants, 3C for the fused kernel.
inline std::size_t concat_width(KernelVariant variant, std::size_t channels) {
  return variant == KernelVariant::kLocalHigher ? 3 * channels : 2 * channels;
}

// Elementwise max over rows of (others - center).
template <typename T>
Tensor<T> max_relative(std::span<const T> center, const Tensor<T>& others);

template <typename T>
struct LhgConvParams {
  Tensor<T> sigma_weight;  // [W, W]
  Tensor<T> sigma_bias;    // [W]
  Tensor<T> proj_weight;   // [W, C]
  Tensor<T> proj_bias;     // [C]
};

template <typename T>
struct LhgConvVars {
  Var<T> sigma_weight;
  Var<T> sigma_bias;
  Var<T> proj_weight;
  Var<T> proj_bias;
};

template <typename T>
struct LhgConvOutput {
  Var<T> hidden;  // x'' = GELU(sigma(concat)), [R, W]
  Var<T> output;  // y = x + h(x''), [R, C]
};

// Neighbour and centroid selections for a batch of flattened feature maps.
// Neighbour indices are global row ids into the [B*N, C] node matrix; higher
// order indices are row ids into `centroid_bank` [B*P, C]. Selections are
// constants for differentiation.
template <typename T>
struct GraphSelection {
  NeighborSet neighbors;
  HigherOrderSet higher;
  Tensor<T> centroid_bank;
};

// Runs k-NN and clustering independently for each of `batch` equal slices of
// `nodes`.
template <typename T>
GraphSelection<T> build_graph_selection(const Tensor<T>& nodes, std::size_t batch,
                                        std::size_t k, const ClusteringOptions& clustering,
                                        KernelVariant variant);

// Local/higher-order graph convolution with residual:
//   x''_i = GELU(W_s [x_i, max(S_i - x_i), max(L_i - x_i)] + b_s)
//   y_i   = x_i + W_h x''_i + b_h
template <typename T>
LhgConvOutput<T> lhg_conv(Tape<T>& tape, const Var<T>& nodes, const GraphSelection<T>& selection,
                          const LhgConvVars<T>& params, KernelVariant variant);

template <typename T>
struct LhgConvResult {
  Tensor<T> hidden;
  Tensor<T> output;
};

// Eager single-sample form on plain tensors.
template <typename T>
LhgConvResult<T> lhg_conv(const Tensor<T>& nodes, const NeighborSet& neighbors,
                          const HigherOrderSet& higher, const Tensor<T>& centroids,
                          const LhgConvParams<T>& params, KernelVariant variant);

}  // namespace lhgnn

#endif  // LHGNN_LHG_KERNEL_HPP_
