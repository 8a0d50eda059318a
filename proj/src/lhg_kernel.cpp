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

#include "lhgnn/lhg_kernel.hpp"

#include <algorithm>

#include "lhgnn/ops.hpp"

namespace lhgnn {

std::string to_string(KernelVariant variant) {
  switch (variant) {
    case KernelVariant::kLocalOnly:
      return "local";
    case KernelVariant::kHigherOnly:
      return "higher";
    case KernelVariant::kLocalHigher:
      return "local_higher";
  }
  return "local_higher";
}

KernelVariant kernel_variant_from_string(const std::string& name) {
  if (name == "local") return KernelVariant::kLocalOnly;
  if (name == "higher") return KernelVariant::kHigherOnly;
  if (name == "local_higher") return KernelVariant::kLocalHigher;
  throw ParameterError("unknown kernel variant: " + name);
}

template <typename T>
Tensor<T> max_relative(std::span<const T> center, const Tensor<T>& others) {
  if (others.rank() != 2 || others.dim(0) == 0) {
    throw ParameterError("max_relative needs a non-empty [J, C] set");
  }
  if (others.dim(1) != center.size()) {
    throw DimensionError("max_relative: set width differs from center width");
  }
  const std::size_t c = center.size();
  Tensor<T> out({c});
  for (std::size_t d = 0; d < c; ++d) out[d] = others(0, d) - center[d];
  for (std::size_t j = 1; j < others.dim(0); ++j) {
    for (std::size_t d = 0; d < c; ++d) out[d] = std::max(out[d], others(j, d) - center[d]);
  }
  return out;
}

template <typename T>
GraphSelection<T> build_graph_selection(const Tensor<T>& nodes, std::size_t batch,
                                        std::size_t k, const ClusteringOptions& clustering,
                                        KernelVariant variant) {
  if (nodes.rank() != 2 || batch == 0 || nodes.dim(0) % batch != 0) {
    throw DimensionError("graph selection needs [B*N, C] nodes divisible by batch");
  }
  const std::size_t n = nodes.dim(0) / batch, c = nodes.dim(1);
  GraphSelection<T> out;
  if (uses_local(variant)) {
    out.neighbors.k = k;
    out.neighbors.indices.reserve(batch * n * k);
  }
  if (uses_higher(variant)) {
    out.higher.k = clustering.top_k;
    out.higher.indices.reserve(batch * n * clustering.top_k);
    out.centroid_bank = Tensor<T>({batch * clustering.num_centroids, c});
  }
  for (std::size_t b = 0; b < batch; ++b) {
    Tensor<T> sample({n, c}, std::vector<T>(nodes.row(b * n), nodes.row(b * n) + n * c));
    if (uses_local(variant)) {
      const NeighborSet local = knn(sample, k);
      for (std::size_t idx : local.indices) out.neighbors.indices.push_back(b * n + idx);
    }
    if (uses_higher(variant)) {
      const auto [state, higher] = cluster_nodes(sample, clustering);
      const std::size_t p = clustering.num_centroids;
      std::copy(state.centroids.data().begin(), state.centroids.data().end(),
                out.centroid_bank.row(b * p));
      for (std::size_t idx : higher.indices) out.higher.indices.push_back(b * p + idx);
    }
  }
  return out;
}

template <typename T>
LhgConvOutput<T> lhg_conv(Tape<T>& tape, const Var<T>& nodes, const GraphSelection<T>& selection,
                          const LhgConvVars<T>& params, KernelVariant variant) {
  const auto& x = nodes->value;
  if (x.rank() != 2) throw DimensionError("lhg_conv expects [R, C] nodes");
  const std::size_t rows = x.dim(0), c = x.dim(1);
  const std::size_t width = concat_width(variant, c);
  const Shape sigma_shape{width, width}, proj_shape{width, c};
  if (params.sigma_weight->value.shape() != sigma_shape ||
      params.proj_weight->value.shape() != proj_shape) {
    throw DimensionError("lhg_conv weights do not match variant width " +
                         std::to_string(width) + " for C=" + std::to_string(c));
  }
  std::vector<Var<T>> parts{nodes};
  if (uses_local(variant)) {
    if (selection.neighbors.num_nodes() != rows) {
      throw DimensionError("neighbour set does not cover every node");
    }
    parts.push_back(ops::max_relative_gather(tape, nodes, selection.neighbors.indices,
                                             selection.neighbors.k));
  }
  if (uses_higher(variant)) {
    if (selection.higher.num_nodes() != rows) {
      throw DimensionError("higher-order set does not cover every node");
    }
    parts.push_back(ops::max_relative_to_set(tape, nodes, selection.centroid_bank,
                                             selection.higher.indices, selection.higher.k));
  }
  Var<T> concat = ops::concat_columns(tape, parts);
  Var<T> hidden =
      ops::gelu(tape, ops::linear(tape, concat, params.sigma_weight, params.sigma_bias));
  Var<T> projected = ops::linear(tape, hidden, params.proj_weight, params.proj_bias);
  return {hidden, ops::add(tape, nodes, projected)};
}

template <typename T>
LhgConvResult<T> lhg_conv(const Tensor<T>& nodes, const NeighborSet& neighbors,
                          const HigherOrderSet& higher, const Tensor<T>& centroids,
                          const LhgConvParams<T>& params, KernelVariant variant) {
  Tape<T> tape(Tape<T>::Mode::kInference);
  GraphSelection<T> selection{neighbors, higher, centroids};
  LhgConvVars<T> vars{tape.constant(params.sigma_weight), tape.constant(params.sigma_bias),
                      tape.constant(params.proj_weight), tape.constant(params.proj_bias)};
  auto out = lhg_conv(tape, tape.constant(nodes), selection, vars, variant);
  return {out.hidden->value, out.output->value};
}

#define LHGNN_INSTANTIATE_LHG(T)                                                        \
  template Tensor<T> max_relative(std::span<const T>, const Tensor<T>&);                \
  template GraphSelection<T> build_graph_selection(const Tensor<T>&, std::size_t,       \
                                                   std::size_t, const ClusteringOptions&, \
                                                   KernelVariant);                      \
  template LhgConvOutput<T> lhg_conv(Tape<T>&, const Var<T>&, const GraphSelection<T>&, \
                                     const LhgConvVars<T>&, KernelVariant);             \
  template LhgConvResult<T> lhg_conv(const Tensor<T>&, const NeighborSet&,              \
                                     const HigherOrderSet&, const Tensor<T>&,           \
                                     const LhgConvParams<T>&, KernelVariant);

LHGNN_INSTANTIATE_LHG(float)
LHGNN_INSTANTIATE_LHG(double)

#undef LHGNN_INSTANTIATE_LHG

}  // namespace lhgnn
