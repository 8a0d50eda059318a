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

#ifndef LHGNN_MODEL_HPP_
#define LHGNN_MODEL_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "lhgnn/autograd.hpp"
#include "lhgnn/config.hpp"
#include "lhgnn/lhg_kernel.hpp"
#include "lhgnn/param_store.hpp"
#include "lhgnn/tensor.hpp"

namespace lhgnn {

// Graph selections of every LHG block in one forward pass. Recording and
// replaying them freezes neighbour indices and centroids, which is what the
// finite-difference checks perturb around.
template <typename T>
struct SelectionCache {
  enum class Mode { kRecord, kReplay };
  Mode mode = Mode::kRecord;
  std::vector<GraphSelection<T>> blocks;
  std::size_t cursor = 0;
};

template <typename T>
struct ForwardOptions {
  SelectionCache<T>* selections = nullptr;
  // Receives [B, H, W, C] of the feature map entering each stage.
  std::vector<Shape>* stage_shapes = nullptr;
};

// Stem -> four stages of (LHG graph conv + ConvFFN) with downsampling between
// stages -> pooled classification head. Parameters live in a ParamStore so
// the same object serves training, checkpoints and averaging.
template <typename T>
class Model {
 public:
  Model(ModelConfig config, std::uint64_t seed);
  // Adopts an existing parameter directory; throws FormatError if it does not
  // match what `config` would create.
  Model(ModelConfig config, ParamStore<T> params);

  const ModelConfig& config() const { return config_; }
  ParamStore<T>& params() { return params_; }
  const ParamStore<T>& params() const { return params_; }
  const std::vector<StageGeometry>& geometry() const { return geometry_; }

  // Learnable scalars (running statistics excluded).
  std::size_t parameter_count() const { return params_.learnable_count(); }

  // input: [B, frames, bins] or [B, frames, bins, 1]. Returns logits [B, classes].
  Var<T> forward(Tape<T>& tape, const Tensor<T>& input,
                 const ForwardOptions<T>& options = {});

  // Inference-mode logits.
  Tensor<T> predict(const Tensor<T>& input);

  Var<T> stem(Tape<T>& tape, const Var<T>& x);
  Var<T> lhg_block(Tape<T>& tape, const Var<T>& x, std::size_t stage, std::size_t block,
                   SelectionCache<T>* selections);
  Var<T> conv_ffn(Tape<T>& tape, const Var<T>& x, const std::string& prefix);
  Var<T> downsample(Tape<T>& tape, const Var<T>& x, std::size_t stage);
  Var<T> head(Tape<T>& tape, const Var<T>& x);

 private:
  void build(std::uint64_t seed);
  Var<T> norm(Tape<T>& tape, const Var<T>& x, const std::string& prefix);
  Var<T> conv_layer(Tape<T>& tape, const Var<T>& x, const std::string& prefix,
                    std::size_t stride);

  ModelConfig config_;
  std::vector<StageGeometry> geometry_;
  ParamStore<T> params_;
};

// Parameter names and shapes `config` produces, in directory order.
std::vector<std::pair<std::string, Shape>> parameter_layout(const ModelConfig& config);

extern template class Model<float>;
extern template class Model<double>;

}  // namespace lhgnn

#endif  // LHGNN_MODEL_HPP_
