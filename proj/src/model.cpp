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

#include "lhgnn/model.hpp"

#include <cmath>
#include <functional>
#include <random>

#include "lhgnn/ops.hpp"

namespace lhgnn {
namespace {

constexpr std::size_t kStemStrides[] = {2, 1, 2, 1};

enum class InitKind { kUniformFanIn, kOnes, kZeros };

struct LayoutItem {
  std::string name;
  Shape shape;
  InitKind init;
  std::size_t fan_in;
  bool learnable;
};

std::string stage_prefix(std::size_t stage, std::size_t block) {
  return "stages." + std::to_string(stage) + ".blocks." + std::to_string(block);
}

// Single source of truth for parameter names, shapes and initializers.
std::vector<LayoutItem> layout(const ModelConfig& c) {
  std::vector<LayoutItem> items;
  auto weight = [&](const std::string& name, Shape shape, std::size_t fan_in) {
    items.push_back({name + ".weight", std::move(shape), InitKind::kUniformFanIn, fan_in, true});
  };
  auto bias = [&](const std::string& name, std::size_t n, std::size_t fan_in) {
    items.push_back({name + ".bias", {n}, InitKind::kUniformFanIn, fan_in, true});
  };
  auto norm = [&](const std::string& name, std::size_t n) {
    items.push_back({name + ".weight", {n}, InitKind::kOnes, 0, true});
    items.push_back({name + ".bias", {n}, InitKind::kZeros, 0, true});
    items.push_back({name + ".running_mean", {n}, InitKind::kZeros, 0, false});
    items.push_back({name + ".running_var", {n}, InitKind::kOnes, 0, false});
  };

  std::size_t in = 1;
  for (std::size_t i = 0; i < c.stem_channels.size(); ++i) {
    const std::string p = "stem." + std::to_string(i);
    const std::size_t out = c.stem_channels[i];
    weight(p, {3, 3, in, out}, 9 * in);
    bias(p, out, 9 * in);
    norm(p + ".norm", out);
    in = out;
  }
  for (std::size_t t = 0; t < c.channels.size(); ++t) {
    const std::size_t ch = c.channels[t];
    if (t > 0) {
      const std::string p = "downsample." + std::to_string(t);
      const std::size_t prev = c.channels[t - 1];
      weight(p, {3, 3, prev, ch}, 9 * prev);
      bias(p, ch, 9 * prev);
      norm(p + ".norm", ch);
    }
    const std::size_t width = concat_width(c.kernel, ch);
    const std::size_t hidden = c.ffn_expansion * ch;
    for (std::size_t b = 0; b < c.depths[t]; ++b) {
      const std::string p = stage_prefix(t, b);
      weight(p + ".graph.sigma", {width, width}, width);
      bias(p + ".graph.sigma", width, width);
      weight(p + ".graph.proj", {width, ch}, width);
      bias(p + ".graph.proj", ch, width);
      norm(p + ".ffn.norm", ch);
      weight(p + ".ffn.expand", {ch, hidden}, ch);
      bias(p + ".ffn.expand", hidden, ch);
      weight(p + ".ffn.dwconv", {3, 3, 1, hidden}, 9);
      bias(p + ".ffn.dwconv", hidden, 9);
      weight(p + ".ffn.proj", {hidden, ch}, hidden);
      bias(p + ".ffn.proj", ch, hidden);
    }
  }
  const std::size_t last = c.channels.back();
  weight("head.conv", {last, c.head_hidden}, last);
  bias("head.conv", c.head_hidden, last);
  weight("head.fc", {c.head_hidden, c.num_classes}, c.head_hidden);
  bias("head.fc", c.num_classes, c.head_hidden);
  return items;
}

}  // namespace

std::vector<std::pair<std::string, Shape>> parameter_layout(const ModelConfig& config) {
  std::vector<std::pair<std::string, Shape>> out;
  for (auto& item : layout(config)) out.emplace_back(item.name, item.shape);
  return out;
}

template <typename T>
Model<T>::Model(ModelConfig config, std::uint64_t seed) : config_(std::move(config)) {
  config_.validate();
  geometry_ = stage_geometry(config_);
  build(seed);
}

template <typename T>
Model<T>::Model(ModelConfig config, ParamStore<T> params)
    : config_(std::move(config)), params_(std::move(params)) {
  config_.validate();
  geometry_ = stage_geometry(config_);
  const auto expected = layout(config_);
  if (expected.size() != params_.size()) {
    throw FormatError("parameter directory has " + std::to_string(params_.size()) +
                      " entries, config expects " + std::to_string(expected.size()));
  }
  for (std::size_t i = 0; i < expected.size(); ++i) {
    auto& entry = params_.entries()[i];
    if (entry.name != expected[i].name || entry.value.shape() != expected[i].shape) {
      throw FormatError("parameter directory mismatch at '" + entry.name + "', expected '" +
                        expected[i].name + "' " + shape_string(expected[i].shape));
    }
    entry.requires_grad = expected[i].learnable;
  }
}

template <typename T>
void Model<T>::build(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (auto& item : layout(config_)) {
    Tensor<T> value(item.shape);
    switch (item.init) {
      case InitKind::kOnes:
        value.fill(T{1});
        break;
      case InitKind::kZeros:
        break;
      case InitKind::kUniformFanIn: {
        const double bound = 1.0 / std::sqrt(double(item.fan_in));
        std::uniform_real_distribution<double> dist(-bound, bound);
        for (auto& v : value.data()) v = T(dist(rng));
        break;
      }
    }
    params_.add(item.name, std::move(value), item.learnable);
  }
}

template <typename T>
Var<T> Model<T>::norm(Tape<T>& tape, const Var<T>& x, const std::string& prefix) {
  ops::BatchNormState<T> state;
  state.running_mean = &params_.at(prefix + ".running_mean");
  state.running_var = &params_.at(prefix + ".running_var");
  return ops::batch_norm(tape, x, tape.param(params_, prefix + ".weight"),
                         tape.param(params_, prefix + ".bias"), state);
}

template <typename T>
Var<T> Model<T>::conv_layer(Tape<T>& tape, const Var<T>& x, const std::string& prefix,
                            std::size_t stride) {
  ops::Conv2dOptions options;
  options.stride = stride;
  options.padding = 1;
  return ops::conv2d(tape, x, tape.param(params_, prefix + ".weight"),
                     tape.param(params_, prefix + ".bias"), options);
}

template <typename T>
Var<T> Model<T>::stem(Tape<T>& tape, const Var<T>& x) {
  const auto& shape = x->value.shape();
  if (shape.size() != 4 || shape[1] != config_.input_frames || shape[2] != config_.input_bins ||
      shape[3] != 1) {
    throw DimensionError("stem expects [B, " + std::to_string(config_.input_frames) + ", " +
                         std::to_string(config_.input_bins) + ", 1], got " +
                         shape_string(shape));
  }
  Var<T> h = x;
  for (std::size_t i = 0; i < config_.stem_channels.size(); ++i) {
    const std::string p = "stem." + std::to_string(i);
    h = ops::gelu(tape, norm(tape, conv_layer(tape, h, p, kStemStrides[i]), p + ".norm"));
  }
  return h;
}

template <typename T>
Var<T> Model<T>::lhg_block(Tape<T>& tape, const Var<T>& x, std::size_t stage,
                           std::size_t block, SelectionCache<T>* selections) {
  const Shape shape = x->value.shape();
  const std::size_t batch = shape[0], c = shape[3];
  const std::size_t n = shape[1] * shape[2];
  const StageGeometry& g = geometry_.at(stage);
  Var<T> nodes = ops::reshape(tape, x, {batch * n, c});

  GraphSelection<T> computed;
  const GraphSelection<T>* selection = &computed;
  if (selections && selections->mode == SelectionCache<T>::Mode::kReplay) {
    if (selections->cursor >= selections->blocks.size()) {
      throw StateError("selection cache exhausted during replay");
    }
    selection = &selections->blocks[selections->cursor++];
  } else {
    ClusteringOptions clustering;
    clustering.method = config_.clustering;
    clustering.num_centroids = g.num_centroids;
    clustering.top_k = g.top_k;
    clustering.fuzziness = config_.fuzziness;
    clustering.iterations = config_.cluster_iterations;
    computed = build_graph_selection(nodes->value, batch, g.k, clustering, config_.kernel);
    if (selections) {
      selections->blocks.push_back(computed);
      selection = &selections->blocks.back();
    }
  }

  const std::string p = stage_prefix(stage, block);
  LhgConvVars<T> vars{tape.param(params_, p + ".graph.sigma.weight"),
                      tape.param(params_, p + ".graph.sigma.bias"),
                      tape.param(params_, p + ".graph.proj.weight"),
                      tape.param(params_, p + ".graph.proj.bias")};
  Var<T> y = lhg_conv(tape, nodes, *selection, vars, config_.kernel).output;
  return conv_ffn(tape, ops::reshape(tape, y, shape), p + ".ffn");
}

template <typename T>
Var<T> Model<T>::conv_ffn(Tape<T>& tape, const Var<T>& x, const std::string& prefix) {
  const Shape shape = x->value.shape();
  const std::size_t rows = shape[0] * shape[1] * shape[2], c = shape[3];
  const std::size_t hidden = params_.at(prefix + ".expand.bias").size();
  Var<T> h = norm(tape, x, prefix + ".norm");
  h = ops::linear(tape, ops::reshape(tape, h, {rows, c}),
                  tape.param(params_, prefix + ".expand.weight"),
                  tape.param(params_, prefix + ".expand.bias"));
  ops::Conv2dOptions dw;
  dw.padding = 1;
  dw.depthwise = true;
  h = ops::conv2d(tape, ops::reshape(tape, h, {shape[0], shape[1], shape[2], hidden}),
                  tape.param(params_, prefix + ".dwconv.weight"),
                  tape.param(params_, prefix + ".dwconv.bias"), dw);
  h = ops::gelu(tape, h);
  h = ops::linear(tape, ops::reshape(tape, h, {rows, hidden}),
                  tape.param(params_, prefix + ".proj.weight"),
                  tape.param(params_, prefix + ".proj.bias"));
  return ops::add(tape, x, ops::reshape(tape, h, shape));
}

template <typename T>
Var<T> Model<T>::downsample(Tape<T>& tape, const Var<T>& x, std::size_t stage) {
  const auto& shape = x->value.shape();
  if (config_.strict_geometry && (shape[1] % 2 || shape[2] % 2)) {
    throw DimensionError("downsample needs even extents, got " + shape_string(shape));
  }
  const std::string p = "downsample." + std::to_string(stage);
  return norm(tape, conv_layer(tape, x, p, 2), p + ".norm");
}

template <typename T>
Var<T> Model<T>::head(Tape<T>& tape, const Var<T>& x) {
  Var<T> pooled = ops::global_avg_pool(tape, x);
  Var<T> h = ops::gelu(tape, ops::linear(tape, pooled, tape.param(params_, "head.conv.weight"),
                                         tape.param(params_, "head.conv.bias")));
  return ops::linear(tape, h, tape.param(params_, "head.fc.weight"),
                     tape.param(params_, "head.fc.bias"));
}

template <typename T>
Var<T> Model<T>::forward(Tape<T>& tape, const Tensor<T>& input,
                         const ForwardOptions<T>& options) {
  Tensor<T> x = input;
  if (x.rank() == 3) x = x.reshaped({x.dim(0), x.dim(1), x.dim(2), 1});
  if (options.selections) {
    options.selections->cursor = 0;
    if (options.selections->mode == SelectionCache<T>::Mode::kRecord) {
      options.selections->blocks.clear();
    }
  }
  Var<T> h = stem(tape, tape.constant(std::move(x)));
  for (std::size_t t = 0; t < config_.channels.size(); ++t) {
    if (t > 0) h = downsample(tape, h, t);
    if (options.stage_shapes) options.stage_shapes->push_back(h->value.shape());
    for (std::size_t b = 0; b < config_.depths[t]; ++b) {
      h = lhg_block(tape, h, t, b, options.selections);
    }
  }
  return head(tape, h);
}

template <typename T>
Tensor<T> Model<T>::predict(const Tensor<T>& input) {
  Tape<T> tape(Tape<T>::Mode::kInference);
  return forward(tape, input)->value;
}

template class Model<float>;
template class Model<double>;

}  // namespace lhgnn
