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

#ifndef LHGNN_OPS_HPP_
#define LHGNN_OPS_HPP_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "lhgnn/autograd.hpp"
#include "lhgnn/tensor.hpp"

// Differentiable primitives. Every function computes its value eagerly and,
// when a parent requires gradients, records a backward closure on the tape.
// Feature maps are NHWC: [batch, height, width, channels].
namespace lhgnn::ops {

template <typename T>
Var<T> matmul(Tape<T>& tape, const Var<T>& a, const Var<T>& b);

// x[M,K] * w[K,N] + bias[N]; bias may be null.
template <typename T>
Var<T> linear(Tape<T>& tape, const Var<T>& x, const Var<T>& w, const Var<T>& bias);

template <typename T>
Var<T> add(Tape<T>& tape, const Var<T>& a, const Var<T>& b);

template <typename T>
Var<T> scale(Tape<T>& tape, const Var<T>& a, T factor);

template <typename T>
Var<T> reshape(Tape<T>& tape, const Var<T>& a, Shape shape);

// Exact GELU, x * Phi(x).
template <typename T>
Var<T> gelu(Tape<T>& tape, const Var<T>& a);

struct Conv2dOptions {
  std::size_t stride = 1;
  std::size_t padding = 0;
  bool depthwise = false;
};

inline std::size_t conv_out_extent(std::size_t in, std::size_t kernel,
                                   std::size_t stride, std::size_t padding) {
  if (stride == 0 || in + 2 * padding < kernel) {
    throw DimensionError("convolution produces a non-positive output extent");
  }
  return (in + 2 * padding - kernel) / stride + 1;
}

// x[B,H,W,Cin]; w[kh,kw,Cin,Cout], or w[kh,kw,1,C] when depthwise.
template <typename T>
Var<T> conv2d(Tape<T>& tape, const Var<T>& x, const Var<T>& w, const Var<T>& bias,
              const Conv2dOptions& options);

// Per-channel standardization over every axis but the last. `running_mean` and
// `running_var` are updated in place while training and used otherwise.
template <typename T>
struct BatchNormState {
  Tensor<T>* running_mean = nullptr;
  Tensor<T>* running_var = nullptr;
  T momentum = T(0.1);
  T eps = T(1e-5);
};

template <typename T>
Var<T> batch_norm(Tape<T>& tape, const Var<T>& x, const Var<T>& gamma,
                  const Var<T>& beta, const BatchNormState<T>& state);

// [B,H,W,C] -> [B,C]
template <typename T>
Var<T> global_avg_pool(Tape<T>& tape, const Var<T>& x);

// Concatenates rank-2 inputs with equal row counts along columns.
template <typename T>
Var<T> concat_columns(Tape<T>& tape, const std::vector<Var<T>>& parts);

// out[i] = max_j (x[index[i*J + j]] - x[i]) elementwise over columns. The
// gradient goes to the argmax row (lowest j on ties) and to x[i].
template <typename T>
Var<T> max_relative_gather(Tape<T>& tape, const Var<T>& x,
                           const std::vector<std::size_t>& index, std::size_t per_row);

// Same as above, but the candidates are rows of a constant `set`; only x[i]
// receives gradient.
template <typename T>
Var<T> max_relative_to_set(Tape<T>& tape, const Var<T>& x, const Tensor<T>& set,
                           const std::vector<std::size_t>& index, std::size_t per_row);

template <typename T>
Var<T> sum(Tape<T>& tape, const Var<T>& a);

// sum(a * weights) with a constant weight tensor of equal shape.
template <typename T>
Var<T> weighted_sum(Tape<T>& tape, const Var<T>& a, const Tensor<T>& weights);

// 0.5 * sum(a^2)
template <typename T>
Var<T> half_sum_squares(Tape<T>& tape, const Var<T>& a);

// Mean binary cross-entropy with logits over every element.
template <typename T>
Var<T> bce_with_logits(Tape<T>& tape, const Var<T>& logits, const Tensor<T>& targets);

// Softmax cross-entropy averaged over rows; targets may be soft.
template <typename T>
Var<T> softmax_cross_entropy(Tape<T>& tape, const Var<T>& logits,
                             const Tensor<T>& targets);

}  // namespace lhgnn::ops

#endif  // LHGNN_OPS_HPP_
