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

#ifndef LHGNN_TESTS_SUPPORT_HPP_
#define LHGNN_TESTS_SUPPORT_HPP_

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "lhgnn/autograd.hpp"
#include "lhgnn/ops.hpp"
#include "lhgnn/tensor.hpp"
#include "oracles/oracles.hpp"

namespace testing {

using lhgnn::Shape;
using lhgnn::Tape;
using lhgnn::Tensor;
using lhgnn::Var;

template <typename T = float>
Tensor<T> random_tensor(const Shape& shape, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  Tensor<T> t(shape);
  for (T& v : t.storage()) v = T(normal(rng));
  return t;
}

template <typename T>
oracle::Matrix to_matrix(const Tensor<T>& t) {
  oracle::Matrix m(t.dim(0), std::vector<double>(t.size() / t.dim(0)));
  for (std::size_t r = 0; r < m.size(); ++r) {
    for (std::size_t c = 0; c < m[r].size(); ++c) m[r][c] = double(t.row(r)[c]);
  }
  return m;
}

using Builder = std::function<Var<double>(Tape<double>&, const std::vector<Var<double>>&)>;

// Builds `fn` on leaves made from `inputs`, reduces its output with a fixed
// random weighting, and compares the analytic gradient of every input entry
// with central differences. Returns the largest relative error.
inline double max_gradient_error(std::vector<Tensor<double>> inputs, const Builder& fn,
                                 std::uint64_t seed = 7, double eps = 1e-4) {
  Tensor<double> weights;
  auto loss_of = [&](Tape<double>& tape, const std::vector<Var<double>>& vars) {
    Var<double> out = fn(tape, vars);
    if (weights.empty()) {
      std::mt19937_64 rng(seed);
      weights = random_tensor<double>(out->value.shape(), rng);
    }
    return lhgnn::ops::weighted_sum(tape, out, weights);
  };
  Tape<double> tape;
  std::vector<Var<double>> vars;
  for (const auto& t : inputs) vars.push_back(tape.leaf(t));
  Var<double> loss = loss_of(tape, vars);
  tape.backward(loss);

  auto evaluate = [&]() {
    Tape<double> t;
    std::vector<Var<double>> v;
    for (const auto& in : inputs) v.push_back(t.leaf(in));
    return loss_of(t, v)->value[0];
  };
  double worst = 0.0;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    std::vector<double*> coords;
    for (double& v : inputs[i].storage()) coords.push_back(&v);
    const auto numeric = oracle::numeric_gradient(evaluate, coords, eps);
    for (std::size_t j = 0; j < numeric.size(); ++j) {
      const double analytic = vars[i]->grad.empty() ? 0.0 : vars[i]->grad[j];
      worst = std::max(worst, oracle::relative_error(analytic, numeric[j]));
    }
  }
  return worst;
}

}  // namespace testing

#endif  // LHGNN_TESTS_SUPPORT_HPP_
