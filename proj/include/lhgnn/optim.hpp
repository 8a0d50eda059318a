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

#ifndef LHGNN_OPTIM_HPP_
#define LHGNN_OPTIM_HPP_

#include <cstddef>
#include <map>
#include <string>

#include "lhgnn/config.hpp"
#include "lhgnn/param_store.hpp"

namespace lhgnn {

// AdamW with decoupled weight decay:
//   theta <- theta - lr * (m_hat / (sqrt(v_hat) + eps) + wd * theta)
template <typename T>
class AdamW {
 public:
  struct Moments {
    Tensor<T> first;
    Tensor<T> second;
  };

  explicit AdamW(OptimizerConfig config) : config_(config) {}

  // Every requires-grad entry needs a gradient. Non-finite gradients abort the
  // step before any parameter is touched.
  void step(ParamStore<T>& params, const GradRecord<T>& grads);

  void set_lr(double lr) { config_.lr = lr; }
  double lr() const { return config_.lr; }
  std::size_t steps() const { return steps_; }
  const std::map<std::string, Moments>& moments() const { return moments_; }

 private:
  OptimizerConfig config_;
  std::size_t steps_ = 0;
  std::map<std::string, Moments> moments_;
};

extern template class AdamW<float>;
extern template class AdamW<double>;

}  // namespace lhgnn

#endif  // LHGNN_OPTIM_HPP_
