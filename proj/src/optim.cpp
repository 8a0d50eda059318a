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

#include "lhgnn/optim.hpp"

#include <cmath>

namespace lhgnn {

template <typename T>
void AdamW<T>::step(ParamStore<T>& params, const GradRecord<T>& grads) {
  for (const auto& entry : params.entries()) {
    if (!entry.requires_grad) continue;
    auto it = grads.find(entry.name);
    if (it == grads.end()) throw StateError("missing gradient for " + entry.name);
    if (it->second.shape() != entry.value.shape()) {
      throw DimensionError("gradient shape mismatch for " + entry.name);
    }
    if (!it->second.all_finite()) {
      throw NumericError("non-finite gradient for " + entry.name + "; step aborted");
    }
  }
  ++steps_;
  const double b1 = config_.beta1, b2 = config_.beta2;
  const double correction1 = 1.0 - std::pow(b1, double(steps_));
  const double correction2 = 1.0 - std::pow(b2, double(steps_));
  for (auto& entry : params.entries()) {
    if (!entry.requires_grad) continue;
    const Tensor<T>& g = grads.at(entry.name);
    auto [it, inserted] = moments_.try_emplace(entry.name);
    Moments& mom = it->second;
    if (inserted) {
      mom.first = Tensor<T>(entry.value.shape());
      mom.second = Tensor<T>(entry.value.shape());
    }
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double gi = double(g[i]);
      const double m = b1 * double(mom.first[i]) + (1.0 - b1) * gi;
      const double v = b2 * double(mom.second[i]) + (1.0 - b2) * gi * gi;
      mom.first[i] = T(m);
      mom.second[i] = T(v);
      const double m_hat = m / correction1, v_hat = v / correction2;
      const double theta = double(entry.value[i]);
      entry.value[i] = T(theta - config_.lr * (m_hat / (std::sqrt(v_hat) + config_.eps) +
                                               config_.weight_decay * theta));
    }
  }
}

template class AdamW<float>;
template class AdamW<double>;

}  // namespace lhgnn
