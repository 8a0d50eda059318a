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

#ifndef LHGNN_AUTOGRAD_HPP_
#define LHGNN_AUTOGRAD_HPP_

#include <functional>
#include <initializer_list>
#include <memory>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "lhgnn/param_store.hpp"
#include "lhgnn/tensor.hpp"

namespace lhgnn {

template <typename T>
class Tape;

// One value in the recorded computation. `backward` receives the gradient of
// the loss with respect to `value` and accumulates into the parents it
// captured.
template <typename T>
struct Node {
  Tensor<T> value;
  Tensor<T> grad;
  bool requires_grad = false;
  std::function<void(const Tensor<T>&)> backward;
  const Tape<T>* owner = nullptr;

  Tensor<T>& grad_buffer() {
    if (grad.empty()) grad = Tensor<T>(value.shape());
    return grad;
  }
};

template <typename T>
using Var = std::shared_ptr<Node<T>>;

// Reverse-mode record for one forward pass. Nodes are appended in creation
// order, which is a topological order of the graph, so backward is a single
// reverse sweep. The tape is single-writer.
template <typename T>
class Tape {
 public:
  enum class Mode { kTraining, kInference };

  explicit Tape(Mode mode = Mode::kTraining) : mode_(mode) {}
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  bool training() const { return mode_ == Mode::kTraining; }

  Var<T> constant(Tensor<T> value) const {
    auto node = std::make_shared<Node<T>>();
    node->value = std::move(value);
    node->owner = this;
    return node;
  }

  Var<T> leaf(Tensor<T> value, bool requires_grad = true) {
    auto node = constant(std::move(value));
    node->requires_grad = requires_grad && training();
    if (node->requires_grad) nodes_.push_back(node);
    return node;
  }

  // Binds a stored parameter as a leaf. Binding the same name twice returns
  // the same node so gradients accumulate in one place.
  Var<T> param(const ParamStore<T>& store, const std::string& name) {
    if (auto it = bound_.find(name); it != bound_.end()) return it->second;
    const auto& entry = store.entry(name);
    auto node = leaf(entry.value, entry.requires_grad);
    bound_.emplace(name, node);
    return node;
  }

  // Records the output of a primitive. The backward closure is kept only if
  // some parent participates in differentiation.
  Var<T> record(Tensor<T> value, std::initializer_list<Var<T>> parents,
                std::function<void(const Tensor<T>&)> backward) {
    return record(std::move(value), std::vector<Var<T>>(parents),
                  std::move(backward));
  }

  Var<T> record(Tensor<T> value, const std::vector<Var<T>>& parents,
                std::function<void(const Tensor<T>&)> backward) {
    if (!value.all_finite()) {
      throw NumericError("non-finite value produced by primitive with shape " +
                         shape_string(value.shape()));
    }
    auto node = constant(std::move(value));
    bool needs = false;
    for (const auto& p : parents) needs = needs || (p && p->requires_grad);
    if (needs && training()) {
      node->requires_grad = true;
      node->backward = std::move(backward);
      nodes_.push_back(node);
    }
    return node;
  }

  // Seeds d(loss)/d(loss) = 1 and sweeps the tape once.
  void backward(const Var<T>& loss) {
    if (backward_done_) throw StateError("backward already ran on this tape");
    if (!loss || loss->owner != this || !loss->requires_grad || nodes_.empty()) {
      throw StateError("backward called without a recorded forward pass");
    }
    if (loss->value.size() != 1) {
      throw DimensionError("loss must be a scalar, got " +
                           shape_string(loss->value.shape()));
    }
    loss->grad_buffer()[0] = T{1};
    for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) {
      Node<T>& node = **it;
      if (node.backward && !node.grad.empty()) node.backward(node.grad);
    }
    backward_done_ = true;
  }

  // One gradient per requires-grad entry of `store`; entries that never took
  // part in the forward pass get zeros.
  GradRecord<T> gradients(const ParamStore<T>& store) const {
    if (!backward_done_) throw StateError("gradients requested before backward");
    GradRecord<T> out;
    for (const auto& entry : store.entries()) {
      if (!entry.requires_grad) continue;
      auto it = bound_.find(entry.name);
      if (it != bound_.end() && !it->second->grad.empty()) {
        out.emplace(entry.name, it->second->grad);
      } else {
        out.emplace(entry.name, Tensor<T>(entry.value.shape()));
      }
    }
    return out;
  }

 private:
  Mode mode_;
  std::vector<Var<T>> nodes_;
  std::unordered_map<std::string, Var<T>> bound_;
  bool backward_done_ = false;
};

}  // namespace lhgnn

#endif  // LHGNN_AUTOGRAD_HPP_
