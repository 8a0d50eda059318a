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

#ifndef LHGNN_PARAM_STORE_HPP_
#define LHGNN_PARAM_STORE_HPP_

#include <cstddef>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "lhgnn/tensor.hpp"

namespace lhgnn {

template <typename T>
struct ParamEntry {
  std::string name;
  Tensor<T> value;
  bool requires_grad = true;
};

// Named tensors in insertion order. Buffers (running statistics) are stored
// alongside learnable weights with requires_grad = false so that checkpoints
// and averaging see one uniform directory.
template <typename T>
class ParamStore {
 public:
  Tensor<T>& add(const std::string& name, Tensor<T> value,
                 bool requires_grad = true) {
    if (index_.count(name)) {
      throw ParameterError("duplicate parameter name: " + name);
    }
    index_.emplace(name, entries_.size());
    entries_.push_back({name, std::move(value), requires_grad});
    return entries_.back().value;
  }

  bool contains(const std::string& name) const { return index_.count(name) > 0; }

  ParamEntry<T>& entry(const std::string& name) {
    auto it = index_.find(name);
    if (it == index_.end()) throw ParameterError("unknown parameter: " + name);
    return entries_[it->second];
  }
  const ParamEntry<T>& entry(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw ParameterError("unknown parameter: " + name);
    return entries_[it->second];
  }

  Tensor<T>& at(const std::string& name) & { return entry(name).value; }
  const Tensor<T>& at(const std::string& name) const& { return entry(name).value; }
  const Tensor<T>& at(const std::string& name) && = delete;

  std::vector<ParamEntry<T>>& entries() & { return entries_; }
  const std::vector<ParamEntry<T>>& entries() const& { return entries_; }
  const std::vector<ParamEntry<T>>& entries() && = delete;
  std::size_t size() const { return entries_.size(); }

  // Number of scalar values in requires-grad entries.
  std::size_t learnable_count() const {
    std::size_t n = 0;
    for (const auto& e : entries_) {
      if (e.requires_grad) n += e.value.size();
    }
    return n;
  }

  template <typename U>
  ParamStore<U> cast() const {
    ParamStore<U> out;
    for (const auto& e : entries_) {
      out.add(e.name, e.value.template cast<U>(), e.requires_grad);
    }
    return out;
  }

 private:
  std::vector<ParamEntry<T>> entries_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Gradients keyed by parameter name.
template <typename T>
using GradRecord = std::map<std::string, Tensor<T>>;

}  // namespace lhgnn

#endif  // LHGNN_PARAM_STORE_HPP_
