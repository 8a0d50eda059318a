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

#ifndef LHGNN_METRICS_HPP_
#define LHGNN_METRICS_HPP_

#include <span>

#include "lhgnn/tensor.hpp"

namespace lhgnn {

// Average precision of one class: the mean, over positives, of the precision
// at each positive's rank. Ranks come from a stable descending sort, so tied
// scores keep their input order. Targets >= 0.5 count as positive. Returns a
// negative value when the class has no positives.
template <typename T>
double average_precision(std::span<const T> scores, std::span<const T> targets);

// Macro average of per-class AP over classes that have at least one positive.
// scores, targets: [samples, classes]. Throws MetricError if no class has one.
template <typename T>
double mean_average_precision(const Tensor<T>& scores, const Tensor<T>& targets);

// Fraction of rows whose score argmax equals the target argmax (lowest index
// on ties for both).
template <typename T>
double accuracy(const Tensor<T>& scores, const Tensor<T>& targets);

}  // namespace lhgnn

#endif  // LHGNN_METRICS_HPP_
