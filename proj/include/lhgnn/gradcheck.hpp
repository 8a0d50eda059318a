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

#ifndef LHGNN_GRADCHECK_HPP_
#define LHGNN_GRADCHECK_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "lhgnn/config.hpp"

namespace lhgnn {

struct GradCheckOptions {
  std::size_t batch = 2;
  std::uint64_t seed = 0;
  // Step is epsilon * (1 + |theta|).
  double epsilon = 1e-6;
  // Denominator floor for the relative error.
  double floor = 1e-6;
  // 0 checks every entry; otherwise an evenly strided subset per tensor.
  std::size_t max_entries_per_tensor = 0;
};

struct TensorGradReport {
  std::string name;
  std::size_t checked = 0;
  double max_rel_error = 0.0;
  std::size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
};

struct GradCheckReport {
  std::vector<TensorGradReport> tensors;
  double max_rel_error = 0.0;
  std::size_t checked = 0;
  double seconds = 0.0;
};

// |a - n| / max(|a|, |n|, floor)
double relative_error(double analytic, double numeric, double floor);

// End-to-end check of the 64-bit model: BCE loss on a random batch, graph
// selections recorded on the first pass and replayed for every perturbation.
GradCheckReport gradcheck_model(const ModelConfig& config, const GradCheckOptions& options);

}  // namespace lhgnn

#endif  // LHGNN_GRADCHECK_HPP_
