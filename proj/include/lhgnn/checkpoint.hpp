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

#ifndef LHGNN_CHECKPOINT_HPP_
#define LHGNN_CHECKPOINT_HPP_

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lhgnn/config.hpp"
#include "lhgnn/param_store.hpp"

namespace lhgnn {

// On-disk layout:
//   u64 LE header_size
//   header: JSON {"version", "config", "meta", "tensors": {name: {"shape",
//           "offset", "trainable"}}} padded with spaces so the payload starts
//           on a 64-byte boundary
//   payload: f32 LE tensors, concatenated in directory order; offsets are
//            bytes from the start of the payload
struct Checkpoint {
  ModelConfig config;
  ParamStore<float> params;
  nlohmann::ordered_json meta = nlohmann::ordered_json::object();
};

inline constexpr int kCheckpointVersion = 1;

void save_checkpoint(const std::string& path, const ModelConfig& config,
                     const ParamStore<float>& params,
                     const nlohmann::ordered_json& meta = nlohmann::ordered_json::object());

Checkpoint load_checkpoint(const std::string& path);

// Per-tensor convex combination (running statistics included). Weights must
// be non-negative and sum to 1; directories must match exactly.
ParamStore<float> average_params(const std::vector<const ParamStore<float>*>& stores,
                                 const std::vector<double>& weights);

// Uniform weights when `weights` is empty.
Checkpoint average_checkpoints(const std::vector<std::string>& paths,
                               std::vector<double> weights = {});

}  // namespace lhgnn

#endif  // LHGNN_CHECKPOINT_HPP_
