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

#ifndef LHGNN_CONFIG_HPP_
#define LHGNN_CONFIG_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lhgnn/clustering.hpp"
#include "lhgnn/lhg_kernel.hpp"

namespace lhgnn {

struct ModelConfig {
  std::vector<std::size_t> channels{80, 160, 320, 640};
  std::vector<std::size_t> depths{2, 2, 6, 2};
  std::vector<std::size_t> stem_channels{40, 40, 80, 80};
  std::size_t k = 25;              // neighbours per node
  std::size_t top_k = 10;          // centroids per node
  std::size_t num_centroids = 50;  // per sample, every stage
  double fuzziness = 2.0;
  std::size_t cluster_iterations = 1;
  std::size_t ffn_expansion = 4;
  std::size_t num_classes = 527;
  std::size_t head_hidden = 1024;
  std::size_t input_frames = 1024;
  std::size_t input_bins = 128;
  KernelVariant kernel = KernelVariant::kLocalHigher;
  ClusteringMethod clustering = ClusteringMethod::kFuzzyCMeans;
  // When false, odd extents are allowed and k/P/K are clamped to what each
  // stage can hold. Needed for inputs much smaller than 1024x128.
  bool strict_geometry = true;

  static ModelConfig reference(std::size_t num_classes = 527);
  // channels [8,16,32,64], depths [1,1,1,1], 64x16 input, k=3, K=2, P=4.
  static ModelConfig tiny(std::size_t num_classes = 8);

  // Throws ConfigError on inconsistent fields or infeasible stage geometry.
  void validate() const;
};

struct StageGeometry {
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t channels = 0;
  std::size_t k = 0;
  std::size_t num_centroids = 0;
  std::size_t top_k = 0;

  std::size_t nodes() const { return height * width; }
};

// Spatial extents after the stem and each downsample, with the graph sizes
// actually used at each stage.
std::vector<StageGeometry> stage_geometry(const ModelConfig& config);

struct AugmentConfig {
  bool mixup = true;
  double mixup_alpha = 0.5;
  bool spec_augment = true;
  std::size_t time_mask = 192;
  std::size_t freq_mask = 48;
};

struct OptimizerConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.05;
  bool cosine = false;
};

enum class Task { kMultiLabel, kMultiClass };

struct TrainConfig {
  std::string manifest;
  std::string output_dir = "run";
  std::size_t epochs = 30;
  std::size_t batch_size = 128;
  Task task = Task::kMultiLabel;
  double norm_mean = 0.0;
  double norm_std = 1.0;
  // > 0 replaces the manifest with a generated dataset of this many clips.
  std::size_t synthetic_samples = 0;
  std::string eval_split = "val";
  bool record_wall_time = true;
  std::size_t queue_capacity = 4;
};

struct RunConfig {
  ModelConfig model;
  AugmentConfig augment;
  OptimizerConfig optimizer;
  TrainConfig train;

  void validate() const;
};

nlohmann::ordered_json to_json(const ModelConfig& config);
nlohmann::ordered_json to_json(const RunConfig& config);

// Unknown keys are rejected with ConfigError; missing keys keep defaults.
ModelConfig model_config_from_json(const nlohmann::json& j);
RunConfig run_config_from_json(const nlohmann::json& j);
RunConfig load_run_config(const std::string& path);

std::string to_string(Task task);
Task task_from_string(const std::string& name);

}  // namespace lhgnn

#endif  // LHGNN_CONFIG_HPP_
