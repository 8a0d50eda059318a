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

#ifndef LHGNN_TRAINER_HPP_
#define LHGNN_TRAINER_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lhgnn/config.hpp"
#include "lhgnn/dataset.hpp"
#include "lhgnn/model.hpp"
#include "lhgnn/optim.hpp"

namespace lhgnn {

// One line of the metric log:
//   {"epoch", "split", "loss", "mAP" | "accuracy", "wall_time_s"}
struct EpochRecord {
  std::size_t epoch = 0;
  std::string split;
  double loss = 0.0;
  std::string metric_name;
  double metric = 0.0;
  double wall_time_s = 0.0;

  nlohmann::ordered_json to_json() const;
};

struct Batch {
  Tensor<float> inputs;   // [B, frames, bins]
  Tensor<float> targets;  // [B, classes]
};

Batch make_batch(const Dataset& data, std::span<const std::size_t> indices);

struct EvalResult {
  double loss = 0.0;
  double metric = 0.0;
  Tensor<float> scores;  // logits, [samples, classes]
};

// Inference-mode pass over `data` (running normalization statistics).
EvalResult evaluate(Model<float>& model, const Dataset& data, Task task, std::size_t batch_size);

std::string metric_name(Task task);

// Shuffle -> augment -> forward -> loss -> backward -> AdamW, one epoch at a
// time. Batches are assembled on a worker thread; each batch's randomness is
// seeded from (seed, epoch, batch index), so results do not depend on thread
// timing.
class Trainer {
 public:
  Trainer(RunConfig config, std::uint64_t seed);

  // Runs every epoch. When output_dir is non-empty, appends to
  // <output_dir>/metrics.jsonl and writes <output_dir>/epoch_NNN.ckpt.
  std::vector<EpochRecord> fit(const Dataset& train, const Dataset* eval);

  // One optimization step; returns the batch loss.
  double train_step(const Batch& batch);

  Model<float>& model() { return model_; }
  const RunConfig& config() const { return config_; }
  const std::vector<std::string>& checkpoints() const { return checkpoints_; }

 private:
  Batch augmented_batch(const Dataset& train, std::span<const std::size_t> indices,
                        std::size_t epoch, std::size_t batch_index) const;

  RunConfig config_;
  std::uint64_t seed_;
  Model<float> model_;
  AdamW<float> optimizer_;
  std::vector<std::string> checkpoints_;
};

struct TrainResult {
  std::vector<EpochRecord> log;
  std::vector<std::string> checkpoints;
};

// Loads the train and eval splits named by `config` (or generates the
// synthetic set) and runs Trainer::fit.
TrainResult run_training(const RunConfig& config, std::uint64_t seed);

// Train/eval datasets as run_training would build them.
Dataset load_training_split(const RunConfig& config, const std::string& split,
                            std::uint64_t seed);

}  // namespace lhgnn

#endif  // LHGNN_TRAINER_HPP_
