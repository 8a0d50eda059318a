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

#include "lhgnn/trainer.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <numeric>
#include <random>
#include <thread>

#include "lhgnn/augment.hpp"
#include "lhgnn/bounded_queue.hpp"
#include "lhgnn/checkpoint.hpp"
#include "lhgnn/metrics.hpp"
#include "lhgnn/ops.hpp"

namespace lhgnn {
namespace {

constexpr std::uint64_t kShuffleStream = 0x5348554646ULL;
constexpr std::uint64_t kAugmentStream = 0x4155474dULL;

std::mt19937_64 stream_rng(std::uint64_t seed, std::uint64_t a, std::uint64_t b,
                           std::uint64_t stream) {
  std::seed_seq seq{std::uint32_t(seed), std::uint32_t(seed >> 32), std::uint32_t(a),
                    std::uint32_t(a >> 32), std::uint32_t(b), std::uint32_t(stream)};
  return std::mt19937_64(seq);
}

Var<float> task_loss(Tape<float>& tape, const Var<float>& logits, const Tensor<float>& targets,
                     Task task) {
  return task == Task::kMultiClass ? ops::softmax_cross_entropy(tape, logits, targets)
                                   : ops::bce_with_logits(tape, logits, targets);
}

double task_metric(const Tensor<float>& scores, const Tensor<float>& targets, Task task) {
  return task == Task::kMultiClass ? accuracy(scores, targets)
                                   : mean_average_precision(scores, targets);
}

}  // namespace

nlohmann::ordered_json EpochRecord::to_json() const {
  nlohmann::ordered_json j;
  j["epoch"] = epoch;
  j["split"] = split;
  j["loss"] = loss;
  j[metric_name] = metric;
  j["wall_time_s"] = wall_time_s;
  return j;
}

std::string metric_name(Task task) {
  return task == Task::kMultiClass ? "accuracy" : "mAP";
}

Batch make_batch(const Dataset& data, std::span<const std::size_t> indices) {
  if (indices.empty()) throw ParameterError("empty batch");
  const auto& first = data.samples.at(indices.front()).features;
  const std::size_t frames = first.dim(0), bins = first.dim(1);
  Batch batch{Tensor<float>({indices.size(), frames, bins}),
              Tensor<float>({indices.size(), data.num_classes})};
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const Sample& s = data.samples.at(indices[i]);
    if (s.features.shape() != first.shape()) throw DimensionError("ragged batch");
    std::copy(s.features.data().begin(), s.features.data().end(), batch.inputs.row(i));
    std::copy(s.target.begin(), s.target.end(), batch.targets.row(i));
  }
  return batch;
}

EvalResult evaluate(Model<float>& model, const Dataset& data, Task task, std::size_t batch_size) {
  if (data.empty()) throw ConfigError("cannot evaluate an empty split");
  const std::size_t n = data.size(), classes = data.num_classes;
  EvalResult result;
  result.scores = Tensor<float>({n, classes});
  Tensor<float> targets({n, classes});
  double loss_total = 0.0;
  std::vector<std::size_t> indices(n);
  std::iota(indices.begin(), indices.end(), std::size_t{0});
  for (std::size_t start = 0; start < n; start += batch_size) {
    const std::size_t count = std::min(batch_size, n - start);
    const Batch batch = make_batch(data, std::span(indices).subspan(start, count));
    Tape<float> tape(Tape<float>::Mode::kInference);
    Var<float> logits = model.forward(tape, batch.inputs);
    loss_total += double(task_loss(tape, logits, batch.targets, task)->value[0]) * double(count);
    std::copy(logits->value.data().begin(), logits->value.data().end(), result.scores.row(start));
    std::copy(batch.targets.data().begin(), batch.targets.data().end(), targets.row(start));
  }
  result.loss = loss_total / double(n);
  result.metric = task_metric(result.scores, targets, task);
  return result;
}

Trainer::Trainer(RunConfig config, std::uint64_t seed)
    : config_(std::move(config)),
      seed_(seed),
      model_(config_.model, seed),
      optimizer_(config_.optimizer) {}

Batch Trainer::augmented_batch(const Dataset& train, std::span<const std::size_t> indices,
                               std::size_t epoch, std::size_t batch_index) const {
  Batch batch = make_batch(train, indices);
  const auto& aug = config_.augment;
  if (!aug.mixup && !aug.spec_augment) return batch;
  std::mt19937_64 rng = stream_rng(seed_, epoch, batch_index, kAugmentStream);
  const std::size_t frames = batch.inputs.dim(1), bins = batch.inputs.dim(2);
  for (std::size_t i = 0; i < indices.size(); ++i) {
    Sample s = train.samples[indices[i]];
    if (aug.mixup) {
      const std::size_t partner =
          std::uniform_int_distribution<std::size_t>(0, train.size() - 1)(rng);
      s = mixup(s, train.samples[partner], sample_mixup_lambda(rng, aug.mixup_alpha));
    }
    if (aug.spec_augment) spec_augment(s.features, aug, rng);
    std::copy(s.features.data().begin(), s.features.data().end(),
              batch.inputs.data().begin() + std::ptrdiff_t(i * frames * bins));
    std::copy(s.target.begin(), s.target.end(), batch.targets.row(i));
  }
  return batch;
}

double Trainer::train_step(const Batch& batch) {
  Tape<float> tape(Tape<float>::Mode::kTraining);
  Var<float> logits = model_.forward(tape, batch.inputs);
  Var<float> loss = task_loss(tape, logits, batch.targets, config_.train.task);
  tape.backward(loss);
  optimizer_.step(model_.params(), tape.gradients(model_.params()));
  return double(loss->value[0]);
}

std::vector<EpochRecord> Trainer::fit(const Dataset& train, const Dataset* eval) {
  if (train.empty()) throw ConfigError("training split is empty");
  if (eval && eval->empty()) throw ConfigError("evaluation split is empty");
  const auto& tc = config_.train;
  std::ofstream log_file;
  if (!tc.output_dir.empty()) {
    std::filesystem::create_directories(tc.output_dir);
    log_file.open(std::filesystem::path(tc.output_dir) / "metrics.jsonl");
    if (!log_file) throw ConfigError("cannot write metric log in " + tc.output_dir);
  }
  const auto started = std::chrono::steady_clock::now();
  auto elapsed = [&]() {
    if (!tc.record_wall_time) return 0.0;
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  };
  const std::string name = metric_name(tc.task);
  std::vector<EpochRecord> log;
  auto emit = [&](EpochRecord rec) {
    if (log_file) log_file << rec.to_json().dump() << '\n' << std::flush;
    log.push_back(std::move(rec));
  };

  for (std::size_t epoch = 0; epoch < tc.epochs; ++epoch) {
    if (config_.optimizer.cosine && tc.epochs > 0) {
      optimizer_.set_lr(0.5 * config_.optimizer.lr *
                        (1.0 + std::cos(std::numbers::pi * double(epoch) / double(tc.epochs))));
    }
    std::vector<std::size_t> order(train.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 shuffle_rng = stream_rng(seed_, epoch, 0, kShuffleStream);
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    const std::size_t num_batches = (order.size() + tc.batch_size - 1) / tc.batch_size;

    BoundedQueue<Batch> queue(tc.queue_capacity);
    std::exception_ptr producer_error;
    std::thread producer([&]() {
      try {
        for (std::size_t b = 0; b < num_batches; ++b) {
          const std::size_t start = b * tc.batch_size;
          const std::size_t count = std::min(tc.batch_size, order.size() - start);
          if (!queue.push(augmented_batch(train, std::span(order).subspan(start, count), epoch, b))) {
            break;
          }
        }
      } catch (...) {
        producer_error = std::current_exception();
      }
      queue.close();
    });

    double loss_total = 0.0;
    std::size_t seen = 0;
    try {
      while (auto batch = queue.pop()) {
        const std::size_t count = batch->inputs.dim(0);
        loss_total += train_step(*batch) * double(count);
        seen += count;
      }
    } catch (...) {
      queue.close();
      producer.join();
      throw;
    }
    producer.join();
    if (producer_error) std::rethrow_exception(producer_error);

    const EvalResult train_eval = evaluate(model_, train, tc.task, tc.batch_size);
    emit({epoch, "train", loss_total / double(seen), name, train_eval.metric, elapsed()});
    if (eval) {
      const EvalResult r = evaluate(model_, *eval, tc.task, tc.batch_size);
      emit({epoch, tc.eval_split, r.loss, name, r.metric, elapsed()});
    }
    if (!tc.output_dir.empty()) {
      char file[32];
      std::snprintf(file, sizeof(file), "epoch_%03zu.ckpt", epoch);
      const std::string path = (std::filesystem::path(tc.output_dir) / file).string();
      nlohmann::ordered_json meta;
      meta["epoch"] = epoch;
      meta["seed"] = seed_;
      meta["steps"] = optimizer_.steps();
      meta["task"] = to_string(tc.task);
      save_checkpoint(path, model_.config(), model_.params(), meta);
      checkpoints_.push_back(path);
    }
  }
  return log;
}

Dataset load_training_split(const RunConfig& config, const std::string& split,
                            std::uint64_t seed) {
  const auto& m = config.model;
  const auto& t = config.train;
  if (t.synthetic_samples > 0) {
    // Synthetic runs have no held-out split; they are scored on the train set.
    (void)split;
    return make_synthetic_dataset(t.synthetic_samples, m.input_frames, m.input_bins,
                                  m.num_classes, t.task, seed);
  }
  return load_split(read_manifest(t.manifest), split, m.num_classes, m.input_frames,
                    m.input_bins, t.norm_mean, t.norm_std);
}

TrainResult run_training(const RunConfig& config, std::uint64_t seed) {
  config.validate();
  Dataset train = load_training_split(config, "train", seed);
  if (train.empty()) throw ConfigError("manifest has no 'train' entries");
  Dataset eval;
  const bool has_eval = config.train.synthetic_samples == 0 && !config.train.eval_split.empty();
  if (has_eval) {
    eval = load_training_split(config, config.train.eval_split, seed);
    if (eval.empty()) throw ConfigError("manifest has no '" + config.train.eval_split + "' entries");
  }
  Trainer trainer(config, seed);
  TrainResult result;
  result.log = trainer.fit(train, has_eval ? &eval : nullptr);
  result.checkpoints = trainer.checkpoints();
  return result;
}

}  // namespace lhgnn
