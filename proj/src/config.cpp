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

#include "lhgnn/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "lhgnn/ops.hpp"

namespace lhgnn {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

constexpr std::size_t kStemStrides[] = {2, 1, 2, 1};

void reject_unknown(const json& j, const std::set<std::string>& allowed,
                    const std::string& section) {
  if (!j.is_object()) throw ConfigError(section + " must be a JSON object");
  for (const auto& item : j.items()) {
    if (!allowed.count(item.key())) {
      throw ConfigError("unknown key '" + item.key() + "' in " + section);
    }
  }
}

template <typename V>
void read(const json& j, const char* key, V& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<V>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

std::string clustering_name(ClusteringMethod m) {
  return m == ClusteringMethod::kKMeans ? "kmeans" : "fcm";
}

ClusteringMethod clustering_from_string(const std::string& name) {
  if (name == "fcm") return ClusteringMethod::kFuzzyCMeans;
  if (name == "kmeans") return ClusteringMethod::kKMeans;
  throw ConfigError("unknown clustering method: " + name);
}

}  // namespace

ModelConfig ModelConfig::reference(std::size_t num_classes) {
  ModelConfig c;
  c.num_classes = num_classes;
  return c;
}

ModelConfig ModelConfig::tiny(std::size_t num_classes) {
  ModelConfig c;
  c.channels = {8, 16, 32, 64};
  c.depths = {1, 1, 1, 1};
  c.stem_channels = {4, 4, 8, 8};
  c.k = 3;
  c.top_k = 2;
  c.num_centroids = 4;
  c.head_hidden = 32;
  c.num_classes = num_classes;
  c.input_frames = 64;
  c.input_bins = 16;
  c.strict_geometry = false;
  return c;
}

std::vector<StageGeometry> stage_geometry(const ModelConfig& config) {
  std::size_t h = config.input_frames, w = config.input_bins;
  try {
    for (std::size_t s : kStemStrides) {
      h = ops::conv_out_extent(h, 3, s, 1);
      w = ops::conv_out_extent(w, 3, s, 1);
    }
  } catch (const DimensionError& e) {
    throw ConfigError(std::string("input too small for the stem: ") + e.what());
  }
  std::vector<StageGeometry> out;
  for (std::size_t t = 0; t < config.channels.size(); ++t) {
    if (t > 0) {
      if (config.strict_geometry && (h % 2 || w % 2)) {
        throw ConfigError("stage " + std::to_string(t) + " input " + std::to_string(h) + "x" +
                          std::to_string(w) + " has an odd extent; downsampling needs even extents");
      }
      h = ops::conv_out_extent(h, 3, 2, 1);
      w = ops::conv_out_extent(w, 3, 2, 1);
    }
    StageGeometry g;
    g.height = h;
    g.width = w;
    g.channels = config.channels[t];
    const std::size_t n = g.nodes();
    if (config.strict_geometry) {
      if (uses_local(config.kernel) && config.k >= n) {
        throw ConfigError("k=" + std::to_string(config.k) + " must be below the node count " +
                          std::to_string(n) + " of stage " + std::to_string(t + 1));
      }
      if (uses_higher(config.kernel) && config.num_centroids > n) {
        throw ConfigError("P=" + std::to_string(config.num_centroids) +
                          " exceeds the node count of stage " + std::to_string(t + 1));
      }
      g.k = config.k;
      g.num_centroids = config.num_centroids;
      g.top_k = config.top_k;
    } else {
      g.k = std::min(config.k, n - 1);
      g.num_centroids = std::min(config.num_centroids, n);
      g.top_k = std::min(config.top_k, g.num_centroids);
      if (uses_local(config.kernel) && g.k == 0) {
        throw ConfigError("stage " + std::to_string(t + 1) + " has a single node; no neighbours");
      }
    }
    out.push_back(g);
  }
  return out;
}

void ModelConfig::validate() const {
  if (channels.size() != 4 || depths.size() != 4) {
    throw ConfigError("channels and depths must each list four stages");
  }
  if (stem_channels.size() != 4) throw ConfigError("stem_channels must list four convolutions");
  if (stem_channels.back() != channels.front()) {
    throw ConfigError("last stem width must equal the stage-1 width");
  }
  for (auto v : channels) if (v == 0) throw ConfigError("channel counts must be positive");
  for (auto v : stem_channels) if (v == 0) throw ConfigError("stem widths must be positive");
  for (auto v : depths) if (v == 0) throw ConfigError("stage depths must be positive");
  if (k == 0) throw ConfigError("k must be positive");
  if (num_centroids == 0 || top_k == 0 || top_k > num_centroids) {
    throw ConfigError("need 1 <= K <= P");
  }
  if (!(fuzziness > 1.0)) throw ConfigError("fuzziness m must exceed 1");
  if (cluster_iterations == 0) throw ConfigError("cluster_iterations must be >= 1");
  if (ffn_expansion == 0 || head_hidden == 0 || num_classes == 0) {
    throw ConfigError("ffn_expansion, head_hidden and num_classes must be positive");
  }
  stage_geometry(*this);
}

void RunConfig::validate() const {
  model.validate();
  if (train.batch_size == 0) throw ConfigError("batch_size must be positive");
  if (!(train.norm_std > 0.0)) throw ConfigError("norm_std must be positive");
  if (optimizer.lr < 0.0) throw ConfigError("lr must be non-negative");
  if (augment.mixup && !(augment.mixup_alpha > 0.0)) {
    throw ConfigError("mixup_alpha must be positive");
  }
  if (augment.spec_augment &&
      (augment.time_mask > model.input_frames || augment.freq_mask > model.input_bins)) {
    throw ConfigError("SpecAugment masks must fit inside the input");
  }
  if (train.synthetic_samples == 0 && train.manifest.empty()) {
    throw ConfigError("train.manifest is required unless synthetic_samples > 0");
  }
}

std::string to_string(Task task) {
  return task == Task::kMultiClass ? "multiclass" : "multilabel";
}

Task task_from_string(const std::string& name) {
  if (name == "multilabel") return Task::kMultiLabel;
  if (name == "multiclass") return Task::kMultiClass;
  throw ConfigError("unknown task: " + name);
}

ordered_json to_json(const ModelConfig& c) {
  ordered_json j;
  j["channels"] = c.channels;
  j["depths"] = c.depths;
  j["stem_channels"] = c.stem_channels;
  j["k"] = c.k;
  j["top_k"] = c.top_k;
  j["num_centroids"] = c.num_centroids;
  j["fuzziness"] = c.fuzziness;
  j["cluster_iterations"] = c.cluster_iterations;
  j["ffn_expansion"] = c.ffn_expansion;
  j["num_classes"] = c.num_classes;
  j["head_hidden"] = c.head_hidden;
  j["input_frames"] = c.input_frames;
  j["input_bins"] = c.input_bins;
  j["kernel"] = to_string(c.kernel);
  j["clustering"] = clustering_name(c.clustering);
  j["strict_geometry"] = c.strict_geometry;
  return j;
}

ModelConfig model_config_from_json(const json& j) {
  reject_unknown(j,
                 {"channels", "depths", "stem_channels", "k", "top_k", "num_centroids",
                  "fuzziness", "cluster_iterations", "ffn_expansion", "num_classes",
                  "head_hidden", "input_frames", "input_bins", "kernel", "clustering",
                  "strict_geometry", "preset"},
                 "model");
  ModelConfig c;
  if (j.contains("preset")) {
    const std::string preset = j.at("preset").get<std::string>();
    if (preset == "tiny") {
      c = ModelConfig::tiny();
    } else if (preset != "reference") {
      throw ConfigError("unknown model preset: " + preset);
    }
  }
  read(j, "channels", c.channels);
  read(j, "depths", c.depths);
  read(j, "stem_channels", c.stem_channels);
  read(j, "k", c.k);
  read(j, "top_k", c.top_k);
  read(j, "num_centroids", c.num_centroids);
  read(j, "fuzziness", c.fuzziness);
  read(j, "cluster_iterations", c.cluster_iterations);
  read(j, "ffn_expansion", c.ffn_expansion);
  read(j, "num_classes", c.num_classes);
  read(j, "head_hidden", c.head_hidden);
  read(j, "input_frames", c.input_frames);
  read(j, "input_bins", c.input_bins);
  read(j, "strict_geometry", c.strict_geometry);
  if (j.contains("kernel")) {
    try {
      c.kernel = kernel_variant_from_string(j.at("kernel").get<std::string>());
    } catch (const ParameterError& e) {
      throw ConfigError(e.what());
    }
  }
  if (j.contains("clustering")) c.clustering = clustering_from_string(j.at("clustering").get<std::string>());
  return c;
}

ordered_json to_json(const RunConfig& c) {
  ordered_json j;
  j["model"] = to_json(c.model);
  j["augment"] = {{"mixup", c.augment.mixup},
                  {"mixup_alpha", c.augment.mixup_alpha},
                  {"spec_augment", c.augment.spec_augment},
                  {"time_mask", c.augment.time_mask},
                  {"freq_mask", c.augment.freq_mask}};
  j["optimizer"] = {{"lr", c.optimizer.lr},
                    {"beta1", c.optimizer.beta1},
                    {"beta2", c.optimizer.beta2},
                    {"eps", c.optimizer.eps},
                    {"weight_decay", c.optimizer.weight_decay},
                    {"cosine", c.optimizer.cosine}};
  j["train"] = {{"manifest", c.train.manifest},
                {"output_dir", c.train.output_dir},
                {"epochs", c.train.epochs},
                {"batch_size", c.train.batch_size},
                {"task", to_string(c.train.task)},
                {"norm_mean", c.train.norm_mean},
                {"norm_std", c.train.norm_std},
                {"synthetic_samples", c.train.synthetic_samples},
                {"eval_split", c.train.eval_split},
                {"record_wall_time", c.train.record_wall_time},
                {"queue_capacity", c.train.queue_capacity}};
  return j;
}

RunConfig run_config_from_json(const json& j) {
  reject_unknown(j, {"model", "augment", "optimizer", "train"}, "config");
  RunConfig c;
  if (j.contains("model")) c.model = model_config_from_json(j.at("model"));
  if (j.contains("augment")) {
    const auto& a = j.at("augment");
    reject_unknown(a, {"mixup", "mixup_alpha", "spec_augment", "time_mask", "freq_mask"},
                   "augment");
    read(a, "mixup", c.augment.mixup);
    read(a, "mixup_alpha", c.augment.mixup_alpha);
    read(a, "spec_augment", c.augment.spec_augment);
    read(a, "time_mask", c.augment.time_mask);
    read(a, "freq_mask", c.augment.freq_mask);
  }
  if (j.contains("optimizer")) {
    const auto& o = j.at("optimizer");
    reject_unknown(o, {"lr", "beta1", "beta2", "eps", "weight_decay", "cosine"}, "optimizer");
    read(o, "lr", c.optimizer.lr);
    read(o, "beta1", c.optimizer.beta1);
    read(o, "beta2", c.optimizer.beta2);
    read(o, "eps", c.optimizer.eps);
    read(o, "weight_decay", c.optimizer.weight_decay);
    read(o, "cosine", c.optimizer.cosine);
  }
  if (j.contains("train")) {
    const auto& t = j.at("train");
    reject_unknown(t,
                   {"manifest", "output_dir", "epochs", "batch_size", "task", "norm_mean",
                    "norm_std", "synthetic_samples", "eval_split", "record_wall_time",
                    "queue_capacity"},
                   "train");
    read(t, "manifest", c.train.manifest);
    read(t, "output_dir", c.train.output_dir);
    read(t, "epochs", c.train.epochs);
    read(t, "batch_size", c.train.batch_size);
    if (t.contains("task")) c.train.task = task_from_string(t.at("task").get<std::string>());
    read(t, "norm_mean", c.train.norm_mean);
    read(t, "norm_std", c.train.norm_std);
    read(t, "synthetic_samples", c.train.synthetic_samples);
    read(t, "eval_split", c.train.eval_split);
    read(t, "record_wall_time", c.train.record_wall_time);
    read(t, "queue_capacity", c.train.queue_capacity);
  }
  return c;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("config is not valid JSON: " + std::string(e.what()));
  }
  RunConfig c = run_config_from_json(j);
  c.validate();
  return c;
}

}  // namespace lhgnn
