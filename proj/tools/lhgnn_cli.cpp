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

// Command-line front end: feature extraction, dataset statistics, training,
// evaluation, gradient checking and model inspection.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "CLI11.hpp"
#include "lhgnn/audio.hpp"
#include "lhgnn/checkpoint.hpp"
#include "lhgnn/clustering.hpp"
#include "lhgnn/config.hpp"
#include "lhgnn/dataset.hpp"
#include "lhgnn/errors.hpp"
#include "lhgnn/gradcheck.hpp"
#include "lhgnn/model.hpp"
#include "lhgnn/trainer.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::size_t classes_in(const std::vector<lhgnn::ManifestEntry>& entries) {
  std::size_t classes = 0;
  for (const auto& e : entries) {
    for (int label : e.labels) classes = std::max(classes, std::size_t(label) + 1);
  }
  return classes;
}

// A config file is either a full run config or a bare model section.
lhgnn::ModelConfig read_model_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw lhgnn::ConfigError("cannot open config " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw lhgnn::ConfigError(path + ": " + e.what());
  }
  if (j.contains("model")) return lhgnn::run_config_from_json(j).model;
  return lhgnn::model_config_from_json(j);
}

int run_features(const std::string& manifest, const std::string& out_dir, unsigned jobs) {
  const auto entries = lhgnn::read_manifest(manifest);
  fs::create_directories(out_dir);
  lhgnn::MelFrontend frontend;
  std::vector<lhgnn::ManifestEntry> cached(entries.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto worker = [&]() {
    for (std::size_t i = next++; i < entries.size(); i = next++) {
      try {
        const auto mel = frontend.logmel(lhgnn::load_wav(entries[i].path));
        char name[32];
        std::snprintf(name, sizeof(name), "%06zu.lmel", i);
        const fs::path path = fs::absolute(fs::path(out_dir) / name);
        lhgnn::write_feature_cache(path.string(), mel.frames);
        cached[i] = {path.string(), entries[i].labels, entries[i].split};
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < std::max(1u, jobs); ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  const std::string out_manifest = (fs::path(out_dir) / "manifest.jsonl").string();
  lhgnn::write_manifest(out_manifest, cached);
  std::cout << ordered_json{{"clips", entries.size()}, {"manifest", out_manifest}}.dump() << '\n';
  return 0;
}

int run_stats(const std::string& manifest, const std::string& split, std::size_t frames,
              std::size_t bins) {
  const auto entries = lhgnn::read_manifest(manifest);
  const auto data = lhgnn::load_split(entries, split, std::max<std::size_t>(1, classes_in(entries)),
                                      frames, bins);
  if (data.empty()) throw lhgnn::ConfigError("split '" + split + "' is empty");
  const auto stats = lhgnn::compute_stats(data);
  std::cout << ordered_json{{"split", split},
                            {"clips", data.size()},
                            {"values", stats.count},
                            {"mean", stats.mean},
                            {"std", stats.std}}
                   .dump()
            << '\n';
  return 0;
}

int run_train(const std::string& config_path, std::uint64_t seed, const std::string& out) {
  auto config = lhgnn::load_run_config(config_path);
  if (!out.empty()) config.train.output_dir = out;
  const auto result = lhgnn::run_training(config, seed);
  for (const auto& rec : result.log) std::cout << rec.to_json().dump() << '\n';
  return 0;
}

int run_eval(const std::string& ckpt, const std::string& average, const std::string& weights,
             const std::string& config_path, const std::string& split, std::uint64_t seed,
             const std::string& save) {
  lhgnn::Checkpoint checkpoint;
  if (!average.empty()) {
    const auto paths = split_list(average);
    std::vector<double> w;
    for (const auto& s : split_list(weights)) w.push_back(std::stod(s));
    checkpoint = lhgnn::average_checkpoints(paths, w);
  } else if (!ckpt.empty()) {
    checkpoint = lhgnn::load_checkpoint(ckpt);
  } else {
    throw lhgnn::ConfigError("eval needs --ckpt or --average");
  }
  if (!save.empty()) {
    lhgnn::save_checkpoint(save, checkpoint.config, checkpoint.params, checkpoint.meta);
  }
  if (config_path.empty()) {
    std::cout << ordered_json{{"tensors", checkpoint.params.size()},
                              {"parameters", checkpoint.params.learnable_count()}}
                     .dump()
              << '\n';
    return 0;
  }
  auto run = lhgnn::load_run_config(config_path);
  run.model = checkpoint.config;
  const auto data = lhgnn::load_training_split(run, split, seed);
  if (data.empty()) throw lhgnn::ConfigError("split '" + split + "' is empty");
  lhgnn::Model<float> model(checkpoint.config, std::move(checkpoint.params));
  const auto r = lhgnn::evaluate(model, data, run.train.task, run.train.batch_size);
  ordered_json out;
  out["split"] = split;
  out["clips"] = data.size();
  out["loss"] = r.loss;
  out[lhgnn::metric_name(run.train.task)] = r.metric;
  std::cout << out.dump() << '\n';
  return 0;
}

int run_gradcheck(const std::string& scale, std::size_t entries, std::uint64_t seed,
                  double tolerance, double epsilon) {
  if (scale != "tiny") throw lhgnn::ConfigError("gradcheck supports --scale tiny only");
  lhgnn::GradCheckOptions options;
  options.seed = seed;
  options.max_entries_per_tensor = entries;
  options.epsilon = epsilon;
  const auto report = lhgnn::gradcheck_model(lhgnn::ModelConfig::tiny(), options);
  for (const auto& t : report.tensors) {
    std::cout << ordered_json{{"tensor", t.name},
                              {"checked", t.checked},
                              {"max_rel_error", t.max_rel_error},
                              {"analytic", t.worst_analytic},
                              {"numeric", t.worst_numeric}}
                     .dump()
              << '\n';
  }
  const bool ok = report.max_rel_error < tolerance;
  std::cout << ordered_json{{"checked", report.checked},
                            {"max_rel_error", report.max_rel_error},
                            {"seconds", report.seconds},
                            {"pass", ok}}
                   .dump()
            << '\n';
  return ok ? 0 : 1;
}

int run_param_count(const std::string& config_path) {
  const auto config = read_model_config(config_path);
  ordered_json stages = ordered_json::array();
  for (const auto& g : lhgnn::stage_geometry(config)) {
    stages.push_back({{"height", g.height},
                      {"width", g.width},
                      {"nodes", g.nodes()},
                      {"channels", g.channels},
                      {"k", g.k},
                      {"centroids", g.num_centroids},
                      {"top_k", g.top_k}});
  }
  std::size_t total = 0;
  for (const auto& [name, shape] : lhgnn::parameter_layout(config)) {
    if (name.find("running_") == std::string::npos) total += lhgnn::shape_size(shape);
  }
  std::cout << ordered_json{{"parameters", total}, {"stages", stages}}.dump(2) << '\n';
  return 0;
}

int run_cluster_demo(std::size_t nodes, std::size_t dims, std::size_t centroids,
                     std::size_t top_k, const std::string& method, std::uint64_t seed) {
  // Points scattered around `centroids` well separated anchors.
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> noise(0.0f, 0.3f);
  std::uniform_real_distribution<float> anchor(-5.0f, 5.0f);
  lhgnn::Tensor<float> anchors({centroids, dims});
  for (float& v : anchors.storage()) v = anchor(rng);
  lhgnn::Tensor<float> x({nodes, dims});
  for (std::size_t i = 0; i < nodes; ++i) {
    for (std::size_t d = 0; d < dims; ++d) x(i, d) = anchors(i % centroids, d) + noise(rng);
  }
  lhgnn::ClusteringOptions options;
  options.method = method == "kmeans" ? lhgnn::ClusteringMethod::kKMeans
                                      : lhgnn::ClusteringMethod::kFuzzyCMeans;
  if (method != "kmeans" && method != "fcm") throw lhgnn::ConfigError("--method fcm|kmeans");
  options.num_centroids = centroids;
  options.top_k = top_k;
  const auto [state, higher] = lhgnn::cluster_nodes(x, options);
  auto rows = [](const lhgnn::Tensor<float>& t) {
    ordered_json out = ordered_json::array();
    for (std::size_t r = 0; r < t.dim(0); ++r) {
      out.push_back(std::vector<float>(t.row(r), t.row(r) + t.dim(1)));
    }
    return out;
  };
  ordered_json sets = ordered_json::array();
  for (std::size_t i = 0; i < nodes; ++i) {
    const auto ids = higher.of(i);
    sets.push_back(std::vector<std::size_t>(ids.begin(), ids.end()));
  }
  std::cout << ordered_json{{"method", method},
                            {"nodes", rows(x)},
                            {"centroids", rows(state.centroids)},
                            {"memberships", rows(state.memberships)},
                            {"higher_order", sets},
                            {"stale_clusters", state.stale_clusters}}
                   .dump()
            << '\n';
  return 0;
}

int run_synth_data(const std::string& out_dir, std::size_t count, std::size_t classes,
                   const std::string& task, std::uint64_t seed) {
  fs::create_directories(out_dir);
  const auto data = lhgnn::make_synthetic_dataset(count, 1024, 128, classes,
                                                  lhgnn::task_from_string(task), seed);
  std::vector<lhgnn::ManifestEntry> entries;
  for (std::size_t i = 0; i < data.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "%06zu.lmel", i);
    const std::string path = fs::absolute(fs::path(out_dir) / name).string();
    lhgnn::write_feature_cache(path, data.samples[i].features);
    std::vector<int> labels;
    for (std::size_t c = 0; c < classes; ++c) {
      if (data.samples[i].target[c] >= 0.5f) labels.push_back(int(c));
    }
    entries.push_back({path, labels, i % 4 == 3 ? "val" : "train"});
  }
  const std::string manifest = (fs::path(out_dir) / "manifest.jsonl").string();
  lhgnn::write_manifest(manifest, entries);
  std::cout << ordered_json{{"clips", entries.size()}, {"manifest", manifest}}.dump() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LHGNN audio tagging toolkit"};
  app.require_subcommand(1);

  std::string manifest, out_dir, split = "train", eval_split = "val", config_path, ckpt, average, weights, scale,
                                 method = "fcm", task = "multilabel", save;
  std::uint64_t seed = 0;
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
  std::size_t frames = 1024, bins = 128, entries = 0, nodes = 64, dims = 2, centroids = 4,
              top_k = 2, count = 32, classes = 4;
  double tolerance = 1e-3, epsilon = 1e-6;

  auto* features = app.add_subcommand("features", "extract log-mel caches for a manifest");
  features->add_option("--manifest", manifest)->required();
  features->add_option("--out", out_dir)->required();
  features->add_option("--jobs", jobs);

  auto* stats = app.add_subcommand("stats", "dataset-level feature mean and std");
  stats->add_option("--manifest", manifest)->required();
  stats->add_option("--split", split, "split to summarize")->capture_default_str();
  stats->add_option("--frames", frames);
  stats->add_option("--bins", bins);

  auto* train = app.add_subcommand("train", "train a model from a run config");
  train->add_option("--config", config_path)->required();
  train->add_option("--seed", seed);
  train->add_option("--out", out_dir, "override train.output_dir");

  auto* eval = app.add_subcommand("eval", "evaluate a checkpoint or an average of several");
  eval->add_option("--ckpt", ckpt);
  eval->add_option("--average", average, "comma-separated checkpoints");
  eval->add_option("--weights", weights, "comma-separated averaging weights");
  eval->add_option("--config", config_path, "run config naming the data");
  eval->add_option("--split", eval_split, "split to score")->capture_default_str();
  eval->add_option("--seed", seed);
  eval->add_option("--save", save, "write the (averaged) checkpoint here");

  auto* gradcheck = app.add_subcommand("gradcheck", "finite-difference gradient check");
  gradcheck->add_option("--scale", scale)->required();
  gradcheck->add_option("--entries", entries, "entries per tensor, 0 = all");
  gradcheck->add_option("--seed", seed);
  gradcheck->add_option("--tolerance", tolerance);
  gradcheck->add_option("--epsilon", epsilon);

  auto* param_count = app.add_subcommand("param-count", "parameter count and stage geometry");
  param_count->add_option("--config", config_path)->required();

  auto* cluster_demo = app.add_subcommand("cluster-demo", "cluster a toy point cloud");
  cluster_demo->add_option("--nodes", nodes);
  cluster_demo->add_option("--dims", dims);
  cluster_demo->add_option("--centroids", centroids);
  cluster_demo->add_option("--top-k", top_k);
  cluster_demo->add_option("--method", method);
  cluster_demo->add_option("--seed", seed);

  auto* synth = app.add_subcommand("synth-data", "write a synthetic feature-cache dataset");
  synth->add_option("--out", out_dir)->required();
  synth->add_option("--count", count);
  synth->add_option("--classes", classes);
  synth->add_option("--task", task);
  synth->add_option("--seed", seed);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*features) return run_features(manifest, out_dir, jobs);
    if (*stats) return run_stats(manifest, split, frames, bins);
    if (*train) return run_train(config_path, seed, out_dir);
    if (*eval) return run_eval(ckpt, average, weights, config_path, eval_split, seed, save);
    if (*gradcheck) return run_gradcheck(scale, entries, seed, tolerance, epsilon);
    if (*param_count) return run_param_count(config_path);
    if (*cluster_demo) return run_cluster_demo(nodes, dims, centroids, top_k, method, seed);
    if (*synth) return run_synth_data(out_dir, count, classes, task, seed);
  } catch (const std::exception& e) {
    std::cerr << "lhgnn: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
