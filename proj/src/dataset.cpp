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

#include "lhgnn/dataset.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <memory>
#include <random>

#include <nlohmann/json.hpp>

#include "lhgnn/audio.hpp"

namespace lhgnn {
namespace {

namespace fs = std::filesystem;

Tensor<float> fit_frames(const Tensor<float>& features, std::size_t frames, float fill) {
  Tensor<float> out({frames, features.dim(1)}, fill);
  const std::size_t keep = std::min(frames, features.dim(0));
  std::copy(features.data().begin(),
            features.data().begin() + std::ptrdiff_t(keep * features.dim(1)),
            out.data().begin());
  return out;
}

}  // namespace

std::vector<ManifestEntry> read_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open manifest: " + path);
  const fs::path base = fs::path(path).parent_path();
  std::vector<ManifestEntry> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      ManifestEntry e;
      e.path = j.at("path").get<std::string>();
      e.labels = j.at("labels").get<std::vector<int>>();
      e.split = j.at("split").get<std::string>();
      if (e.split != "train" && e.split != "val" && e.split != "test") {
        throw FormatError("split must be train, val or test");
      }
      if (fs::path(e.path).is_relative() && !base.empty()) e.path = (base / e.path).string();
      out.push_back(std::move(e));
    } catch (const nlohmann::json::exception& ex) {
      throw FormatError(path + ":" + std::to_string(line_no) + ": " + ex.what());
    } catch (const FormatError& ex) {
      throw FormatError(path + ":" + std::to_string(line_no) + ": " + ex.what());
    }
  }
  return out;
}

void write_manifest(const std::string& path, const std::vector<ManifestEntry>& entries) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write manifest: " + path);
  for (const auto& e : entries) {
    nlohmann::ordered_json j;
    j["path"] = e.path;
    j["labels"] = e.labels;
    j["split"] = e.split;
    out << j.dump() << '\n';
  }
}

Dataset load_split(const std::vector<ManifestEntry>& entries, const std::string& split,
                   std::size_t num_classes, std::size_t frames, std::size_t bins,
                   double mean, double std) {
  Dataset out;
  out.num_classes = num_classes;
  std::unique_ptr<MelFrontend> frontend;
  const float floor_value = float(std::log(MelOptions{}.log_floor));
  for (const auto& e : entries) {
    if (e.split != split) continue;
    Sample s;
    if (fs::path(e.path).extension() == ".lmel") {
      Tensor<float> cached = read_feature_cache(e.path);
      if (cached.dim(1) != bins) {
        throw FormatError(e.path + ": cached features have " + std::to_string(cached.dim(1)) +
                          " mel bins, model expects " + std::to_string(bins));
      }
      s.features = fit_frames(cached, frames, floor_value);
    } else {
      if (!frontend) {
        MelOptions options;
        options.num_mels = bins;
        options.target_frames = frames;
        frontend = std::make_unique<MelFrontend>(options);
      }
      s.features = frontend->logmel(load_wav(e.path)).frames;
    }
    if (mean != 0.0 || std != 1.0) {
      LogMel wrapped{std::move(s.features), 0};
      s.features = normalize(wrapped, mean, std).frames;
    }
    s.target.assign(num_classes, 0.0f);
    for (int label : e.labels) {
      if (label < 0 || std::size_t(label) >= num_classes) {
        throw FormatError(e.path + ": label " + std::to_string(label) + " outside [0, " +
                          std::to_string(num_classes) + ")");
      }
      s.target[std::size_t(label)] = 1.0f;
    }
    out.samples.push_back(std::move(s));
  }
  return out;
}

Dataset make_synthetic_dataset(std::size_t count, std::size_t frames, std::size_t bins,
                               std::size_t num_classes, Task task, std::uint64_t seed) {
  if (num_classes == 0 || frames == 0 || bins == 0) {
    throw ParameterError("synthetic dataset needs positive extents and classes");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, 0.3);

  struct Blob {
    double t, f, st, sf;
  };
  std::vector<Blob> blobs(num_classes);
  for (auto& b : blobs) {
    b = {unit(rng) * double(frames), unit(rng) * double(bins),
         0.08 * double(frames) * (0.5 + unit(rng)), 0.08 * double(bins) * (0.5 + unit(rng))};
  }

  Dataset out;
  out.num_classes = num_classes;
  for (std::size_t i = 0; i < count; ++i) {
    Sample s;
    s.target.assign(num_classes, 0.0f);
    // Cycling the first label keeps every class populated.
    s.target[i % num_classes] = 1.0f;
    if (task == Task::kMultiLabel && num_classes > 1 && unit(rng) < 0.5) {
      s.target[std::size_t(unit(rng) * double(num_classes)) % num_classes] = 1.0f;
    }
    s.features = Tensor<float>({frames, bins});
    for (std::size_t t = 0; t < frames; ++t) {
      for (std::size_t f = 0; f < bins; ++f) {
        double v = noise(rng);
        for (std::size_t c = 0; c < num_classes; ++c) {
          if (s.target[c] == 0.0f) continue;
          const double dt = (double(t) - blobs[c].t) / blobs[c].st;
          const double df = (double(f) - blobs[c].f) / blobs[c].sf;
          v += 3.0 * std::exp(-0.5 * (dt * dt + df * df));
        }
        s.features(t, f) = float(v);
      }
    }
    out.samples.push_back(std::move(s));
  }
  return out;
}

FeatureStats compute_stats(const Dataset& data) {
  FeatureStats stats;
  double total = 0.0;
  for (const auto& s : data.samples) {
    for (float v : s.features.data()) total += double(v);
    stats.count += s.features.size();
  }
  if (stats.count == 0) throw ParameterError("cannot compute statistics of an empty dataset");
  stats.mean = total / double(stats.count);
  double sq = 0.0;
  for (const auto& s : data.samples) {
    for (float v : s.features.data()) {
      const double d = double(v) - stats.mean;
      sq += d * d;
    }
  }
  stats.std = std::sqrt(sq / double(stats.count));
  return stats;
}

}  // namespace lhgnn
