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

#ifndef LHGNN_DATASET_HPP_
#define LHGNN_DATASET_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "lhgnn/config.hpp"
#include "lhgnn/tensor.hpp"

namespace lhgnn {

// One line of the JSON-lines manifest:
//   {"path": str, "labels": [int], "split": "train"|"val"|"test"}
struct ManifestEntry {
  std::string path;
  std::vector<int> labels;
  std::string split;
};

// Relative paths are resolved against the manifest's directory.
std::vector<ManifestEntry> read_manifest(const std::string& path);
void write_manifest(const std::string& path, const std::vector<ManifestEntry>& entries);

struct Sample {
  Tensor<float> features;     // [frames, bins]
  std::vector<float> target;  // multi-hot, num_classes
};

struct Dataset {
  std::vector<Sample> samples;
  std::size_t num_classes = 0;

  bool empty() const { return samples.empty(); }
  std::size_t size() const { return samples.size(); }
};

// Loads the entries of `split`. ".lmel" paths are read from the feature cache;
// anything else is decoded as WAV and run through the mel frontend. Features
// are padded/cropped to `frames` and standardized with (mean, std).
Dataset load_split(const std::vector<ManifestEntry>& entries, const std::string& split,
                   std::size_t num_classes, std::size_t frames, std::size_t bins,
                   double mean = 0.0, double std = 1.0);

// Each class owns a fixed time-frequency blob; a clip is the sum of its
// classes' blobs plus Gaussian noise. Multi-label clips carry one or two
// classes, multi-class clips exactly one.
Dataset make_synthetic_dataset(std::size_t count, std::size_t frames, std::size_t bins,
                               std::size_t num_classes, Task task, std::uint64_t seed);

struct FeatureStats {
  double mean = 0.0;
  double std = 1.0;
  std::size_t count = 0;
};

// Two-pass mean and population standard deviation over every feature value.
FeatureStats compute_stats(const Dataset& data);

}  // namespace lhgnn

#endif  // LHGNN_DATASET_HPP_
