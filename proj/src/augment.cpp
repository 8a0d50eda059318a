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

#include "lhgnn/augment.hpp"

#include <algorithm>

namespace lhgnn {

double sample_mixup_lambda(std::mt19937_64& rng, double alpha) {
  if (!(alpha > 0.0)) throw ParameterError("mixup alpha must be positive");
  std::gamma_distribution<double> gamma(alpha, 1.0);
  const double x = gamma(rng), y = gamma(rng);
  if (x + y == 0.0) return 0.5;
  return x / (x + y);
}

Sample mixup(const Sample& a, const Sample& b, double lambda) {
  if (a.features.shape() != b.features.shape() || a.target.size() != b.target.size()) {
    throw DimensionError("mixup needs samples of identical shape");
  }
  if (lambda == 1.0) return a;
  Sample out = a;
  const double mu = 1.0 - lambda;
  for (std::size_t i = 0; i < out.features.size(); ++i) {
    out.features[i] = float(lambda * double(a.features[i]) + mu * double(b.features[i]));
  }
  for (std::size_t i = 0; i < out.target.size(); ++i) {
    out.target[i] = float(lambda * double(a.target[i]) + mu * double(b.target[i]));
  }
  return out;
}

MaskDraw draw_masks(std::mt19937_64& rng, std::size_t frames, std::size_t bins,
                    std::size_t max_time, std::size_t max_freq) {
  if (max_time > frames || max_freq > bins) {
    throw ParameterError("mask width exceeds the spectrogram extent");
  }
  auto uniform = [&](std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(0, hi)(rng);
  };
  MaskDraw d;
  d.time_width = uniform(max_time);
  d.time_start = uniform(frames - d.time_width);
  d.freq_width = uniform(max_freq);
  d.freq_start = uniform(bins - d.freq_width);
  return d;
}

void apply_masks(Tensor<float>& x, const MaskDraw& draw) {
  if (x.rank() != 2) throw DimensionError("masks apply to [frames, bins] matrices");
  const std::size_t frames = x.dim(0), bins = x.dim(1);
  if (draw.time_start + draw.time_width > frames || draw.freq_start + draw.freq_width > bins) {
    throw ParameterError("mask does not fit inside the spectrogram");
  }
  for (std::size_t t = draw.time_start; t < draw.time_start + draw.time_width; ++t) {
    std::fill(x.row(t), x.row(t) + bins, 0.0f);
  }
  for (std::size_t t = 0; t < frames; ++t) {
    float* row = x.row(t);
    std::fill(row + draw.freq_start, row + draw.freq_start + draw.freq_width, 0.0f);
  }
}

MaskDraw spec_augment(Tensor<float>& x, const AugmentConfig& config, std::mt19937_64& rng) {
  if (x.rank() != 2) throw DimensionError("spec_augment expects [frames, bins]");
  const MaskDraw draw = draw_masks(rng, x.dim(0), x.dim(1), config.time_mask, config.freq_mask);
  apply_masks(x, draw);
  return draw;
}

}  // namespace lhgnn
