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

#ifndef LHGNN_AUGMENT_HPP_
#define LHGNN_AUGMENT_HPP_

#include <cstddef>
#include <random>

#include "lhgnn/config.hpp"
#include "lhgnn/dataset.hpp"

namespace lhgnn {

// lambda ~ Beta(alpha, alpha), via two Gamma draws.
double sample_mixup_lambda(std::mt19937_64& rng, double alpha);

// x = lambda * a + (1 - lambda) * b, labels likewise.
Sample mixup(const Sample& a, const Sample& b, double lambda);

// One time mask and one frequency mask. Widths are uniform on [0, max],
// starts uniform over the positions where the mask fits.
struct MaskDraw {
  std::size_t time_start = 0;
  std::size_t time_width = 0;
  std::size_t freq_start = 0;
  std::size_t freq_width = 0;
};

MaskDraw draw_masks(std::mt19937_64& rng, std::size_t frames, std::size_t bins,
                    std::size_t max_time, std::size_t max_freq);

// Zeroes the masked rows (time) and columns (frequency) of a [frames, bins]
// matrix; every other cell is left untouched.
void apply_masks(Tensor<float>& x, const MaskDraw& draw);

MaskDraw spec_augment(Tensor<float>& x, const AugmentConfig& config, std::mt19937_64& rng);

}  // namespace lhgnn

#endif  // LHGNN_AUGMENT_HPP_
