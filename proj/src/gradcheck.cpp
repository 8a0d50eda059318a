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

#include "lhgnn/gradcheck.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>

#include "lhgnn/model.hpp"
#include "lhgnn/ops.hpp"

namespace lhgnn {

double relative_error(double analytic, double numeric, double floor) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), floor});
  return std::abs(analytic - numeric) / denom;
}

GradCheckReport gradcheck_model(const ModelConfig& config, const GradCheckOptions& options) {
  const auto started = std::chrono::steady_clock::now();
  Model<double> model(config, options.seed);

  std::mt19937_64 rng(options.seed ^ 0x9e3779b97f4a7c15ULL);
  std::normal_distribution<double> normal(0.0, 1.0);
  Tensor<double> input({options.batch, config.input_frames, config.input_bins});
  for (double& v : input.storage()) v = normal(rng);
  Tensor<double> targets({options.batch, config.num_classes});
  std::bernoulli_distribution coin(0.3);
  for (double& v : targets.storage()) v = coin(rng) ? 1.0 : 0.0;

  SelectionCache<double> cache;
  ForwardOptions<double> fwd{&cache, nullptr};
  cache.mode = SelectionCache<double>::Mode::kRecord;
  Tape<double> tape(Tape<double>::Mode::kTraining);
  Var<double> loss = ops::bce_with_logits(tape, model.forward(tape, input, fwd), targets);
  tape.backward(loss);
  const GradRecord<double> grads = tape.gradients(model.params());
  cache.mode = SelectionCache<double>::Mode::kReplay;

  // Segments: 0 stem, 1 + t stage t (with its downsample), then the head. A
  // perturbation only needs the forward pass from its own segment onwards, so
  // the unperturbed input to every segment is computed once.
  const std::size_t stages = config.channels.size();
  std::vector<Tensor<double>> segment_input(stages + 2);
  std::vector<std::size_t> blocks_before(stages + 2, 0);
  {
    Tape<double> base(Tape<double>::Mode::kTraining);
    segment_input[0] = input.reshaped({options.batch, config.input_frames, config.input_bins, 1});
    cache.cursor = 0;
    Var<double> h = model.stem(base, base.constant(segment_input[0]));
    for (std::size_t t = 0; t < stages; ++t) {
      segment_input[t + 1] = h->value;
      blocks_before[t + 1] = cache.cursor;
      if (t > 0) h = model.downsample(base, h, t);
      for (std::size_t b = 0; b < config.depths[t]; ++b) {
        h = model.lhg_block(base, h, t, b, &cache);
      }
    }
    segment_input[stages + 1] = h->value;
    blocks_before[stages + 1] = cache.cursor;
  }
  auto loss_from = [&](std::size_t segment) {
    Tape<double> t(Tape<double>::Mode::kTraining);
    cache.cursor = blocks_before[segment];
    Var<double> h = t.constant(segment_input[segment]);
    if (segment == 0) h = model.stem(t, h);
    for (std::size_t s = std::max<std::size_t>(segment, 1); s <= stages; ++s) {
      const std::size_t stage = s - 1;
      if (stage > 0) h = model.downsample(t, h, stage);
      for (std::size_t b = 0; b < config.depths[stage]; ++b) {
        h = model.lhg_block(t, h, stage, b, &cache);
      }
    }
    return ops::bce_with_logits(t, model.head(t, h), targets)->value[0];
  };
  auto segment_of = [&](const std::string& name) -> std::size_t {
    if (name.starts_with("stem.")) return 0;
    if (name.starts_with("head.")) return stages + 1;
    const std::size_t dot = name.find('.');
    return 1 + std::stoul(name.substr(dot + 1));
  };

  GradCheckReport report;
  for (auto& entry : model.params().entries()) {
    if (!entry.requires_grad) continue;
    const std::size_t segment = segment_of(entry.name);
    TensorGradReport tr;
    tr.name = entry.name;
    const Tensor<double>& g = grads.at(entry.name);
    const std::size_t n = entry.value.size();
    const std::size_t count =
        options.max_entries_per_tensor == 0 ? n : std::min(n, options.max_entries_per_tensor);
    for (std::size_t s = 0; s < count; ++s) {
      const std::size_t j = count == n ? s : s * n / count;
      double& theta = entry.value[j];
      const double original = theta;
      const double h = options.epsilon * (1.0 + std::abs(original));
      theta = original + h;
      const double plus = loss_from(segment);
      theta = original - h;
      const double minus = loss_from(segment);
      theta = original;
      const double numeric = (plus - minus) / (2.0 * h);
      const double err = relative_error(g[j], numeric, options.floor);
      if (err > tr.max_rel_error || tr.checked == 0) {
        tr.max_rel_error = err;
        tr.worst_index = j;
        tr.worst_analytic = g[j];
        tr.worst_numeric = numeric;
      }
      ++tr.checked;
    }
    report.max_rel_error = std::max(report.max_rel_error, tr.max_rel_error);
    report.checked += tr.checked;
    report.tensors.push_back(std::move(tr));
  }
  report.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return report;
}

}  // namespace lhgnn
