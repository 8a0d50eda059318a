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

#include "lhgnn/checkpoint.hpp"

#include <cmath>
#include <fstream>

#include "lhgnn/binary_io.hpp"

namespace lhgnn {

void save_checkpoint(const std::string& path, const ModelConfig& config,
                     const ParamStore<float>& params, const nlohmann::ordered_json& meta) {
  nlohmann::ordered_json header;
  header["version"] = kCheckpointVersion;
  header["config"] = to_json(config);
  header["meta"] = meta;
  nlohmann::ordered_json directory = nlohmann::ordered_json::object();
  std::uint64_t offset = 0;
  for (const auto& e : params.entries()) {
    directory[e.name] = {{"shape", e.value.shape()},
                         {"offset", offset},
                         {"trainable", e.requires_grad}};
    offset += e.value.size() * sizeof(float);
  }
  header["tensors"] = std::move(directory);
  std::string text = header.dump();
  const std::size_t total = sizeof(std::uint64_t) + text.size();
  text.append((64 - total % 64) % 64, ' ');

  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write checkpoint: " + path);
  binary::put<std::uint64_t>(out, text.size());
  out.write(text.data(), std::streamsize(text.size()));
  for (const auto& e : params.entries()) {
    for (float v : e.value.data()) binary::put<float>(out, v);
  }
  if (!out) throw FormatError("failed writing checkpoint: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open checkpoint: " + path);
  const auto header_size = binary::get<std::uint64_t>(in, "checkpoint header");
  if (header_size > (std::uint64_t(1) << 32)) throw FormatError(path + ": implausible header size");
  std::string text(header_size, '\0');
  if (!in.read(text.data(), std::streamsize(header_size))) {
    throw FormatError(path + ": truncated checkpoint header");
  }
  Checkpoint ckpt;
  std::vector<std::pair<std::string, nlohmann::ordered_json>> directory;
  try {
    const auto header = nlohmann::ordered_json::parse(text);
    if (header.at("version").get<int>() != kCheckpointVersion) {
      throw FormatError(path + ": unsupported checkpoint version");
    }
    ckpt.config = model_config_from_json(nlohmann::json(header.at("config")));
    if (header.contains("meta")) ckpt.meta = header.at("meta");
    for (const auto& item : header.at("tensors").items()) {
      directory.emplace_back(item.key(), item.value());
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path + ": malformed checkpoint header: " + e.what());
  } catch (const ConfigError& e) {
    throw FormatError(path + ": bad config in checkpoint: " + e.what());
  }
  std::uint64_t expected_offset = 0;
  for (const auto& [name, info] : directory) {
    const Shape shape = info.at("shape").get<Shape>();
    if (info.at("offset").get<std::uint64_t>() != expected_offset) {
      throw FormatError(path + ": tensor '" + name + "' is not in directory order");
    }
    Tensor<float> value(shape);
    for (auto& v : value.data()) v = binary::get<float>(in, "checkpoint payload");
    expected_offset += value.size() * sizeof(float);
    ckpt.params.add(name, std::move(value), info.value("trainable", true));
  }
  return ckpt;
}

ParamStore<float> average_params(const std::vector<const ParamStore<float>*>& stores,
                                 const std::vector<double>& weights) {
  if (stores.empty() || stores.size() != weights.size()) {
    throw ParameterError("need one weight per checkpoint");
  }
  double total = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw ParameterError("checkpoint weights must be non-negative");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-6) throw ParameterError("checkpoint weights must sum to 1");
  const auto& first = *stores.front();
  for (const auto* s : stores) {
    if (s->size() != first.size()) throw FormatError("checkpoint directories differ in size");
    for (std::size_t i = 0; i < first.size(); ++i) {
      const auto& a = first.entries()[i];
      const auto& b = s->entries()[i];
      if (a.name != b.name || a.value.shape() != b.value.shape()) {
        throw FormatError("checkpoint directories differ at '" + b.name + "'");
      }
    }
  }
  ParamStore<float> out;
  for (std::size_t i = 0; i < first.size(); ++i) {
    const auto& ref = first.entries()[i];
    Tensor<float> value(ref.value.shape());
    for (std::size_t j = 0; j < value.size(); ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < stores.size(); ++k) {
        acc += weights[k] * double(stores[k]->entries()[i].value[j]);
      }
      value[j] = float(acc);
    }
    out.add(ref.name, std::move(value), ref.requires_grad);
  }
  return out;
}

Checkpoint average_checkpoints(const std::vector<std::string>& paths,
                               std::vector<double> weights) {
  if (paths.empty()) throw ParameterError("no checkpoints to average");
  if (weights.empty()) weights.assign(paths.size(), 1.0 / double(paths.size()));
  std::vector<Checkpoint> loaded;
  loaded.reserve(paths.size());
  for (const auto& p : paths) loaded.push_back(load_checkpoint(p));
  std::vector<const ParamStore<float>*> stores;
  for (const auto& c : loaded) stores.push_back(&c.params);
  Checkpoint out;
  out.config = loaded.front().config;
  out.params = average_params(stores, weights);
  out.meta["averaged_from"] = paths;
  out.meta["weights"] = weights;
  return out;
}

}  // namespace lhgnn
