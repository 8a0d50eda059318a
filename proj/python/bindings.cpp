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

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>
#include <memory>

#include "lhgnn/audio.hpp"
#include "lhgnn/clustering.hpp"
#include "lhgnn/config.hpp"
#include "lhgnn/errors.hpp"
#include "lhgnn/knn.hpp"
#include "lhgnn/lhg_kernel.hpp"
#include "lhgnn/metrics.hpp"
#include "lhgnn/model.hpp"

namespace py = pybind11;
using namespace lhgnn;

namespace {

template <typename T>
using Array = py::array_t<T, py::array::c_style | py::array::forcecast>;

template <typename T>
Tensor<T> to_tensor(const Array<T>& a) {
  Shape shape(a.shape(), a.shape() + a.ndim());
  Tensor<T> t(shape);
  std::copy(a.data(), a.data() + a.size(), t.storage().begin());
  return t;
}

template <typename T>
Array<T> to_array(const Tensor<T>& t) {
  Array<T> a(std::vector<py::ssize_t>(t.shape().begin(), t.shape().end()));
  std::copy(t.data().begin(), t.data().end(), a.mutable_data());
  return a;
}

Array<std::int64_t> index_array(const std::vector<std::size_t>& flat, std::size_t k) {
  const py::ssize_t rows = k ? py::ssize_t(flat.size() / k) : 0;
  Array<std::int64_t> a({rows, py::ssize_t(k)});
  std::copy(flat.begin(), flat.end(), a.mutable_data());
  return a;
}

py::dict cluster_dict(const ClusterState<double>& state) {
  py::dict d;
  d["centroids"] = to_array(state.centroids);
  d["memberships"] = to_array(state.memberships);
  d["stale_clusters"] = state.stale_clusters;
  return d;
}

// Keeps the model and its mel frontend together for inference from Python.
class PyModel {
 public:
  PyModel(const std::string& config_json, std::uint64_t seed)
      : model_(model_config_from_json(nlohmann::json::parse(config_json)), seed) {}

  std::size_t param_count() const { return model_.parameter_count(); }

  py::list geometry() const {
    py::list out;
    for (const auto& g : model_.geometry()) {
      py::dict d;
      d["height"] = g.height;
      d["width"] = g.width;
      d["nodes"] = g.nodes();
      d["channels"] = g.channels;
      d["k"] = g.k;
      d["centroids"] = g.num_centroids;
      d["top_k"] = g.top_k;
      out.append(d);
    }
    return out;
  }

  Array<float> forward(const Array<float>& input) {
    auto x = to_tensor(input);
    Tensor<float> logits;
    {
      py::gil_scoped_release release;
      logits = model_.predict(x);
    }
    return to_array(logits);
  }

 private:
  Model<float> model_;
};

}  // namespace

PYBIND11_MODULE(_lhgnn, m) {
  m.doc() = "Graph audio classifier core";

  auto& base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<DimensionError>(m, "DimensionError", base.ptr());
  py::register_exception<ParameterError>(m, "ParameterError", base.ptr());
  py::register_exception<FormatError>(m, "FormatError", base.ptr());
  py::register_exception<StateError>(m, "StateError", base.ptr());
  py::register_exception<NumericError>(m, "NumericError", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<MetricError>(m, "MetricError", base.ptr());

  m.def(
      "knn",
      [](const Array<double>& nodes, std::size_t k) {
        const auto s = knn(to_tensor(nodes), k);
        return index_array(s.indices, s.k);
      },
      py::arg("nodes"), py::arg("k"), "Indices [N, k] of the k nearest other nodes, closest first.");

  m.def(
      "memberships",
      [](const Array<double>& nodes, const Array<double>& centroids, double fuzziness) {
        return to_array(memberships(to_tensor(nodes), to_tensor(centroids), fuzziness));
      },
      py::arg("nodes"), py::arg("centroids"), py::arg("fuzziness") = 2.0);

  m.def(
      "fuzzy_cmeans",
      [](const Array<double>& nodes, std::size_t num_centroids, std::size_t top_k, double fuzziness,
         std::size_t iterations) {
        const auto [state, higher] = fuzzy_cmeans(to_tensor(nodes), num_centroids, top_k, fuzziness, iterations);
        auto d = cluster_dict(state);
        d["top"] = index_array(higher.indices, higher.k);
        return d;
      },
      py::arg("nodes"), py::arg("num_centroids"), py::arg("top_k"), py::arg("fuzziness") = 2.0,
      py::arg("iterations") = 1);

  m.def(
      "kmeans",
      [](const Array<double>& nodes, std::size_t num_centroids, std::size_t iterations) {
        return cluster_dict(kmeans(to_tensor(nodes), num_centroids, iterations));
      },
      py::arg("nodes"), py::arg("num_centroids"), py::arg("iterations") = 1);

  m.def(
      "max_relative",
      [](const Array<double>& center, const Array<double>& others) {
        const auto c = to_tensor(center);
        return to_array(max_relative<double>(c.data(), to_tensor(others)));
      },
      py::arg("center"), py::arg("others"));

  m.def(
      "logmel",
      [](const Array<float>& samples, int sample_rate) {
        static const MelFrontend frontend;
        AudioClip clip{{samples.data(), samples.data() + samples.size()}, sample_rate};
        const auto mel = frontend.logmel(clip);
        return py::make_tuple(to_array(mel.frames), mel.valid_frames);
      },
      py::arg("samples"), py::arg("sample_rate") = 16000,
      "Log-mel map [1024, 128] and the number of frames computed from audio.");

  m.def(
      "mean_average_precision",
      [](const Array<double>& scores, const Array<double>& targets) {
        return mean_average_precision(to_tensor(scores), to_tensor(targets));
      },
      py::arg("scores"), py::arg("targets"));

  m.def(
      "accuracy",
      [](const Array<double>& scores, const Array<double>& targets) {
        return accuracy(to_tensor(scores), to_tensor(targets));
      },
      py::arg("scores"), py::arg("targets"));

  py::class_<PyModel>(m, "Model")
      .def(py::init<const std::string&, std::uint64_t>(), py::arg("config_json"), py::arg("seed") = 0)
      .def("param_count", &PyModel::param_count)
      .def("geometry", &PyModel::geometry)
      .def("forward", &PyModel::forward, py::arg("input"), "Inference logits for [B, frames, bins] input.");
}
