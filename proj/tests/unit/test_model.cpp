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

#include <random>
#include <set>

#include "doctest.h"
#include "lhgnn/config.hpp"
#include "lhgnn/errors.hpp"
#include "lhgnn/gradcheck.hpp"
#include "lhgnn/model.hpp"
#include "support.hpp"

using namespace lhgnn;
using testing::random_tensor;

namespace {

// Weights of a 3x3 conv, laid out [kh, kw, Cin, Cout], counted by hand.
std::size_t conv_count(std::size_t cin, std::size_t cout) { return 9 * cin * cout + cout; }

Model<float>& reference_model() {
  static Model<float> model(ModelConfig::reference(), 1);
  return model;
}

}  // namespace

TEST_SUITE("geometry") {
  TEST_CASE("reference stage node counts") {
    const auto g = stage_geometry(ModelConfig::reference());
    REQUIRE(g.size() == 4);
    const std::size_t expected_h[] = {256, 128, 64, 32}, expected_w[] = {32, 16, 8, 4};
    const std::size_t expected_n[] = {8192, 2048, 512, 128}, expected_c[] = {80, 160, 320, 640};
    for (std::size_t t = 0; t < 4; ++t) {
      CHECK(g[t].height == expected_h[t]);
      CHECK(g[t].width == expected_w[t]);
      CHECK(g[t].nodes() == expected_n[t]);
      CHECK(g[t].channels == expected_c[t]);
      CHECK(g[t].k == 25);
      CHECK(g[t].num_centroids == 50);
      CHECK(g[t].top_k == 10);
    }
  }

  TEST_CASE("k must stay below the smallest stage") {
    auto config = ModelConfig::reference();
    config.k = 128;
    CHECK_THROWS_AS(stage_geometry(config), ConfigError);
    config.k = 127;
    CHECK_NOTHROW(stage_geometry(config));
    config = ModelConfig::reference();
    config.top_k = 51;
    CHECK_THROWS_AS(config.validate(), ConfigError);
  }

  TEST_CASE("odd extents before a downsample are rejected in strict mode") {
    auto config = ModelConfig::reference();
    config.input_bins = 120;  // stage 3 width 7.5 -> odd stage widths
    CHECK_THROWS_AS(stage_geometry(config), ConfigError);
  }

  TEST_CASE("tiny config clamps per stage") {
    const auto g = stage_geometry(ModelConfig::tiny());
    CHECK(g[0].nodes() == 16 * 4);
    CHECK(g[3].nodes() == 2);
    CHECK(g[3].k == 1);
    CHECK(g[3].num_centroids == 2);
    CHECK(g[3].top_k == 2);
  }
}

TEST_SUITE("parameters") {
  TEST_CASE("reference count sits inside [25M, 37M]") {
    const std::size_t n = reference_model().parameter_count();
    CHECK(n >= 25'000'000);
    CHECK(n <= 37'000'000);
  }

  TEST_CASE("stem count has the closed form") {
    const auto config = ModelConfig::reference();
    std::size_t expected = 0, cin = 1;
    for (std::size_t cout : config.stem_channels) {
      expected += conv_count(cin, cout) + 2 * cout;
      cin = cout;
    }
    std::size_t counted = 0;
    for (const auto& [name, shape] : parameter_layout(config)) {
      if (name.starts_with("stem.") && name.find("running") == std::string::npos) {
        counted += shape_size(shape);
      }
    }
    CHECK(counted == expected);
  }

  TEST_CASE("names are unique and running statistics are frozen") {
    std::set<std::string> names;
    for (const auto& e : reference_model().params().entries()) {
      CHECK(names.insert(e.name).second);
      CHECK(e.requires_grad == (e.name.find("running_") == std::string::npos));
    }
  }

  TEST_CASE("restoring from a store validates the layout") {
    Model<float> model(ModelConfig::tiny(), 3);
    ParamStore<float> partial;
    for (const auto& e : model.params().entries()) {
      if (e.name != "head.fc.bias") partial.add(e.name, e.value, e.requires_grad);
    }
    CHECK_THROWS_AS(Model<float>(ModelConfig::tiny(), partial), FormatError);
    CHECK_NOTHROW(Model<float>(ModelConfig::tiny(), model.params()));
  }
}

TEST_SUITE("blocks") {
  TEST_CASE("stem maps 1024 x 128 x 1 to 256 x 32 x 80") {
    Model<float> model(ModelConfig::reference(), 2);
    Tape<float> tape(Tape<float>::Mode::kInference);
    std::mt19937_64 rng(2);
    const auto y = model.stem(tape, tape.constant(random_tensor<float>({1, 1024, 128, 1}, rng)));
    CHECK(y->value.shape() == Shape{1, 256, 32, 80});
  }

  TEST_CASE("zero input with zero biases gives zero stem output") {
    Model<float> model(ModelConfig::tiny(), 3);
    for (auto& e : model.params().entries()) {
      if (e.name.starts_with("stem.") && e.name.ends_with(".bias")) e.value.fill(0.0f);
    }
    Tape<float> tape;
    const auto y = model.stem(tape, tape.constant(Tensor<float>({2, 64, 16, 1})));
    for (float v : y->value.data()) CHECK(v == 0.0f);
  }

  TEST_CASE("conv_ffn with zero projection is the identity and keeps shape") {
    Model<float> model(ModelConfig::tiny(), 4);
    std::mt19937_64 rng(4);
    const auto x = random_tensor<float>({2, 5, 3, 8}, rng);
    Tape<float> tape;
    CHECK(model.conv_ffn(tape, tape.constant(x), "stages.0.blocks.0.ffn")->value.shape() == x.shape());
    model.params().at("stages.0.blocks.0.ffn.proj.weight").fill(0.0f);
    model.params().at("stages.0.blocks.0.ffn.proj.bias").fill(0.0f);
    Tape<float> again;
    CHECK(model.conv_ffn(again, again.constant(x), "stages.0.blocks.0.ffn")->value == x);
  }

  TEST_CASE("conv_ffn gradient on a 4 x 4 x 8 input") {
    Model<double> model(ModelConfig::tiny(), 5);
    std::mt19937_64 rng(5);
    const auto x = random_tensor<double>({1, 4, 4, 8}, rng);
    CHECK(testing::max_gradient_error({x}, [&](Tape<double>& t, const std::vector<Var<double>>& in) {
            return model.conv_ffn(t, in[0], "stages.0.blocks.0.ffn");
          }) < 1e-3);
  }

  TEST_CASE("downsample 256 x 32 x 80 -> 128 x 16 x 160 and rejects odd extents") {
    auto& m = reference_model();
    Tape<float> tape(Tape<float>::Mode::kInference);
    std::mt19937_64 rng(6);
    const auto y = m.downsample(tape, tape.constant(random_tensor<float>({1, 256, 32, 80}, rng)), 1);
    CHECK(y->value.shape() == Shape{1, 128, 16, 160});
    CHECK_THROWS_AS(m.downsample(tape, tape.constant(Tensor<float>({1, 5, 4, 80})), 1), DimensionError);
  }

  TEST_CASE("stride-2 delta kernel keeps every second pixel") {
    std::mt19937_64 rng(7);
    const auto x = random_tensor<float>({1, 6, 4, 2}, rng);
    Tensor<float> w({3, 3, 2, 2});
    for (std::size_t c = 0; c < 2; ++c) w[((1 * 3 + 1) * 2 + c) * 2 + c] = 1.0f;
    Tape<float> tape;
    const auto y = ops::conv2d<float>(tape, tape.constant(x), tape.constant(w), nullptr, {2, 1, false})->value;
    REQUIRE(y.shape() == Shape{1, 3, 2, 2});
    for (std::size_t i = 0; i < 3; ++i) {
      for (std::size_t j = 0; j < 2; ++j) {
        for (std::size_t c = 0; c < 2; ++c) CHECK(y[(i * 2 + j) * 2 + c] == x[((2 * i) * 4 + 2 * j) * 2 + c]);
      }
    }
  }

  TEST_CASE("head: constant maps pool to the constant, zero affine gives zero logits, 527 classes") {
    auto& m = reference_model();
    Tensor<float> x({1, 2, 3, 640});
    for (std::size_t c = 0; c < 640; ++c) {
      for (std::size_t s = 0; s < 6; ++s) x[s * 640 + c] = float(c) * 0.01f;
    }
    Tape<float> tape(Tape<float>::Mode::kInference);
    const auto pooled = ops::global_avg_pool(tape, tape.constant(x))->value;
    for (std::size_t c = 0; c < 640; ++c) CHECK(pooled[c] == doctest::Approx(float(c) * 0.01f));
    CHECK(m.head(tape, tape.constant(x))->value.shape() == Shape{1, 527});

    Model<float> tiny(ModelConfig::tiny(), 8);
    tiny.params().at("head.fc.weight").fill(0.0f);
    tiny.params().at("head.fc.bias").fill(0.0f);
    std::mt19937_64 rng(8);
    const auto logits = tiny.predict(random_tensor<float>({2, 64, 16}, rng));
    for (float v : logits.data()) CHECK(v == 0.0f);
  }
}

TEST_SUITE("forward") {
  TEST_CASE("identical clips in a batch give identical rows") {
    Model<float> model(ModelConfig::tiny(), 9);
    std::mt19937_64 rng(9);
    const auto clip = random_tensor<float>({1, 64, 16}, rng);
    Tensor<float> batch({2, 64, 16});
    std::copy(clip.data().begin(), clip.data().end(), batch.row(0));
    std::copy(clip.data().begin(), clip.data().end(), batch.row(1));
    const auto logits = model.predict(batch);
    for (std::size_t c = 0; c < logits.dim(1); ++c) CHECK(logits(0, c) == logits(1, c));
  }

  TEST_CASE("wrong input shape is a dimension error") {
    Model<float> model(ModelConfig::tiny(), 10);
    CHECK_THROWS_AS(model.predict(Tensor<float>({1, 32, 16})), DimensionError);
  }

  TEST_CASE("stage shapes reported during forward") {
    Model<float> model(ModelConfig::tiny(), 11);
    std::vector<Shape> shapes;
    Tape<float> tape(Tape<float>::Mode::kInference);
    std::mt19937_64 rng(11);
    ForwardOptions<float> opt{nullptr, &shapes};
    model.forward(tape, random_tensor<float>({1, 64, 16}, rng), opt);
    REQUIRE(shapes.size() == 4);
    CHECK(shapes[0] == Shape{1, 16, 4, 8});
    CHECK(shapes[3] == Shape{1, 2, 1, 64});
  }

  TEST_CASE("tiny forward and backward match finite differences on sampled entries") {
    GradCheckOptions opt;
    opt.max_entries_per_tensor = 3;
    const auto report = gradcheck_model(ModelConfig::tiny(), opt);
    CHECK(report.checked > 100);
    CHECK(report.max_rel_error < 1e-3);
  }
}

TEST_SUITE("properties") {
  TEST_CASE("two forwards with the same weights are bit identical") {
    Model<float> a(ModelConfig::tiny(), 12), b(ModelConfig::tiny(), 12);
    std::mt19937_64 rng(12);
    const auto x = random_tensor<float>({2, 64, 16}, rng);
    CHECK(a.predict(x) == a.predict(x));
    CHECK(a.predict(x) == b.predict(x));
  }

  TEST_CASE("zeroing residual-branch projections leaves stem, norms, downsample and head") {
    Model<float> model(ModelConfig::tiny(), 13);
    for (auto& e : model.params().entries()) {
      if (e.name.find(".graph.proj.") != std::string::npos ||
          e.name.find(".ffn.proj.") != std::string::npos) {
        e.value.fill(0.0f);
      }
    }
    std::mt19937_64 rng(13);
    const auto x = random_tensor<float>({2, 64, 16}, rng);
    const auto logits = model.predict(x);

    // Direct composition without any LHG block.
    Tape<float> tape(Tape<float>::Mode::kInference);
    Var<float> h = model.stem(tape, tape.constant(x.reshaped({2, 64, 16, 1})));
    for (std::size_t t = 1; t < 4; ++t) h = model.downsample(tape, h, t);
    CHECK(model.head(tape, h)->value == logits);

    // Inner branch weights no longer matter.
    for (auto& e : model.params().entries()) {
      if (e.name.find(".sigma.") != std::string::npos || e.name.find(".expand.") != std::string::npos) {
        for (float& v : e.value.storage()) v *= -3.0f;
      }
    }
    CHECK(model.predict(x) == logits);
  }
}
