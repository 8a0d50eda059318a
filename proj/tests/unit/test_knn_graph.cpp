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

#include <algorithm>
#include <random>

#include "doctest.h"
#include "lhgnn/errors.hpp"
#include "lhgnn/knn.hpp"
#include "support.hpp"

using namespace lhgnn;
using testing::random_tensor;
using testing::to_matrix;

namespace {

std::vector<std::size_t> neighbours(const NeighborSet& s, std::size_t i) {
  const auto ids = s.of(i);
  return {ids.begin(), ids.end()};
}

}  // namespace

TEST_SUITE("knn") {
  TEST_CASE("1-D example") {
    const auto s = knn(Tensor<float>({3, 1}, {0, 1, 3}), 2);
    CHECK(neighbours(s, 0) == std::vector<std::size_t>{1, 2});
    CHECK(neighbours(s, 2) == std::vector<std::size_t>{1, 0});
  }

  TEST_CASE("identical nodes fall back to the lowest other indices") {
    const auto s = knn(Tensor<float>({6, 2}, 0.5f), 3);
    CHECK(neighbours(s, 0) == std::vector<std::size_t>{1, 2, 3});
    CHECK(neighbours(s, 2) == std::vector<std::size_t>{0, 1, 3});
    CHECK(neighbours(s, 5) == std::vector<std::size_t>{0, 1, 2});
  }

  TEST_CASE("k = N-1 lists every other node, distance sorted, self excluded") {
    std::mt19937_64 rng(1);
    const auto x = random_tensor<float>({9, 3}, rng);
    const auto s = knn(x, 8);
    const auto ref = oracle::knn(to_matrix(x), 8);
    for (std::size_t i = 0; i < 9; ++i) {
      const auto ids = neighbours(s, i);
      CHECK(std::find(ids.begin(), ids.end(), i) == ids.end());
      CHECK(ids == ref[i]);
    }
  }

  TEST_CASE("neighbour vectors are the selected rows") {
    Tensor<float> x({3, 2}, {0, 0, 1, 1, 3, 3});
    const auto s = knn(x, 1);
    const auto v = s.vectors(x, 0);
    CHECK(v.shape() == Shape{1, 2});
    CHECK(v[0] == 1.0f);
  }

  TEST_CASE("k outside [1, N-1] is a parameter error") {
    Tensor<float> x({4, 2});
    CHECK_THROWS_AS(knn(x, 4), ParameterError);
    CHECK_THROWS_AS(knn(x, 0), ParameterError);
  }
}

TEST_SUITE("properties") {
  TEST_CASE("translation leaves neighbour indices unchanged") {
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 10; ++trial) {
      const auto x = random_tensor<double>({40, 4}, rng);
      auto y = x;
      for (std::size_t i = 0; i < 40; ++i) {
        for (std::size_t d = 0; d < 4; ++d) y(i, d) += 0.25 * double(d + 1);
      }
      CHECK(knn(x, 5).indices == knn(y, 5).indices);
    }
  }

  TEST_CASE("gram-form squared distances match direct subtraction") {
    std::mt19937_64 rng(3);
    const auto a = random_tensor<float>({30, 8}, rng);
    const auto b = random_tensor<float>({20, 8}, rng);
    const auto direct = pairwise_squared_distances(a, b, DistanceMethod::kDirect);
    const auto gram = pairwise_squared_distances(a, b, DistanceMethod::kGram);
    for (std::size_t i = 0; i < direct.size(); ++i) {
      CHECK(std::abs(gram[i] - direct[i]) <= 1e-4 * std::max(1.0f, direct[i]));
    }
  }

  TEST_CASE("agrees with the full-sort oracle including ties") {
    std::mt19937_64 rng(4);
    std::uniform_int_distribution<std::size_t> pick_n(2, 128);
    for (int trial = 0; trial < 20; ++trial) {
      const std::size_t n = pick_n(rng);
      auto x = random_tensor<float>({n, 3}, rng);
      // Snap to a coarse grid so equal distances are common.
      for (float& v : x.storage()) v = std::round(v * 2.0f) / 2.0f;
      const std::size_t k = std::min<std::size_t>(n - 1, 1 + n % 7);
      const auto s = knn(x, k);
      const auto ref = oracle::knn(to_matrix(x), k);
      for (std::size_t i = 0; i < n; ++i) REQUIRE(neighbours(s, i) == ref[i]);
    }
  }
}
