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
#include <numeric>
#include <random>

#include "doctest.h"
#include "lhgnn/clustering.hpp"
#include "lhgnn/errors.hpp"
#include "lhgnn/knn.hpp"
#include "lhgnn/lhg_kernel.hpp"
#include "support.hpp"

using namespace lhgnn;
using testing::random_tensor;
using testing::to_matrix;

namespace {

constexpr KernelVariant kAllVariants[] = {KernelVariant::kLocalOnly, KernelVariant::kHigherOnly,
                                          KernelVariant::kLocalHigher};

template <typename T>
LhgConvParams<T> random_params(std::size_t c, KernelVariant v, std::mt19937_64& rng) {
  const std::size_t w = concat_width(v, c);
  return {random_tensor<T>({w, w}, rng, 0.5), random_tensor<T>({w}, rng, 0.5),
          random_tensor<T>({w, c}, rng, 0.5), random_tensor<T>({c}, rng, 0.5)};
}

std::vector<std::vector<std::size_t>> rows_of(const std::vector<std::size_t>& flat, std::size_t k) {
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t i = 0; i < flat.size(); i += k) out.emplace_back(flat.begin() + std::ptrdiff_t(i), flat.begin() + std::ptrdiff_t(i + k));
  return out;
}

template <typename T>
oracle::Matrix oracle_conv(const Tensor<T>& x, const NeighborSet& s, const HigherOrderSet& l,
                           const Tensor<T>& centroids, const LhgConvParams<T>& p, KernelVariant v) {
  const auto nb = rows_of(s.indices, s.k);
  const auto hi = rows_of(l.indices, l.k);
  const auto cm = to_matrix(centroids);
  auto vec = [](const Tensor<T>& t) { return std::vector<double>(t.data().begin(), t.data().end()); };
  return oracle::lhg_conv(to_matrix(x), uses_local(v) ? &nb : nullptr, &cm,
                          uses_higher(v) ? &hi : nullptr, to_matrix(p.sigma_weight),
                          vec(p.sigma_bias), to_matrix(p.proj_weight), vec(p.proj_bias));
}

}  // namespace

TEST_SUITE("max_relative") {
  TEST_CASE("hand evaluated per dimension") {
    const std::vector<float> center{1, 2};
    const auto out = max_relative<float>(center, Tensor<float>({2, 2}, {2, 0, 0, 5}));
    CHECK(out[0] == 1.0f);
    CHECK(out[1] == 3.0f);
  }

  TEST_CASE("self set and single member") {
    const std::vector<float> center{0.5f, -1.5f, 2.0f};
    const auto self = max_relative<float>(center, Tensor<float>({1, 3}, center));
    for (float v : self.data()) CHECK(v == 0.0f);
    const auto one = max_relative<float>(center, Tensor<float>({1, 3}, {1, 1, 1}));
    CHECK(one[0] == 0.5f);
    CHECK(one[1] == 2.5f);
    CHECK(one[2] == -1.0f);
  }

  TEST_CASE("empty set is a parameter error") {
    const std::vector<float> center{1, 2};
    CHECK_THROWS_AS(max_relative<float>(center, Tensor<float>({0, 2}, std::vector<float>{})),
                    ParameterError);
  }
}

TEST_SUITE("lhg_conv") {
  TEST_CASE("zero projection is the identity") {
    std::mt19937_64 rng(1);
    const auto x = random_tensor<float>({8, 4}, rng);
    const auto s = knn(x, 3);
    const auto [state, l] = fuzzy_cmeans(x, 3, 2, 2.0, 1);
    for (KernelVariant v : kAllVariants) {
      auto p = random_params<float>(4, v, rng);
      p.proj_weight.fill(0.0f);
      p.proj_bias.fill(0.0f);
      CHECK(lhg_conv(x, s, l, state.centroids, p, v).output == x);
    }
  }

  TEST_CASE("shapes for N=8, C=4") {
    std::mt19937_64 rng(2);
    const auto x = random_tensor<float>({8, 4}, rng);
    const auto s = knn(x, 3);
    const auto [state, l] = fuzzy_cmeans(x, 3, 2, 2.0, 1);
    const auto r = lhg_conv(x, s, l, state.centroids,
                            random_params<float>(4, KernelVariant::kLocalHigher, rng),
                            KernelVariant::kLocalHigher);
    CHECK(r.hidden.shape() == Shape{8, 12});
    CHECK(r.output.shape() == Shape{8, 4});
  }

  TEST_CASE("straight-line oracle N=6, C=2, k=2, K=1") {
    std::mt19937_64 rng(3);
    const auto x = random_tensor<float>({6, 2}, rng);
    const auto s = knn(x, 2);
    const auto [state, l] = fuzzy_cmeans(x, 3, 1, 2.0, 1);
    for (KernelVariant v : kAllVariants) {
      const auto p = random_params<float>(2, v, rng);
      const auto y = lhg_conv(x, s, l, state.centroids, p, v).output;
      const auto ref = oracle_conv(x, s, l, state.centroids, p, v);
      for (std::size_t i = 0; i < 6; ++i) {
        for (std::size_t d = 0; d < 2; ++d) CHECK(std::abs(y(i, d) - ref[i][d]) < 1e-5);
      }
    }
  }

  TEST_CASE("width mismatch is a dimension error") {
    std::mt19937_64 rng(4);
    const auto x = random_tensor<float>({6, 2}, rng);
    const auto s = knn(x, 2);
    const auto [state, l] = fuzzy_cmeans(x, 3, 1, 2.0, 1);
    const auto p = random_params<float>(2, KernelVariant::kLocalOnly, rng);
    CHECK_THROWS_AS(lhg_conv(x, s, l, state.centroids, p, KernelVariant::kLocalHigher), DimensionError);
  }

  TEST_CASE("variant names round trip") {
    for (KernelVariant v : kAllVariants) CHECK(kernel_variant_from_string(to_string(v)) == v);
    CHECK_THROWS(kernel_variant_from_string("global"));
  }
}

TEST_SUITE("backward") {
  // nodes and all four weights are leaves; selections come from the
  // unperturbed nodes and stay frozen.
  struct Frozen {
    Tensor<double> x;
    GraphSelection<double> sel;
    LhgConvParams<double> p;
    KernelVariant v;
  };

  Frozen make_frozen(std::size_t n, std::size_t c, KernelVariant v, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    Frozen f{random_tensor<double>({n, c}, rng), {}, random_params<double>(c, v, rng), v};
    ClusteringOptions opt{ClusteringMethod::kFuzzyCMeans, 4, 2, 2.0, 1};
    f.sel = build_graph_selection(f.x, 1, 3, opt, v);
    return f;
  }

  TEST_CASE("finite differences under frozen selections") {
    for (KernelVariant v : kAllVariants) {
      for (std::uint64_t seed : {1u, 2u, 3u}) {
        const Frozen f = make_frozen(seed == 3 ? 32 : 12, seed == 2 ? 8 : 4, v, seed);
        const double err = testing::max_gradient_error(
            {f.x, f.p.sigma_weight, f.p.sigma_bias, f.p.proj_weight, f.p.proj_bias},
            [&](Tape<double>& t, const std::vector<Var<double>>& in) {
              return lhg_conv(t, in[0], f.sel, LhgConvVars<double>{in[1], in[2], in[3], in[4]}, v)
                  .output;
            },
            seed, 1e-6);
        CHECK(err < 1e-3);
      }
    }
  }

  TEST_CASE("a never-selected neighbour does not move the loss") {
    // Node 3 is far away, so nobody picks it as a neighbour, and with
    // HigherOnly off its only influence would be through S_i.
    Tensor<double> x({4, 2}, {0, 0, 0.1, 0, 0, 0.2, 50, 50});
    NeighborSet s = knn(x, 2);
    for (std::size_t i = 0; i < 3; ++i) {
      const auto ids = s.of(i);
      REQUIRE(std::find(ids.begin(), ids.end(), 3) == ids.end());
    }
    std::mt19937_64 rng(5);
    const auto p = random_params<double>(2, KernelVariant::kLocalOnly, rng);
    auto loss = [&](const Tensor<double>& nodes) {
      const auto y = lhg_conv(nodes, s, HigherOrderSet{}, Tensor<double>({1, 2}), p,
                              KernelVariant::kLocalOnly)
                         .output;
      double acc = 0.0;
      for (std::size_t i = 0; i < 3; ++i) acc += y(i, 0) + y(i, 1);
      return acc;
    };
    auto moved = x;
    moved(3, 0) += 0.5;
    CHECK(loss(moved) == loss(x));
  }

  TEST_CASE("residual path contributes the identity") {
    std::mt19937_64 rng(6);
    Frozen f = make_frozen(10, 3, KernelVariant::kLocalHigher, 6);
    f.p.proj_weight.fill(0.0);
    Tape<double> tape;
    Var<double> x = tape.leaf(f.x);
    auto out = lhg_conv(tape, x, f.sel,
                        LhgConvVars<double>{tape.constant(f.p.sigma_weight), tape.constant(f.p.sigma_bias),
                                            tape.constant(f.p.proj_weight), tape.constant(f.p.proj_bias)},
                        f.v);
    tape.backward(ops::sum(tape, out.output));
    for (double g : x->grad.data()) CHECK(g == 1.0);
  }
}

TEST_SUITE("properties") {
  TEST_CASE("concat width law") {
    CHECK(concat_width(KernelVariant::kLocalOnly, 5) == 10);
    CHECK(concat_width(KernelVariant::kHigherOnly, 5) == 10);
    CHECK(concat_width(KernelVariant::kLocalHigher, 5) == 15);
  }

  TEST_CASE("permutation equivariance") {
    std::mt19937_64 rng(7);
    const std::size_t n = 16, c = 3;
    const auto x = random_tensor<double>({n, c}, rng);
    const auto s = knn(x, 3);
    const auto [state, l] = fuzzy_cmeans(x, 4, 2, 2.0, 1);
    std::vector<std::size_t> perm(n), inv(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    for (std::size_t i = 0; i < n; ++i) inv[perm[i]] = i;
    Tensor<double> xp({n, c});
    NeighborSet sp{s.k, {}};
    HigherOrderSet lp{l.k, {}};
    for (std::size_t i = 0; i < n; ++i) {
      std::copy(x.row(perm[i]), x.row(perm[i]) + c, xp.row(i));
      for (std::size_t j : s.of(perm[i])) sp.indices.push_back(inv[j]);
      for (std::size_t q : l.of(perm[i])) lp.indices.push_back(q);
    }
    for (KernelVariant v : kAllVariants) {
      const auto p = random_params<double>(c, v, rng);
      const auto y = lhg_conv(x, s, l, state.centroids, p, v).output;
      const auto yp = lhg_conv(xp, sp, lp, state.centroids, p, v).output;
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t d = 0; d < c; ++d) CHECK(yp(i, d) == y(perm[i], d));
      }
    }
  }

  TEST_CASE("oracle equivalence for every variant on N <= 32") {
    std::mt19937_64 rng(8);
    std::uniform_int_distribution<std::size_t> pick_n(5, 32), pick_c(1, 8);
    for (int trial = 0; trial < 15; ++trial) {
      const std::size_t n = pick_n(rng), c = pick_c(rng);
      const auto x = random_tensor<float>({n, c}, rng);
      const auto s = knn(x, 4);
      const auto [state, l] = fuzzy_cmeans(x, 4, 2, 2.0, 1);
      for (KernelVariant v : kAllVariants) {
        const auto p = random_params<float>(c, v, rng);
        const auto y = lhg_conv(x, s, l, state.centroids, p, v).output;
        const auto ref = oracle_conv(x, s, l, state.centroids, p, v);
        for (std::size_t i = 0; i < n; ++i) {
          for (std::size_t d = 0; d < c; ++d) REQUIRE(std::abs(y(i, d) - ref[i][d]) < 1e-5);
        }
      }
    }
  }
}
