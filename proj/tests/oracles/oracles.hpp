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

// Independent reference implementations used only by the tests. They work on
// plain nested vectors in double precision and follow the textbook formulas
// directly, sharing no code with the library.

#ifndef LHGNN_TESTS_ORACLES_HPP_
#define LHGNN_TESTS_ORACLES_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

namespace oracle {

using Matrix = std::vector<std::vector<double>>;

inline double sq_distance(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t d = 0; d < a.size(); ++d) s += (a[d] - b[d]) * (a[d] - b[d]);
  return s;
}

// ---------------------------------------------------------------------------
// Fuzzy C-Means
// ---------------------------------------------------------------------------

inline Matrix fcm_memberships(const Matrix& x, const Matrix& c, double m) {
  Matrix u(x.size(), std::vector<double>(c.size(), 0.0));
  for (std::size_t i = 0; i < x.size(); ++i) {
    std::vector<double> d(c.size());
    for (std::size_t p = 0; p < c.size(); ++p) d[p] = std::sqrt(sq_distance(x[i], c[p]));
    std::size_t zero = c.size();
    for (std::size_t p = 0; p < c.size() && zero == c.size(); ++p) {
      if (d[p] == 0.0) zero = p;
    }
    if (zero != c.size()) {
      u[i][zero] = 1.0;
      continue;
    }
    for (std::size_t p = 0; p < c.size(); ++p) {
      double denom = 0.0;
      for (std::size_t j = 0; j < c.size(); ++j) denom += std::pow(d[p] / d[j], 2.0 / (m - 1.0));
      u[i][p] = 1.0 / denom;
    }
  }
  return u;
}

inline Matrix fcm_centroids(const Matrix& x, const Matrix& u, double m, const Matrix& previous) {
  Matrix c = previous;
  for (std::size_t p = 0; p < previous.size(); ++p) {
    double mass = 0.0;
    std::vector<double> acc(x[0].size(), 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double w = std::pow(u[i][p], m);
      mass += w;
      for (std::size_t d = 0; d < acc.size(); ++d) acc[d] += w * x[i][d];
    }
    if (mass > 0.0) {
      for (std::size_t d = 0; d < acc.size(); ++d) c[p][d] = acc[d] / mass;
    }
  }
  return c;
}

struct FcmResult {
  Matrix centroids;
  Matrix memberships;
  std::vector<std::vector<std::size_t>> top;
};

inline FcmResult fuzzy_cmeans(const Matrix& x, std::size_t P, std::size_t K, double m,
                              std::size_t iterations) {
  const std::size_t n = x.size();
  Matrix c;
  for (std::size_t p = 0; p < P; ++p) c.push_back(x[p * n / P]);
  for (std::size_t it = 0; it < iterations; ++it) c = fcm_centroids(x, fcm_memberships(x, c, m), m, c);
  FcmResult r{c, fcm_memberships(x, c, m), {}};
  for (const auto& row : r.memberships) {
    std::vector<std::size_t> order(P);
    for (std::size_t p = 0; p < P; ++p) order[p] = p;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return std::pow(row[a], m) > std::pow(row[b], m);
    });
    r.top.emplace_back(order.begin(), order.begin() + std::ptrdiff_t(K));
  }
  return r;
}

// ---------------------------------------------------------------------------
// k-NN by full sort
// ---------------------------------------------------------------------------

inline std::vector<std::vector<std::size_t>> knn(const Matrix& x, std::size_t k) {
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t i = 0; i < x.size(); ++i) {
    std::vector<std::pair<double, std::size_t>> all;
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (j != i) all.emplace_back(sq_distance(x[i], x[j]), j);
    }
    std::sort(all.begin(), all.end());
    std::vector<std::size_t> ids;
    for (std::size_t j = 0; j < k; ++j) ids.push_back(all[j].second);
    out.push_back(ids);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Straight-line graph convolution
// ---------------------------------------------------------------------------

inline double gelu(double v) { return 0.5 * v * (1.0 + std::erf(v / std::sqrt(2.0))); }

// set rows minus center, max per column
inline std::vector<double> max_relative(const std::vector<double>& center, const Matrix& set) {
  std::vector<double> out(center.size(), -INFINITY);
  for (const auto& row : set) {
    for (std::size_t d = 0; d < center.size(); ++d) out[d] = std::max(out[d], row[d] - center[d]);
  }
  return out;
}

// y = x_i + proj(gelu(sigma(x_i ++ local ++ higher))); weights are [in][out].
inline Matrix lhg_conv(const Matrix& x, const std::vector<std::vector<std::size_t>>* neighbors,
                       const Matrix* centroids, const std::vector<std::vector<std::size_t>>* higher,
                       const Matrix& sigma_w, const std::vector<double>& sigma_b,
                       const Matrix& proj_w, const std::vector<double>& proj_b) {
  Matrix y;
  for (std::size_t i = 0; i < x.size(); ++i) {
    std::vector<double> concat = x[i];
    if (neighbors) {
      Matrix set;
      for (std::size_t j : (*neighbors)[i]) set.push_back(x[j]);
      const auto part = max_relative(x[i], set);
      concat.insert(concat.end(), part.begin(), part.end());
    }
    if (higher) {
      Matrix set;
      for (std::size_t p : (*higher)[i]) set.push_back((*centroids)[p]);
      const auto part = max_relative(x[i], set);
      concat.insert(concat.end(), part.begin(), part.end());
    }
    std::vector<double> hidden(sigma_b);
    for (std::size_t o = 0; o < hidden.size(); ++o) {
      for (std::size_t r = 0; r < concat.size(); ++r) hidden[o] += concat[r] * sigma_w[r][o];
      hidden[o] = gelu(hidden[o]);
    }
    std::vector<double> out(proj_b);
    for (std::size_t o = 0; o < out.size(); ++o) {
      for (std::size_t r = 0; r < hidden.size(); ++r) out[o] += hidden[r] * proj_w[r][o];
      out[o] += x[i][o];
    }
    y.push_back(out);
  }
  return y;
}

// ---------------------------------------------------------------------------
// Ranking metrics
// ---------------------------------------------------------------------------

// Rank of every item: 1 + number of items strictly ahead of it (higher score,
// or equal score and lower index).
inline std::vector<std::size_t> ranks(const std::vector<double>& scores) {
  std::vector<std::size_t> r(scores.size(), 1);
  for (std::size_t i = 0; i < scores.size(); ++i) {
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (scores[j] > scores[i] || (scores[j] == scores[i] && j < i)) ++r[i];
    }
  }
  return r;
}

// Returns a negative value when the class has no positives.
inline double average_precision(const std::vector<double>& scores, const std::vector<double>& labels) {
  const auto r = ranks(scores);
  std::vector<std::size_t> positive_ranks;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (labels[i] >= 0.5) positive_ranks.push_back(r[i]);
  }
  if (positive_ranks.empty()) return -1.0;
  std::sort(positive_ranks.begin(), positive_ranks.end());
  double sum = 0.0;
  for (std::size_t h = 0; h < positive_ranks.size(); ++h) {
    // Positives ranked at or before this one: exactly h + 1.
    sum += double(h + 1) / double(positive_ranks[h]);
  }
  return sum / double(positive_ranks.size());
}

inline double mean_average_precision(const Matrix& scores, const Matrix& labels) {
  double total = 0.0;
  std::size_t counted = 0;
  for (std::size_t c = 0; c < scores[0].size(); ++c) {
    std::vector<double> s, l;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      s.push_back(scores[i][c]);
      l.push_back(labels[i][c]);
    }
    const double ap = average_precision(s, l);
    if (ap >= 0.0) {
      total += ap;
      ++counted;
    }
  }
  return total / double(counted);
}

inline double accuracy(const Matrix& scores, const Matrix& labels) {
  std::size_t hits = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    auto argmax = [](const std::vector<double>& v) {
      std::size_t best = 0;
      for (std::size_t j = 1; j < v.size(); ++j) {
        if (v[j] > v[best]) best = j;
      }
      return best;
    };
    if (argmax(scores[i]) == argmax(labels[i])) ++hits;
  }
  return double(hits) / double(scores.size());
}

// ---------------------------------------------------------------------------
// Frontend
// ---------------------------------------------------------------------------

// Centre frequencies of HTK triangular filters evenly spaced in mel between
// low and high.
inline std::vector<double> mel_centers(std::size_t bands, double low, double high) {
  auto to_mel = [](double f) { return 2595.0 * std::log10(1.0 + f / 700.0); };
  auto to_hz = [](double m) { return 700.0 * (std::pow(10.0, m / 2595.0) - 1.0); };
  std::vector<double> out;
  const double lo = to_mel(low), hi = to_mel(high);
  for (std::size_t b = 1; b <= bands; ++b) out.push_back(to_hz(lo + (hi - lo) * double(b) / double(bands + 1)));
  return out;
}

// ---------------------------------------------------------------------------
// Finite differences
// ---------------------------------------------------------------------------

// Central difference of f at theta along each coordinate, step eps*(1+|theta|).
inline std::vector<double> numeric_gradient(const std::function<double()>& f,
                                            std::vector<double*> coords, double eps) {
  std::vector<double> g;
  for (double* p : coords) {
    const double original = *p;
    const double h = eps * (1.0 + std::abs(original));
    *p = original + h;
    const double plus = f();
    *p = original - h;
    const double minus = f();
    *p = original;
    g.push_back((plus - minus) / (2.0 * h));
  }
  return g;
}

inline double relative_error(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-8});
}

}  // namespace oracle

#endif  // LHGNN_TESTS_ORACLES_HPP_
