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

#include "lhgnn/ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace lhgnn::ops {
namespace {

template <typename T>
bool wants_grad(const Var<T>& v) {
  return v && v->requires_grad;
}

template <typename T>
void require_rank(const Tensor<T>& t, std::size_t rank, const char* what) {
  if (t.rank() != rank) {
    throw DimensionError(std::string(what) + ": expected rank " +
                         std::to_string(rank) + ", got " + shape_string(t.shape()));
  }
}

template <typename T>
void require_same_shape(const Tensor<T>& a, const Tensor<T>& b, const char* what) {
  if (a.shape() != b.shape()) {
    throw DimensionError(std::string(what) + ": shape mismatch " +
                         shape_string(a.shape()) + " vs " + shape_string(b.shape()));
  }
}

// c[M,N] += a[M,K] * b[K,N]
template <typename T>
void gemm_nn(const T* a, const T* b, T* c, std::size_t m, std::size_t k,
             std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    T* crow = c + i * n;
    const T* arow = a + i * k;
    for (std::size_t p = 0; p < k; ++p) {
      const T av = arow[p];
      if (av == T{0}) continue;
      const T* brow = b + p * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

// c[M,K] += g[M,N] * b[K,N]^T
template <typename T>
void gemm_nt(const T* g, const T* b, T* c, std::size_t m, std::size_t k,
             std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    const T* grow = g + i * n;
    T* crow = c + i * k;
    for (std::size_t p = 0; p < k; ++p) {
      const T* brow = b + p * n;
      T acc = 0;
      for (std::size_t j = 0; j < n; ++j) acc += grow[j] * brow[j];
      crow[p] += acc;
    }
  }
}

// c[K,N] += a[M,K]^T * g[M,N]
template <typename T>
void gemm_tn(const T* a, const T* g, T* c, std::size_t m, std::size_t k,
             std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    const T* arow = a + i * k;
    const T* grow = g + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const T av = arow[p];
      if (av == T{0}) continue;
      T* crow = c + p * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += av * grow[j];
    }
  }
}

template <typename T>
T gelu_value(T x) {
  return T(0.5) * x * (T(1) + std::erf(x / std::numbers::sqrt2_v<T>));
}

template <typename T>
T gelu_derivative(T x) {
  const T cdf = T(0.5) * (T(1) + std::erf(x / std::numbers::sqrt2_v<T>));
  const T pdf = std::exp(T(-0.5) * x * x) * std::numbers::inv_sqrtpi_v<T> /
                std::numbers::sqrt2_v<T>;
  return cdf + x * pdf;
}

}  // namespace

template <typename T>
Var<T> matmul(Tape<T>& tape, const Var<T>& a, const Var<T>& b) {
  return linear<T>(tape, a, b, nullptr);
}

template <typename T>
Var<T> linear(Tape<T>& tape, const Var<T>& x, const Var<T>& w, const Var<T>& bias) {
  const auto& xv = x->value;
  const auto& wv = w->value;
  require_rank(xv, 2, "linear input");
  require_rank(wv, 2, "linear weight");
  const std::size_t m = xv.dim(0), k = xv.dim(1), n = wv.dim(1);
  if (wv.dim(0) != k) {
    throw DimensionError("matmul inner extents differ: " + shape_string(xv.shape()) +
                         " x " + shape_string(wv.shape()));
  }
  if (bias && (bias->value.rank() != 1 || bias->value.dim(0) != n)) {
    throw DimensionError("linear bias must have shape [" + std::to_string(n) + "]");
  }
  Tensor<T> out({m, n});
  if (bias) {
    for (std::size_t i = 0; i < m; ++i) {
      std::copy(bias->value.data().begin(), bias->value.data().end(), out.row(i));
    }
  }
  gemm_nn(xv.data().data(), wv.data().data(), out.data().data(), m, k, n);
  return tape.record(std::move(out), {x, w, bias}, [x, w, bias, m, k, n](const Tensor<T>& g) {
    if (wants_grad(x)) {
      gemm_nt(g.data().data(), w->value.data().data(),
              x->grad_buffer().data().data(), m, k, n);
    }
    if (wants_grad(w)) {
      gemm_tn(x->value.data().data(), g.data().data(),
              w->grad_buffer().data().data(), m, k, n);
    }
    if (wants_grad(bias)) {
      auto& gb = bias->grad_buffer();
      for (std::size_t i = 0; i < m; ++i) {
        const T* grow = g.row(i);
        for (std::size_t j = 0; j < n; ++j) gb[j] += grow[j];
      }
    }
  });
}

template <typename T>
Var<T> add(Tape<T>& tape, const Var<T>& a, const Var<T>& b) {
  require_same_shape(a->value, b->value, "add");
  Tensor<T> out = a->value;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += b->value[i];
  return tape.record(std::move(out), {a, b}, [a, b](const Tensor<T>& g) {
    for (const auto* p : {&a, &b}) {
      if (!wants_grad(*p)) continue;
      auto& gb = (*p)->grad_buffer();
      for (std::size_t i = 0; i < g.size(); ++i) gb[i] += g[i];
    }
  });
}

template <typename T>
Var<T> scale(Tape<T>& tape, const Var<T>& a, T factor) {
  Tensor<T> out = a->value;
  for (auto& v : out.data()) v *= factor;
  return tape.record(std::move(out), {a}, [a, factor](const Tensor<T>& g) {
    auto& ga = a->grad_buffer();
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += factor * g[i];
  });
}

template <typename T>
Var<T> reshape(Tape<T>& tape, const Var<T>& a, Shape shape) {
  Tensor<T> out = a->value.reshaped(std::move(shape));
  return tape.record(std::move(out), {a}, [a](const Tensor<T>& g) {
    auto& ga = a->grad_buffer();
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
  });
}

template <typename T>
Var<T> gelu(Tape<T>& tape, const Var<T>& a) {
  Tensor<T> out = a->value;
  for (auto& v : out.data()) v = gelu_value(v);
  return tape.record(std::move(out), {a}, [a](const Tensor<T>& g) {
    auto& ga = a->grad_buffer();
    const auto& x = a->value;
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * gelu_derivative(x[i]);
  });
}

template <typename T>
Var<T> conv2d(Tape<T>& tape, const Var<T>& x, const Var<T>& w, const Var<T>& bias,
              const Conv2dOptions& options) {
  const auto& xv = x->value;
  const auto& wv = w->value;
  require_rank(xv, 4, "conv2d input");
  require_rank(wv, 4, "conv2d weight");
  const std::size_t batch = xv.dim(0), in_h = xv.dim(1), in_w = xv.dim(2),
                    in_c = xv.dim(3);
  const std::size_t kh = wv.dim(0), kw = wv.dim(1);
  const std::size_t out_c = wv.dim(3);
  if (options.depthwise) {
    if (wv.dim(2) != 1 || out_c != in_c) {
      throw DimensionError("depthwise conv2d needs weight [kh,kw,1,C] with C = " +
                           std::to_string(in_c));
    }
  } else if (wv.dim(2) != in_c) {
    throw DimensionError("conv2d weight input channels " + std::to_string(wv.dim(2)) +
                         " != input channels " + std::to_string(in_c));
  }
  if (bias && (bias->value.rank() != 1 || bias->value.dim(0) != out_c)) {
    throw DimensionError("conv2d bias must have shape [" + std::to_string(out_c) + "]");
  }
  const std::size_t stride = options.stride, pad = options.padding;
  const std::size_t out_h = conv_out_extent(in_h, kh, stride, pad);
  const std::size_t out_w = conv_out_extent(in_w, kw, stride, pad);

  // Visits every (output pixel, kernel tap) pair that lands inside the input.
  auto for_each_tap = [=](auto&& fn) {
    for (std::size_t b = 0; b < batch; ++b) {
      for (std::size_t oy = 0; oy < out_h; ++oy) {
        for (std::size_t ox = 0; ox < out_w; ++ox) {
          const std::size_t out_off = ((b * out_h + oy) * out_w + ox) * out_c;
          for (std::size_t ky = 0; ky < kh; ++ky) {
            const std::ptrdiff_t iy = std::ptrdiff_t(oy * stride + ky) - std::ptrdiff_t(pad);
            if (iy < 0 || iy >= std::ptrdiff_t(in_h)) continue;
            for (std::size_t kx = 0; kx < kw; ++kx) {
              const std::ptrdiff_t ix = std::ptrdiff_t(ox * stride + kx) - std::ptrdiff_t(pad);
              if (ix < 0 || ix >= std::ptrdiff_t(in_w)) continue;
              const std::size_t in_off = ((b * in_h + std::size_t(iy)) * in_w + std::size_t(ix)) * in_c;
              fn(out_off, in_off, ky * kw + kx);
            }
          }
        }
      }
    }
  };

  Tensor<T> out({batch, out_h, out_w, out_c});
  T* o = out.data().data();
  const T* xp = xv.data().data();
  const T* wp = wv.data().data();
  if (bias) {
    const T* bp = bias->value.data().data();
    for (std::size_t i = 0; i < out.size(); i += out_c) std::copy(bp, bp + out_c, o + i);
  }
  const bool depthwise = options.depthwise;
  for_each_tap([&](std::size_t out_off, std::size_t in_off, std::size_t tap) {
    T* orow = o + out_off;
    const T* xrow = xp + in_off;
    if (depthwise) {
      const T* wrow = wp + tap * in_c;
      for (std::size_t c = 0; c < in_c; ++c) orow[c] += xrow[c] * wrow[c];
    } else {
      const T* wtap = wp + tap * in_c * out_c;
      for (std::size_t ci = 0; ci < in_c; ++ci) {
        const T xv_ci = xrow[ci];
        if (xv_ci == T{0}) continue;
        const T* wrow = wtap + ci * out_c;
        for (std::size_t co = 0; co < out_c; ++co) orow[co] += xv_ci * wrow[co];
      }
    }
  });

  return tape.record(std::move(out), {x, w, bias},
                     [x, w, bias, for_each_tap, in_c, out_c, depthwise](const Tensor<T>& g) {
    const T* gp = g.data().data();
    const T* xp = x->value.data().data();
    const T* wp = w->value.data().data();
    T* gx = wants_grad(x) ? x->grad_buffer().data().data() : nullptr;
    T* gw = wants_grad(w) ? w->grad_buffer().data().data() : nullptr;
    for_each_tap([&](std::size_t out_off, std::size_t in_off, std::size_t tap) {
      const T* grow = gp + out_off;
      const T* xrow = xp + in_off;
      if (depthwise) {
        const T* wrow = wp + tap * in_c;
        if (gx) {
          for (std::size_t c = 0; c < in_c; ++c) gx[in_off + c] += grow[c] * wrow[c];
        }
        if (gw) {
          T* gwrow = gw + tap * in_c;
          for (std::size_t c = 0; c < in_c; ++c) gwrow[c] += grow[c] * xrow[c];
        }
        return;
      }
      const T* wtap = wp + tap * in_c * out_c;
      for (std::size_t ci = 0; ci < in_c; ++ci) {
        const T* wrow = wtap + ci * out_c;
        if (gx) {
          T acc = 0;
          for (std::size_t co = 0; co < out_c; ++co) acc += grow[co] * wrow[co];
          gx[in_off + ci] += acc;
        }
        if (gw) {
          const T xv_ci = xrow[ci];
          if (xv_ci == T{0}) continue;
          T* gwrow = gw + (tap * in_c + ci) * out_c;
          for (std::size_t co = 0; co < out_c; ++co) gwrow[co] += xv_ci * grow[co];
        }
      }
    });
    if (wants_grad(bias)) {
      auto& gb = bias->grad_buffer();
      for (std::size_t i = 0; i < g.size(); i += out_c) {
        for (std::size_t c = 0; c < out_c; ++c) gb[c] += gp[i + c];
      }
    }
  });
}

template <typename T>
Var<T> batch_norm(Tape<T>& tape, const Var<T>& x, const Var<T>& gamma,
                  const Var<T>& beta, const BatchNormState<T>& state) {
  const auto& xv = x->value;
  const std::size_t channels = xv.shape().back();
  const std::size_t rows = xv.size() / channels;
  if (gamma->value.size() != channels || beta->value.size() != channels) {
    throw DimensionError("batch_norm affine size does not match channel count " +
                         std::to_string(channels));
  }
  if (!state.running_mean || !state.running_var ||
      state.running_mean->size() != channels || state.running_var->size() != channels) {
    throw DimensionError("batch_norm running statistics missing or mis-sized");
  }
  std::vector<T> mean(channels, T{0}), inv_std(channels, T{0});
  if (tape.training()) {
    std::vector<double> acc(channels, 0.0), acc2(channels, 0.0);
    for (std::size_t r = 0; r < rows; ++r) {
      const T* xr = xv.data().data() + r * channels;
      for (std::size_t c = 0; c < channels; ++c) acc[c] += xr[c];
    }
    for (std::size_t c = 0; c < channels; ++c) acc[c] /= double(rows);
    for (std::size_t r = 0; r < rows; ++r) {
      const T* xr = xv.data().data() + r * channels;
      for (std::size_t c = 0; c < channels; ++c) {
        const double d = double(xr[c]) - acc[c];
        acc2[c] += d * d;
      }
    }
    auto& rm = *state.running_mean;
    auto& rv = *state.running_var;
    for (std::size_t c = 0; c < channels; ++c) {
      const double var = acc2[c] / double(rows);
      mean[c] = T(acc[c]);
      inv_std[c] = T(1.0 / std::sqrt(var + double(state.eps)));
      const double unbiased = rows > 1 ? acc2[c] / double(rows - 1) : var;
      rm[c] = T((1.0 - double(state.momentum)) * double(rm[c]) +
                double(state.momentum) * acc[c]);
      rv[c] = T((1.0 - double(state.momentum)) * double(rv[c]) +
                double(state.momentum) * unbiased);
    }
  } else {
    for (std::size_t c = 0; c < channels; ++c) {
      mean[c] = (*state.running_mean)[c];
      inv_std[c] = T(1) / std::sqrt((*state.running_var)[c] + state.eps);
    }
  }

  Tensor<T> normalized(xv.shape());
  Tensor<T> out(xv.shape());
  const T* gp = gamma->value.data().data();
  const T* bp = beta->value.data().data();
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < channels; ++c) {
      const std::size_t i = r * channels + c;
      normalized[i] = (xv[i] - mean[c]) * inv_std[c];
      out[i] = gp[c] * normalized[i] + bp[c];
    }
  }
  const bool batch_stats = tape.training();
  return tape.record(std::move(out), {x, gamma, beta},
                     [x, gamma, beta, normalized = std::move(normalized),
                      inv_std = std::move(inv_std), rows, channels,
                      batch_stats](const Tensor<T>& g) {
    std::vector<T> sum_g(channels, T{0}), sum_g_xhat(channels, T{0});
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < channels; ++c) {
        const std::size_t i = r * channels + c;
        sum_g[c] += g[i];
        sum_g_xhat[c] += g[i] * normalized[i];
      }
    }
    if (wants_grad(gamma)) {
      auto& gg = gamma->grad_buffer();
      for (std::size_t c = 0; c < channels; ++c) gg[c] += sum_g_xhat[c];
    }
    if (wants_grad(beta)) {
      auto& gb = beta->grad_buffer();
      for (std::size_t c = 0; c < channels; ++c) gb[c] += sum_g[c];
    }
    if (!wants_grad(x)) return;
    auto& gx = x->grad_buffer();
    const T* gam = gamma->value.data().data();
    const T n = T(rows);
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < channels; ++c) {
        const std::size_t i = r * channels + c;
        if (batch_stats) {
          gx[i] += gam[c] * inv_std[c] *
                   (g[i] - sum_g[c] / n - normalized[i] * sum_g_xhat[c] / n);
        } else {
          gx[i] += gam[c] * inv_std[c] * g[i];
        }
      }
    }
  });
}

template <typename T>
Var<T> global_avg_pool(Tape<T>& tape, const Var<T>& x) {
  const auto& xv = x->value;
  require_rank(xv, 4, "global_avg_pool");
  const std::size_t batch = xv.dim(0), pixels = xv.dim(1) * xv.dim(2),
                    channels = xv.dim(3);
  Tensor<T> out({batch, channels});
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t p = 0; p < pixels; ++p) {
      const T* xr = xv.data().data() + (b * pixels + p) * channels;
      for (std::size_t c = 0; c < channels; ++c) out(b, c) += xr[c];
    }
    for (std::size_t c = 0; c < channels; ++c) out(b, c) /= T(pixels);
  }
  return tape.record(std::move(out), {x}, [x, batch, pixels, channels](const Tensor<T>& g) {
    auto& gx = x->grad_buffer();
    for (std::size_t b = 0; b < batch; ++b) {
      for (std::size_t p = 0; p < pixels; ++p) {
        for (std::size_t c = 0; c < channels; ++c) {
          gx[(b * pixels + p) * channels + c] += g(b, c) / T(pixels);
        }
      }
    }
  });
}

template <typename T>
Var<T> concat_columns(Tape<T>& tape, const std::vector<Var<T>>& parts) {
  if (parts.empty()) throw DimensionError("concat_columns: no inputs");
  const std::size_t rows = parts.front()->value.dim(0);
  std::size_t width = 0;
  for (const auto& p : parts) {
    require_rank(p->value, 2, "concat_columns");
    if (p->value.dim(0) != rows) throw DimensionError("concat_columns: row counts differ");
    width += p->value.dim(1);
  }
  Tensor<T> out({rows, width});
  std::size_t col = 0;
  for (const auto& p : parts) {
    const std::size_t w = p->value.dim(1);
    for (std::size_t r = 0; r < rows; ++r) {
      std::copy(p->value.row(r), p->value.row(r) + w, out.row(r) + col);
    }
    col += w;
  }
  return tape.record(std::move(out), parts, [parts, rows, width](const Tensor<T>& g) {
    std::size_t col = 0;
    for (const auto& p : parts) {
      const std::size_t w = p->value.dim(1);
      if (wants_grad(p)) {
        auto& gp = p->grad_buffer();
        for (std::size_t r = 0; r < rows; ++r) {
          for (std::size_t c = 0; c < w; ++c) gp(r, c) += g(r, col + c);
        }
      }
      col += w;
    }
  });
}

namespace {

// Shared max-relative reduction. Returns the output and the winning candidate
// row for every (node, column).
template <typename T>
std::pair<Tensor<T>, std::vector<std::size_t>> max_relative_rows(
    const Tensor<T>& x, const Tensor<T>& candidates,
    const std::vector<std::size_t>& index, std::size_t per_row) {
  require_rank(x, 2, "max_relative");
  require_rank(candidates, 2, "max_relative candidates");
  const std::size_t rows = x.dim(0), cols = x.dim(1);
  if (per_row == 0) throw ParameterError("max_relative: empty candidate set");
  if (index.size() != rows * per_row) {
    throw DimensionError("max_relative: index table has wrong length");
  }
  if (candidates.dim(1) != cols) {
    throw DimensionError("max_relative: candidate width differs from node width");
  }
  Tensor<T> out({rows, cols});
  std::vector<std::size_t> winner(rows * cols);
  for (std::size_t i = 0; i < rows; ++i) {
    const std::size_t* idx = index.data() + i * per_row;
    T* orow = out.row(i);
    std::size_t* wrow = winner.data() + i * cols;
    if (idx[0] >= candidates.dim(0)) throw DimensionError("max_relative: index out of range");
    const T* first = candidates.row(idx[0]);
    for (std::size_t c = 0; c < cols; ++c) {
      orow[c] = first[c];
      wrow[c] = idx[0];
    }
    for (std::size_t j = 1; j < per_row; ++j) {
      if (idx[j] >= candidates.dim(0)) throw DimensionError("max_relative: index out of range");
      const T* cand = candidates.row(idx[j]);
      for (std::size_t c = 0; c < cols; ++c) {
        if (cand[c] > orow[c]) {
          orow[c] = cand[c];
          wrow[c] = idx[j];
        }
      }
    }
    const T* xr = x.row(i);
    for (std::size_t c = 0; c < cols; ++c) orow[c] -= xr[c];
  }
  return {std::move(out), std::move(winner)};
}

}  // namespace

template <typename T>
Var<T> max_relative_gather(Tape<T>& tape, const Var<T>& x,
                           const std::vector<std::size_t>& index, std::size_t per_row) {
  auto [out, winner] = max_relative_rows(x->value, x->value, index, per_row);
  const std::size_t cols = x->value.dim(1);
  return tape.record(std::move(out), {x}, [x, winner = std::move(winner), cols](const Tensor<T>& g) {
    auto& gx = x->grad_buffer();
    const std::size_t rows = g.dim(0);
    for (std::size_t i = 0; i < rows; ++i) {
      for (std::size_t c = 0; c < cols; ++c) {
        const T gv = g(i, c);
        gx(winner[i * cols + c], c) += gv;
        gx(i, c) -= gv;
      }
    }
  });
}

template <typename T>
Var<T> max_relative_to_set(Tape<T>& tape, const Var<T>& x, const Tensor<T>& set,
                           const std::vector<std::size_t>& index, std::size_t per_row) {
  auto out = max_relative_rows(x->value, set, index, per_row).first;
  return tape.record(std::move(out), {x}, [x](const Tensor<T>& g) {
    auto& gx = x->grad_buffer();
    for (std::size_t i = 0; i < g.size(); ++i) gx[i] -= g[i];
  });
}

template <typename T>
Var<T> sum(Tape<T>& tape, const Var<T>& a) {
  T total = 0;
  for (T v : a->value.data()) total += v;
  return tape.record(Tensor<T>({1}, std::vector<T>{total}), {a}, [a](const Tensor<T>& g) {
    auto& ga = a->grad_buffer();
    for (auto& v : ga.data()) v += g[0];
  });
}

template <typename T>
Var<T> weighted_sum(Tape<T>& tape, const Var<T>& a, const Tensor<T>& weights) {
  require_same_shape(a->value, weights, "weighted_sum");
  T total = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) total += a->value[i] * weights[i];
  return tape.record(Tensor<T>({1}, std::vector<T>{total}), {a}, [a, weights](const Tensor<T>& g) {
    auto& ga = a->grad_buffer();
    for (std::size_t i = 0; i < weights.size(); ++i) ga[i] += g[0] * weights[i];
  });
}

template <typename T>
Var<T> half_sum_squares(Tape<T>& tape, const Var<T>& a) {
  T total = 0;
  for (T v : a->value.data()) total += v * v;
  return tape.record(Tensor<T>({1}, std::vector<T>{T(0.5) * total}), {a}, [a](const Tensor<T>& g) {
    auto& ga = a->grad_buffer();
    for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += g[0] * a->value[i];
  });
}

template <typename T>
Var<T> bce_with_logits(Tape<T>& tape, const Var<T>& logits, const Tensor<T>& targets) {
  require_same_shape(logits->value, targets, "bce_with_logits");
  const auto& z = logits->value;
  const T n = T(z.size());
  T total = 0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    total += std::max(z[i], T{0}) - z[i] * targets[i] + std::log1p(std::exp(-std::abs(z[i])));
  }
  return tape.record(Tensor<T>({1}, std::vector<T>{total / n}), {logits},
                     [logits, targets, n](const Tensor<T>& g) {
    auto& gz = logits->grad_buffer();
    const auto& z = logits->value;
    for (std::size_t i = 0; i < z.size(); ++i) {
      const T p = z[i] >= 0 ? T(1) / (T(1) + std::exp(-z[i]))
                            : std::exp(z[i]) / (T(1) + std::exp(z[i]));
      gz[i] += g[0] * (p - targets[i]) / n;
    }
  });
}

template <typename T>
Var<T> softmax_cross_entropy(Tape<T>& tape, const Var<T>& logits,
                             const Tensor<T>& targets) {
  require_same_shape(logits->value, targets, "softmax_cross_entropy");
  require_rank(targets, 2, "softmax_cross_entropy");
  const auto& z = logits->value;
  const std::size_t rows = z.dim(0), classes = z.dim(1);
  Tensor<T> probs({rows, classes});
  T total = 0;
  for (std::size_t r = 0; r < rows; ++r) {
    const T* zr = z.row(r);
    const T peak = *std::max_element(zr, zr + classes);
    T denom = 0;
    for (std::size_t c = 0; c < classes; ++c) denom += std::exp(zr[c] - peak);
    const T lse = peak + std::log(denom);
    for (std::size_t c = 0; c < classes; ++c) {
      probs(r, c) = std::exp(zr[c] - lse);
      total += targets(r, c) * (lse - zr[c]);
    }
  }
  return tape.record(Tensor<T>({1}, std::vector<T>{total / T(rows)}), {logits},
                     [logits, targets, probs = std::move(probs), rows, classes](const Tensor<T>& g) {
    auto& gz = logits->grad_buffer();
    for (std::size_t r = 0; r < rows; ++r) {
      T mass = 0;
      for (std::size_t c = 0; c < classes; ++c) mass += targets(r, c);
      for (std::size_t c = 0; c < classes; ++c) {
        gz(r, c) += g[0] * (probs(r, c) * mass - targets(r, c)) / T(rows);
      }
    }
  });
}

#define LHGNN_INSTANTIATE_OPS(T)                                                    \
  template Var<T> matmul(Tape<T>&, const Var<T>&, const Var<T>&);                   \
  template Var<T> linear(Tape<T>&, const Var<T>&, const Var<T>&, const Var<T>&);    \
  template Var<T> add(Tape<T>&, const Var<T>&, const Var<T>&);                      \
  template Var<T> scale(Tape<T>&, const Var<T>&, T);                                \
  template Var<T> reshape(Tape<T>&, const Var<T>&, Shape);                          \
  template Var<T> gelu(Tape<T>&, const Var<T>&);                                    \
  template Var<T> conv2d(Tape<T>&, const Var<T>&, const Var<T>&, const Var<T>&,     \
                         const Conv2dOptions&);                                     \
  template Var<T> batch_norm(Tape<T>&, const Var<T>&, const Var<T>&, const Var<T>&, \
                             const BatchNormState<T>&);                             \
  template Var<T> global_avg_pool(Tape<T>&, const Var<T>&);                         \
  template Var<T> concat_columns(Tape<T>&, const std::vector<Var<T>>&);             \
  template Var<T> max_relative_gather(Tape<T>&, const Var<T>&,                      \
                                      const std::vector<std::size_t>&, std::size_t); \
  template Var<T> max_relative_to_set(Tape<T>&, const Var<T>&, const Tensor<T>&,    \
                                      const std::vector<std::size_t>&, std::size_t); \
  template Var<T> sum(Tape<T>&, const Var<T>&);                                     \
  template Var<T> weighted_sum(Tape<T>&, const Var<T>&, const Tensor<T>&);          \
  template Var<T> half_sum_squares(Tape<T>&, const Var<T>&);                        \
  template Var<T> bce_with_logits(Tape<T>&, const Var<T>&, const Tensor<T>&);       \
  template Var<T> softmax_cross_entropy(Tape<T>&, const Var<T>&, const Tensor<T>&);

LHGNN_INSTANTIATE_OPS(float)
LHGNN_INSTANTIATE_OPS(double)

#undef LHGNN_INSTANTIATE_OPS

}  // namespace lhgnn::ops
