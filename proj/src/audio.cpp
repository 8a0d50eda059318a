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

#include "lhgnn/audio.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <mutex>
#include <numbers>

#include "lhgnn/binary_io.hpp"

namespace lhgnn {
namespace {

// FFTW's planner is not thread-safe; execution of an existing plan is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

std::string read_tag(std::istream& in, const std::string& what) {
  char tag[4];
  if (!in.read(tag, 4)) throw FormatError("truncated " + what);
  return std::string(tag, 4);
}

}  // namespace

struct MelFrontend::FftPlan {
  std::size_t n;
  double* input;
  fftw_complex* output;
  fftw_plan plan;

  explicit FftPlan(std::size_t size) : n(size) {
    std::lock_guard<std::mutex> lock(planner_mutex());
    input = fftw_alloc_real(n);
    output = fftw_alloc_complex(n / 2 + 1);
    plan = fftw_plan_dft_r2c_1d(int(n), input, output, FFTW_ESTIMATE);
  }
  ~FftPlan() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(plan);
    fftw_free(input);
    fftw_free(output);
  }
};

AudioClip load_wav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open audio file: " + path);
  if (read_tag(in, "RIFF header") != "RIFF") throw FormatError(path + ": not a RIFF file");
  binary::get<std::uint32_t>(in, "RIFF header");
  if (read_tag(in, "RIFF header") != "WAVE") throw FormatError(path + ": not a WAVE file");

  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  bool have_fmt = false;
  std::vector<char> payload;
  while (in.peek() != EOF) {
    const std::string tag = read_tag(in, "chunk header");
    const auto size = binary::get<std::uint32_t>(in, "chunk header");
    if (tag == "fmt ") {
      format = binary::get<std::uint16_t>(in, "fmt chunk");
      channels = binary::get<std::uint16_t>(in, "fmt chunk");
      rate = binary::get<std::uint32_t>(in, "fmt chunk");
      binary::get<std::uint32_t>(in, "fmt chunk");  // byte rate
      binary::get<std::uint16_t>(in, "fmt chunk");  // block align
      bits = binary::get<std::uint16_t>(in, "fmt chunk");
      std::uint32_t consumed = 16;
      if (format == 0xFFFE && size >= 26) {
        binary::get<std::uint16_t>(in, "fmt extension");  // cbSize
        binary::get<std::uint16_t>(in, "fmt extension");  // valid bits
        binary::get<std::uint32_t>(in, "fmt extension");  // channel mask
        format = binary::get<std::uint16_t>(in, "fmt extension");
        consumed = 26;
      }
      in.ignore(std::streamsize(size - consumed + (size & 1)));
      have_fmt = true;
    } else if (tag == "data") {
      payload.resize(size);
      if (!in.read(payload.data(), std::streamsize(size))) {
        throw FormatError(path + ": truncated data chunk");
      }
      if (size & 1) in.ignore(1);
    } else {
      in.ignore(std::streamsize(size + (size & 1)));
    }
  }
  if (!have_fmt) throw FormatError(path + ": missing fmt chunk");
  if (channels == 0 || rate == 0) throw FormatError(path + ": invalid channel count or rate");
  const bool pcm16 = format == 1 && bits == 16;
  const bool float32 = format == 3 && bits == 32;
  if (!pcm16 && !float32) {
    throw FormatError(path + ": unsupported WAV encoding (format " + std::to_string(format) +
                      ", " + std::to_string(bits) + " bits); need 16-bit PCM or 32-bit float");
  }

  const std::size_t bytes_per_sample = bits / 8;
  const std::size_t frames = payload.size() / (bytes_per_sample * channels);
  std::vector<float> mono(frames, 0.0f);
  for (std::size_t f = 0; f < frames; ++f) {
    double acc = 0.0;
    for (std::size_t ch = 0; ch < channels; ++ch) {
      const char* p = payload.data() + (f * channels + ch) * bytes_per_sample;
      if (pcm16) {
        std::int16_t v;
        std::memcpy(&v, p, 2);
        acc += double(binary::byteswap_if_big(v)) / 32768.0;
      } else {
        float v;
        std::memcpy(&v, p, 4);
        acc += double(binary::byteswap_if_big(v));
      }
    }
    mono[f] = float(acc / double(channels));
  }
  AudioClip clip;
  clip.samples = resample_linear(mono, int(rate), kModelSampleRate);
  clip.sample_rate = kModelSampleRate;
  return clip;
}

void write_wav(const std::string& path, const std::vector<float>& interleaved, int channels,
               int sample_rate, int bits_per_sample) {
  if (channels <= 0 || sample_rate <= 0 || interleaved.size() % std::size_t(channels)) {
    throw ParameterError("write_wav: inconsistent channel layout");
  }
  if (bits_per_sample != 16 && bits_per_sample != 32) {
    throw ParameterError("write_wav supports 16-bit PCM and 32-bit float");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path);
  const std::uint32_t bytes = std::uint32_t(interleaved.size() * std::size_t(bits_per_sample / 8));
  const std::uint16_t block = std::uint16_t(channels * bits_per_sample / 8);
  out.write("RIFF", 4);
  binary::put<std::uint32_t>(out, 36 + bytes);
  out.write("WAVEfmt ", 8);
  binary::put<std::uint32_t>(out, 16);
  binary::put<std::uint16_t>(out, bits_per_sample == 16 ? 1 : 3);
  binary::put<std::uint16_t>(out, std::uint16_t(channels));
  binary::put<std::uint32_t>(out, std::uint32_t(sample_rate));
  binary::put<std::uint32_t>(out, std::uint32_t(sample_rate) * block);
  binary::put<std::uint16_t>(out, block);
  binary::put<std::uint16_t>(out, std::uint16_t(bits_per_sample));
  out.write("data", 4);
  binary::put<std::uint32_t>(out, bytes);
  for (float v : interleaved) {
    if (bits_per_sample == 16) {
      const double scaled = std::clamp(double(v), -1.0, 32767.0 / 32768.0) * 32768.0;
      binary::put<std::int16_t>(out, std::int16_t(std::lround(scaled)));
    } else {
      binary::put<float>(out, v);
    }
  }
}

std::vector<float> resample_linear(const std::vector<float>& samples, int from_rate,
                                   int to_rate) {
  if (from_rate <= 0 || to_rate <= 0) throw ParameterError("sample rates must be positive");
  if (from_rate == to_rate) return samples;
  const std::size_t n_out = std::size_t(std::uint64_t(samples.size()) *
                                        std::uint64_t(to_rate) / std::uint64_t(from_rate));
  std::vector<float> out(n_out);
  const double step = double(from_rate) / double(to_rate);
  for (std::size_t j = 0; j < n_out; ++j) {
    const double pos = double(j) * step;
    const std::size_t i0 = std::size_t(pos);
    const double frac = pos - double(i0);
    const float a = samples[i0];
    const float b = i0 + 1 < samples.size() ? samples[i0 + 1] : a;
    out[j] = float(double(a) + frac * (double(b) - double(a)));
  }
  return out;
}

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

MelFrontend::MelFrontend(MelOptions options) : options_(options) {
  if (options_.window == 0 || options_.hop == 0 || options_.fft_size < options_.window ||
      options_.num_mels == 0 || !(options_.high_hz > options_.low_hz) ||
      !(options_.log_floor > 0.0)) {
    throw ParameterError("invalid mel frontend options");
  }
  const std::size_t bins = options_.fft_size / 2 + 1;
  window_.resize(options_.window);
  for (std::size_t i = 0; i < options_.window; ++i) {
    window_[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * double(i) / double(options_.window));
  }
  const double mel_lo = hz_to_mel(options_.low_hz), mel_hi = hz_to_mel(options_.high_hz);
  std::vector<double> edges(options_.num_mels + 2);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    edges[i] = mel_to_hz(mel_lo + (mel_hi - mel_lo) * double(i) / double(options_.num_mels + 1));
  }
  filterbank_ = Tensor<double>({options_.num_mels, bins});
  for (std::size_t m = 0; m < options_.num_mels; ++m) {
    const double left = edges[m], center = edges[m + 1], right = edges[m + 2];
    for (std::size_t k = 0; k < bins; ++k) {
      const double f = double(k) * double(options_.sample_rate) / double(options_.fft_size);
      const double rise = (f - left) / (center - left);
      const double fall = (right - f) / (right - center);
      filterbank_(m, k) = std::max(0.0, std::min(rise, fall));
    }
  }
  plan_ = std::make_unique<FftPlan>(options_.fft_size);
}

MelFrontend::~MelFrontend() = default;

std::size_t MelFrontend::frame_count(std::size_t num_samples) const {
  if (num_samples < options_.window) return 1;
  return 1 + (num_samples - options_.window) / options_.hop;
}

std::vector<double> MelFrontend::center_frequencies() const {
  const double mel_lo = hz_to_mel(options_.low_hz), mel_hi = hz_to_mel(options_.high_hz);
  std::vector<double> out(options_.num_mels);
  for (std::size_t m = 0; m < options_.num_mels; ++m) {
    out[m] = mel_to_hz(mel_lo + (mel_hi - mel_lo) * double(m + 1) / double(options_.num_mels + 1));
  }
  return out;
}

Tensor<double> MelFrontend::mel_energies(const std::vector<float>& samples) const {
  const std::size_t frames = frame_count(samples.size());
  const std::size_t bins = options_.fft_size / 2 + 1;
  Tensor<double> out({frames, options_.num_mels});
  std::vector<double> power(bins);
  for (std::size_t t = 0; t < frames; ++t) {
    const std::size_t start = t * options_.hop;
    std::fill(plan_->input, plan_->input + plan_->n, 0.0);
    for (std::size_t i = 0; i < options_.window; ++i) {
      const std::size_t s = start + i;
      const double v = s < samples.size() ? double(samples[s]) : 0.0;
      plan_->input[i] = v * window_[i];
    }
    fftw_execute(plan_->plan);
    for (std::size_t k = 0; k < bins; ++k) {
      power[k] = plan_->output[k][0] * plan_->output[k][0] + plan_->output[k][1] * plan_->output[k][1];
    }
    for (std::size_t m = 0; m < options_.num_mels; ++m) {
      double acc = 0.0;
      for (std::size_t k = 0; k < bins; ++k) acc += filterbank_(m, k) * power[k];
      out(t, m) = acc;
    }
  }
  return out;
}

LogMel MelFrontend::logmel(const AudioClip& clip) const {
  if (clip.sample_rate != options_.sample_rate) {
    throw ParameterError("logmel expects " + std::to_string(options_.sample_rate) +
                         " Hz audio, got " + std::to_string(clip.sample_rate));
  }
  const Tensor<double> energies = mel_energies(clip.samples);
  const std::size_t target = options_.target_frames, mels = options_.num_mels;
  LogMel out;
  out.valid_frames = std::min(energies.dim(0), target);
  out.frames = Tensor<float>({target, mels}, float(std::log(options_.log_floor)));
  for (std::size_t t = 0; t < out.valid_frames; ++t) {
    for (std::size_t m = 0; m < mels; ++m) {
      out.frames(t, m) = float(std::log(energies(t, m) + options_.log_floor));
    }
  }
  return out;
}

LogMel normalize(const LogMel& x, double mean, double std) {
  if (!(std > 0.0)) throw ParameterError("normalize: std must be positive");
  LogMel out = x;
  for (auto& v : out.frames.data()) v = float((double(v) - mean) / std);
  return out;
}

void write_feature_cache(const std::string& path, const Tensor<float>& frames) {
  if (frames.rank() != 2) throw DimensionError("feature cache holds [T, n_mels] matrices");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path);
  out.write("LMEL", 4);
  binary::put<std::uint32_t>(out, 1);
  binary::put<std::uint32_t>(out, std::uint32_t(frames.dim(0)));
  binary::put<std::uint32_t>(out, std::uint32_t(frames.dim(1)));
  for (float v : frames.data()) binary::put<float>(out, v);
  if (!out) throw FormatError("failed writing " + path);
}

Tensor<float> read_feature_cache(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open feature cache: " + path);
  if (read_tag(in, "feature cache header") != "LMEL") throw FormatError(path + ": bad magic");
  const auto version = binary::get<std::uint32_t>(in, "feature cache header");
  if (version != 1) throw FormatError(path + ": unsupported version " + std::to_string(version));
  const auto frames = binary::get<std::uint32_t>(in, "feature cache header");
  const auto mels = binary::get<std::uint32_t>(in, "feature cache header");
  if (frames == 0 || mels == 0) throw FormatError(path + ": empty feature matrix");
  Tensor<float> out({frames, mels});
  for (auto& v : out.data()) v = binary::get<float>(in, "feature cache payload");
  return out;
}

}  // namespace lhgnn
