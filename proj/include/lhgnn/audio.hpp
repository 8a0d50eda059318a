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

#ifndef LHGNN_AUDIO_HPP_
#define LHGNN_AUDIO_HPP_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "lhgnn/tensor.hpp"

namespace lhgnn {

inline constexpr int kModelSampleRate = 16000;

struct AudioClip {
  std::vector<float> samples;  // mono, nominally in [-1, 1]
  int sample_rate = kModelSampleRate;
};

// Reads PCM WAV (16-bit integer or 32-bit float, any channel count), mixes to
// mono and resamples to 16 kHz. Throws FormatError for anything else.
AudioClip load_wav(const std::string& path);

// Writes interleaved samples as 16-bit PCM or 32-bit float WAV.
void write_wav(const std::string& path, const std::vector<float>& interleaved, int channels,
               int sample_rate, int bits_per_sample = 16);

// Linear-interpolation resampler; output length floor(L * to / from).
std::vector<float> resample_linear(const std::vector<float>& samples, int from_rate,
                                   int to_rate);

struct MelOptions {
  int sample_rate = kModelSampleRate;
  std::size_t window = 400;  // 25 ms
  std::size_t hop = 160;     // 10 ms
  std::size_t fft_size = 512;
  std::size_t num_mels = 128;
  double low_hz = 0.0;
  double high_hz = 8000.0;
  double log_floor = 1e-6;
  std::size_t target_frames = 1024;
};

double hz_to_mel(double hz);  // HTK: 2595 log10(1 + f/700)
double mel_to_hz(double mel);

// Log-mel features with the time axis padded (log-floor) or cropped to
// `target_frames`.
struct LogMel {
  Tensor<float> frames;  // [target_frames, num_mels]
  std::size_t valid_frames = 0;
};

class MelFrontend {
 public:
  explicit MelFrontend(MelOptions options = {});
  ~MelFrontend();
  MelFrontend(const MelFrontend&) = delete;
  MelFrontend& operator=(const MelFrontend&) = delete;

  const MelOptions& options() const { return options_; }

  // 1 + floor((L - window) / hop) for L >= window, else 1.
  std::size_t frame_count(std::size_t num_samples) const;

  // [num_mels, fft_size/2 + 1] triangular weights with unit peaks.
  const Tensor<double>& filterbank() const { return filterbank_; }
  std::vector<double> center_frequencies() const;

  // Mel energies before the log and before pad/crop: [frames, num_mels].
  Tensor<double> mel_energies(const std::vector<float>& samples) const;

  LogMel logmel(const AudioClip& clip) const;

 private:
  struct FftPlan;
  MelOptions options_;
  Tensor<double> filterbank_;
  std::vector<double> window_;
  std::unique_ptr<FftPlan> plan_;
};

// (x - mean) / std elementwise; std must be positive.
LogMel normalize(const LogMel& x, double mean, double std);

// Feature cache: "LMEL", u32 version, u32 T, u32 n_mels, T*n_mels f32 LE.
void write_feature_cache(const std::string& path, const Tensor<float>& frames);
Tensor<float> read_feature_cache(const std::string& path);

}  // namespace lhgnn

#endif  // LHGNN_AUDIO_HPP_
