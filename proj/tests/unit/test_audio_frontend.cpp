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

#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "lhgnn/audio.hpp"
#include "lhgnn/dataset.hpp"
#include "lhgnn/errors.hpp"
#include "oracles/oracles.hpp"

using namespace lhgnn;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("lhgnn_test_audio_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

template <typename V>
void put_le(std::ofstream& out, V v) {
  unsigned char bytes[sizeof(V)];
  std::memcpy(bytes, &v, sizeof(V));
  out.write(reinterpret_cast<const char*>(bytes), sizeof(V));
}

// Minimal RIFF writer, independent of the library's.
void write_raw_wav(const fs::path& path, std::uint16_t format, std::uint16_t channels,
                   std::uint32_t rate, std::uint16_t bits, const std::vector<char>& payload) {
  std::ofstream out(path, std::ios::binary);
  out.write("RIFF", 4);
  put_le<std::uint32_t>(out, std::uint32_t(36 + payload.size()));
  out.write("WAVEfmt ", 8);
  put_le<std::uint32_t>(out, 16);
  put_le<std::uint16_t>(out, format);
  put_le<std::uint16_t>(out, channels);
  put_le<std::uint32_t>(out, rate);
  put_le<std::uint32_t>(out, rate * channels * bits / 8);
  put_le<std::uint16_t>(out, std::uint16_t(channels * bits / 8));
  put_le<std::uint16_t>(out, bits);
  out.write("data", 4);
  put_le<std::uint32_t>(out, std::uint32_t(payload.size()));
  out.write(payload.data(), std::streamsize(payload.size()));
}

template <typename V>
std::vector<char> bytes_of(const std::vector<V>& values) {
  std::vector<char> out(values.size() * sizeof(V));
  std::memcpy(out.data(), values.data(), out.size());
  return out;
}

std::vector<float> sine(double hz, std::size_t n, double amplitude = 1.0) {
  std::vector<float> s(n);
  for (std::size_t i = 0; i < n; ++i) {
    s[i] = float(amplitude * std::sin(2.0 * std::numbers::pi * hz * double(i) / 16000.0));
  }
  return s;
}

}  // namespace

TEST_SUITE("load_wav") {
  TEST_CASE("16 kHz mono 16-bit maps to samples / 32768") {
    const auto dir = scratch_dir("pcm16");
    const std::vector<std::int16_t> pcm{0, 1, -1, 32767, -32768, 1234};
    write_raw_wav(dir / "a.wav", 1, 1, 16000, 16, bytes_of(pcm));
    const auto clip = load_wav((dir / "a.wav").string());
    REQUIRE(clip.samples.size() == pcm.size());
    CHECK(clip.sample_rate == 16000);
    for (std::size_t i = 0; i < pcm.size(); ++i) CHECK(clip.samples[i] == float(pcm[i]) / 32768.0f);
  }

  TEST_CASE("stereo is averaged to mono") {
    const auto dir = scratch_dir("stereo");
    const std::vector<std::int16_t> pcm{1000, 3000, -200, 600};
    write_raw_wav(dir / "s.wav", 1, 2, 16000, 16, bytes_of(pcm));
    const auto clip = load_wav((dir / "s.wav").string());
    REQUIRE(clip.samples.size() == 2);
    CHECK(clip.samples[0] == doctest::Approx(2000.0 / 32768.0));
    CHECK(clip.samples[1] == doctest::Approx(200.0 / 32768.0));
  }

  TEST_CASE("32-bit float and 32 kHz resampling") {
    const auto dir = scratch_dir("float");
    const std::size_t n = 800;
    std::vector<float> pcm(2 * n);
    for (std::size_t i = 0; i < pcm.size(); ++i) pcm[i] = float(i) / float(pcm.size());
    write_raw_wav(dir / "f.wav", 3, 1, 32000, 32, bytes_of(pcm));
    const auto clip = load_wav((dir / "f.wav").string());
    CHECK(clip.samples.size() == n);
    CHECK(clip.samples[10] == doctest::Approx(pcm[20]));
  }

  TEST_CASE("compressed or broken containers are rejected") {
    const auto dir = scratch_dir("bad");
    write_raw_wav(dir / "mp3.wav", 0x55, 1, 16000, 16, std::vector<char>(64));
    CHECK_THROWS_AS(load_wav((dir / "mp3.wav").string()), FormatError);
    std::ofstream(dir / "junk.wav") << "not a riff file";
    CHECK_THROWS_AS(load_wav((dir / "junk.wav").string()), FormatError);
    CHECK_THROWS_AS(load_wav((dir / "missing.wav").string()), FormatError);
  }

  TEST_CASE("library writer round trip") {
    const auto dir = scratch_dir("roundtrip");
    const auto s = sine(440.0, 1600, 0.5);
    write_wav((dir / "r.wav").string(), s, 1, 16000, 32);
    CHECK(load_wav((dir / "r.wav").string()).samples == s);
  }
}

TEST_SUITE("logmel") {
  const MelFrontend frontend;

  TEST_CASE("ten seconds become exactly 1024 x 128") {
    const auto mel = frontend.logmel({sine(300.0, 160000), 16000});
    CHECK(mel.frames.shape() == Shape{1024, 128});
    CHECK(mel.valid_frames == 1 + (160000 - 400) / 160);
    const float floor = std::log(1e-6f);
    for (std::size_t t = mel.valid_frames; t < 1024; ++t) CHECK(mel.frames(t, 5) == floor);
    CHECK(mel.frames.all_finite());
  }

  TEST_CASE("digital silence is the constant log floor") {
    const auto mel = frontend.logmel({std::vector<float>(48000, 0.0f), 16000});
    const float floor = float(std::log(1e-6));
    for (float v : mel.frames.data()) REQUIRE(v == floor);
  }

  TEST_CASE("1 kHz sine peaks in the band whose centre is nearest 1 kHz") {
    const auto centers = oracle::mel_centers(128, 0.0, 8000.0);
    std::size_t nearest = 0;
    for (std::size_t b = 1; b < centers.size(); ++b) {
      if (std::abs(centers[b] - 1000.0) < std::abs(centers[nearest] - 1000.0)) nearest = b;
    }
    const auto ours = frontend.center_frequencies();
    for (std::size_t b = 0; b < 128; ++b) CHECK(ours[b] == doctest::Approx(centers[b]).epsilon(1e-9));

    const auto mel = frontend.logmel({sine(1000.0, 32000), 16000});
    for (std::size_t t = 0; t < mel.valid_frames; t += 37) {
      const float* row = mel.frames.row(t);
      CHECK(std::size_t(std::max_element(row, row + 128) - row) == nearest);
    }
  }

  TEST_CASE("clips shorter than one window yield one frame") {
    const auto mel = frontend.logmel({sine(500.0, 100), 16000});
    CHECK(mel.valid_frames == 1);
    CHECK(mel.frames.shape() == Shape{1024, 128});
  }

  TEST_CASE("normalize") {
    Tensor<float> x({4, 3}, 2.5f);
    LogMel in{x, 4};
    CHECK(normalize(in, 0.0, 1.0).frames == x);
    const auto centred = normalize(in, 2.5, 3.0);
    for (float v : centred.frames.data()) CHECK(v == 0.0f);
    CHECK_THROWS_AS(normalize(in, 0.0, 0.0), ParameterError);
    CHECK_THROWS_AS(normalize(in, 0.0, -1.0), ParameterError);
  }

  TEST_CASE("feature cache round trip and bad magic") {
    const auto dir = scratch_dir("cache");
    std::mt19937 rng(3);
    std::normal_distribution<float> normal;
    Tensor<float> x({7, 5});
    for (float& v : x.storage()) v = normal(rng);
    write_feature_cache((dir / "x.lmel").string(), x);
    CHECK(read_feature_cache((dir / "x.lmel").string()) == x);
    std::ofstream(dir / "bad.lmel") << "LMEX0000000000000000";
    CHECK_THROWS_AS(read_feature_cache((dir / "bad.lmel").string()), FormatError);
  }
}

TEST_SUITE("properties") {
  TEST_CASE("output shape is fixed for every input length") {
    const MelFrontend frontend;
    for (std::size_t len : {0u, 1u, 399u, 400u, 401u, 16000u, 163840u, 200000u}) {
      const auto mel = frontend.logmel({std::vector<float>(len, 0.1f), 16000});
      CHECK(mel.frames.shape() == Shape{1024, 128});
    }
  }

  TEST_CASE("frame count formula") {
    const MelFrontend frontend;
    std::mt19937 rng(5);
    std::uniform_int_distribution<std::size_t> len(400, 40000);
    for (int i = 0; i < 50; ++i) {
      const std::size_t l = len(rng);
      CHECK(frontend.frame_count(l) == 1 + (l - 400) / 160);
      CHECK(frontend.mel_energies(std::vector<float>(l, 0.0f)).dim(0) == 1 + (l - 400) / 160);
    }
  }

  TEST_CASE("mel energy scales with the square of the amplitude") {
    const MelFrontend frontend;
    std::mt19937 rng(6);
    std::uniform_real_distribution<float> u(-0.5f, 0.5f);
    std::vector<float> x(4000);
    for (float& v : x) v = u(rng);
    const double alpha = 0.375;  // exact in binary
    std::vector<float> ax(x);
    for (float& v : ax) v = float(alpha * v);
    const auto e = frontend.mel_energies(x);
    const auto ea = frontend.mel_energies(ax);
    double total = 0.0, total_a = 0.0;
    for (std::size_t i = 0; i < e.size(); ++i) {
      total += e[i];
      total_a += ea[i];
    }
    CHECK(std::abs(total_a - alpha * alpha * total) / (alpha * alpha * total) < 1e-4);
  }

  TEST_CASE("dataset statistics normalize to zero mean") {
    const auto dir = scratch_dir("stats");
    std::mt19937 rng(8);
    std::normal_distribution<float> normal(-4.0f, 2.5f);
    std::vector<ManifestEntry> entries;
    for (int i = 0; i < 6; ++i) {
      Tensor<float> x({32, 16});
      for (float& v : x.storage()) v = normal(rng) + float(i);
      const auto path = (dir / (std::to_string(i) + ".lmel")).string();
      write_feature_cache(path, x);
      entries.push_back({path, {i % 2}, "train"});
    }
    const auto raw = load_split(entries, "train", 2, 32, 16);
    const auto stats = compute_stats(raw);
    const auto normed = load_split(entries, "train", 2, 32, 16, stats.mean, stats.std);
    const auto after = compute_stats(normed);
    CHECK(std::abs(after.mean) < 0.01);
    CHECK(after.std == doctest::Approx(1.0).epsilon(1e-3));
  }
}
