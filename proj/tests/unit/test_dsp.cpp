// Copyright 2026 The Auralis Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "auralis/dsp/stft.hpp"
#include "auralis/errors.hpp"

using namespace auralis;
using namespace auralis::dsp;

namespace {

std::vector<float> noise(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> d(0.0f, 0.3f);
  std::vector<float> x(n);
  for (float& v : x) v = d(rng);
  return x;
}

AudioClip clip_of(std::vector<std::vector<float>> ch) {
  AudioClip c;
  c.channels = std::move(ch);
  return c;
}

float max_diff(const Spectrogram& a, const Spectrogram& b) {
  REQUIRE(a.values().size() == b.values().size());
  float m = 0.0f;
  for (std::size_t i = 0; i < a.values().size(); ++i) {
    m = std::max(m, std::abs(a.values()[i] - b.values()[i]));
  }
  return m;
}

}  // namespace

TEST_CASE("spectrogram shape for a 32768-sample clip") {
  const auto x = noise(32768, 1);
  Spectrogram s = stft(x, StftConfig{});
  CHECK(s.bins() == 257);
  CHECK(s.frames() == 256);
  CHECK(s.channels() == 1);
}

TEST_CASE("stft rejects lengths that are not hop multiples") {
  std::vector<float> x(1000);
  CHECK_THROWS_AS(stft(x, StftConfig{}), InputError);
}

TEST_CASE("config validation") {
  CHECK_NOTHROW(StftConfig{}.validate());
  CHECK_THROWS_AS((StftConfig{512, 512}.validate()), ConfigError);
  CHECK_THROWS_AS((StftConfig{512, 100}.validate()), ConfigError);
  CHECK(cola_constant(StftConfig{}) == doctest::Approx(1.5f).epsilon(1e-6));
}

TEST_CASE("zero in, zero out") {
  std::vector<float> x(2048, 0.0f);
  Spectrogram s = stft(x, StftConfig{});
  for (auto v : s.values()) CHECK(v == cfloat{});
  AudioClip y = istft(Spectrogram(2, 257, 10), StftConfig{});
  for (const auto& ch : y.channels) {
    for (float v : ch) CHECK(v == 0.0f);
  }
}

TEST_CASE("DC input concentrates in bin zero") {
  std::vector<float> x(2048, 1.0f);
  Spectrogram s = stft(x, StftConfig{});
  // Direct DFT of a windowed constant: the periodic Hann has exactly three
  // nonzero DFT coefficients, N/2 at bin 0 and -N/4 at bins +-1.
  for (int f = 3; f < s.frames(); ++f) {
    CHECK(std::abs(s.at(0, 0, f)) == doctest::Approx(256.0).epsilon(1e-5));
    CHECK(std::abs(s.at(0, 1, f)) == doctest::Approx(128.0).epsilon(1e-5));
    for (int k = 2; k < s.bins(); ++k) {
      CHECK(std::abs(s.at(0, k, f)) < 1e-6 * std::abs(s.at(0, 0, f)));
    }
  }
}

TEST_CASE("causal framing") {
  auto x = noise(4096, 2);
  Spectrogram a = stft(x, StftConfig{});
  for (std::size_t i = 2048; i < x.size(); ++i) x[i] += 1.0f;
  Spectrogram b = stft(x, StftConfig{});
  // Frame f depends only on samples < (f + 1) * hop.
  for (int f = 0; f < 2048 / 128; ++f) {
    for (int k = 0; k < 257; ++k) CHECK(a.at(0, k, f) == b.at(0, k, f));
  }
}

TEST_CASE("round trip past the transient") {
  const auto x = noise(32768, 3);
  AudioClip y = istft(stft(x, StftConfig{}), StftConfig{});
  REQUIRE(y.length() == x.size());
  // The head is fully overlapped thanks to the causal padding; the last 384
  // samples are the partially covered tail.
  double e = 0.0, r = 0.0;
  for (std::size_t i = 512; i + 384 < x.size(); ++i) {
    e += (y.channels[0][i] - x[i]) * (y.channels[0][i] - x[i]);
    r += x[i] * x[i];
  }
  CHECK(std::sqrt(e / r) <= 1e-6);
}

TEST_CASE("istft is linear") {
  StftConfig cfg;
  Spectrogram a = stft(noise(4096, 4), cfg);
  Spectrogram b = stft(noise(4096, 5), cfg);
  Spectrogram sum = a;
  for (std::size_t i = 0; i < sum.values().size(); ++i) {
    sum.values()[i] += b.values()[i];
  }
  AudioClip ya = istft(a, cfg), yb = istft(b, cfg), ys = istft(sum, cfg);
  double e = 0.0, r = 0.0;
  for (std::size_t i = 0; i < ys.length(); ++i) {
    const double d = ys.channels[0][i] - ya.channels[0][i] - yb.channels[0][i];
    e += d * d;
    r += ys.channels[0][i] * ys.channels[0][i];
  }
  CHECK(std::sqrt(e / r) <= 1e-6);
}

TEST_CASE("istft rejects wrong bin count") {
  CHECK_THROWS_AS(istft(Spectrogram(1, 100, 4), StftConfig{}), InputError);
}

TEST_CASE("streamed analysis equals offline") {
  StftConfig cfg;
  const auto x = noise(4096, 6);
  Spectrogram off = stft(clip_of({x, x}), cfg);

  SUBCASE("two halves") {
    StftStream s(cfg, 2);
    Spectrogram got = s.push(clip_of({{x.begin(), x.begin() + 2048},
                                      {x.begin(), x.begin() + 2048}}));
    CHECK(got.frames() == 16);
    got.append_frames(s.push(clip_of({{x.begin() + 2048, x.end()},
                                      {x.begin() + 2048, x.end()}})));
    CHECK(max_diff(got, off) == 0.0f);
    CHECK(s.carry()[0].size() == 384);
  }
  SUBCASE("random splits") {
    std::mt19937_64 rng(7);
    const auto y = noise(32768, 8);
    Spectrogram ref = stft(y, cfg);
    for (int trial = 0; trial < 20; ++trial) {
      StftStream s(cfg, 1);
      Spectrogram got;
      std::size_t pos = 0;
      while (pos < y.size()) {
        const std::size_t hops = 1 + rng() % 40;
        const std::size_t end = std::min(y.size(), pos + hops * 128);
        got.append_frames(
            s.push(clip_of({{y.begin() + pos, y.begin() + end}})));
        pos = end;
      }
      CHECK(max_diff(got, ref) == 0.0f);
    }
  }
  SUBCASE("zero chunk after reset") {
    StftStream s(cfg, 1);
    s.push(clip_of({x}));
    s.reset();
    Spectrogram z = s.push(clip_of({std::vector<float>(1024, 0.0f)}));
    for (auto v : z.values()) CHECK(v == cfloat{});
  }
  SUBCASE("bad chunk") {
    StftStream s(cfg, 1);
    CHECK_THROWS_AS(s.push(clip_of({std::vector<float>(100)})), InputError);
  }
}

TEST_CASE("streamed synthesis equals offline") {
  StftConfig cfg;
  const auto x = noise(32768, 9);
  Spectrogram spec = stft(x, cfg);
  AudioClip off = istft(spec, cfg);

  auto run = [&](int frames_per_push) {
    IstftStream s(cfg, 1);
    std::vector<float> out;
    for (int f = 0; f < spec.frames(); f += frames_per_push) {
      const int e = std::min(spec.frames(), f + frames_per_push);
      AudioClip c = s.push(spec.slice_frames(f, e));
      out.insert(out.end(), c.channels[0].begin(), c.channels[0].end());
    }
    AudioClip tail = s.flush();
    out.insert(out.end(), tail.channels[0].begin(), tail.channels[0].end());
    return out;
  };
  for (int per : {64, 1, 37}) {
    const auto out = run(per);
    REQUIRE(out.size() == off.length());
    float m = 0.0f;
    for (std::size_t i = 0; i < out.size(); ++i) {
      m = std::max(m, std::abs(out[i] - off.channels[0][i]));
    }
    CHECK(m <= 1e-6f);
  }
  SUBCASE("latency") {
    IstftStream s(cfg, 1);
    CHECK(s.latency() == 384);
    CHECK(s.push(spec.slice_frames(0, 4)).length() == 4 * 128 - 384);
  }
}

TEST_CASE("complex packing") {
  Spectrogram s(2, 3, 4);
  std::mt19937_64 rng(10);
  std::normal_distribution<float> d;
  for (auto& v : s.values()) v = {d(rng), d(rng)};
  numkern::Tensor4 t = pack_complex(s);
  CHECK(t.shape() == numkern::Shape4{1, 4, 3, 4});
  CHECK(t.at(0, 0, 1, 2) == s.at(0, 1, 2).real());
  CHECK(t.at(0, 1, 1, 2) == s.at(0, 1, 2).imag());
  CHECK(t.at(0, 2, 2, 3) == s.at(1, 2, 3).real());
  CHECK(max_diff(unpack_complex(t), s) == 0.0f);

  for (auto& v : s.values()) v = {0.0f, v.imag()};
  numkern::Tensor4 p = pack_complex(s);
  for (int c : {0, 2}) {
    for (int k = 0; k < 3; ++k) {
      for (int f = 0; f < 4; ++f) CHECK(p.at(0, c, k, f) == 0.0f);
    }
  }
  CHECK_THROWS_AS(unpack_complex(numkern::Tensor4({1, 3, 2, 2})), ConfigError);
}
