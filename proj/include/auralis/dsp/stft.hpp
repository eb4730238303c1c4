// Copyright 2026 The Auralis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <memory>
#include <span>
#include <vector>

#include "auralis/audio.hpp"
#include "auralis/numkern/tensor.hpp"

namespace auralis::dsp {

using cfloat = std::complex<float>;

// Hann analysis and synthesis, fft length == window length.
//
// Framing is causal: the signal is left-padded with (win_len - hop) zeros, so
// frame f covers samples [f*hop - (win_len - hop), f*hop + hop) and depends
// only on samples before (f + 1) * hop. A clip of N samples yields N / hop
// frames.
struct StftConfig {
  int win_len = 512;
  int hop = 128;

  [[nodiscard]] int bins() const { return win_len / 2 + 1; }
  [[nodiscard]] int overlap() const { return win_len - hop; }
  // Throws ConfigError unless hop < win_len, hop divides win_len and the
  // squared window overlap-adds to a constant.
  void validate() const;
};

// Periodic Hann window of length n.
std::vector<float> hann_window(int n);

// Steady-state sum of squared windows at the configured hop.
float cola_constant(const StftConfig& cfg);

// Complex spectrogram laid out as [channel][bin][frame].
class Spectrogram {
 public:
  Spectrogram() = default;
  Spectrogram(int channels, int bins, int frames,
              int sample_rate = kDefaultSampleRate);

  [[nodiscard]] int channels() const { return channels_; }
  [[nodiscard]] int bins() const { return bins_; }
  [[nodiscard]] int frames() const { return frames_; }
  [[nodiscard]] int sample_rate() const { return sample_rate_; }

  cfloat& at(int c, int k, int f) { return data_[index(c, k, f)]; }
  [[nodiscard]] cfloat at(int c, int k, int f) const {
    return data_[index(c, k, f)];
  }
  std::span<cfloat> values() { return data_; }
  [[nodiscard]] std::span<const cfloat> values() const { return data_; }

  [[nodiscard]] Spectrogram slice_frames(int f0, int f1) const;
  // Appends the frames of `other`; channel and bin counts must match.
  void append_frames(const Spectrogram& other);
  // Tiles the channel axis `times` times (mono -> two identical channels).
  [[nodiscard]] Spectrogram repeat_channels(int times) const;
  [[nodiscard]] bool all_finite() const;

 private:
  [[nodiscard]] std::size_t index(int c, int k, int f) const {
    return (static_cast<std::size_t>(c) * bins_ + k) * frames_ + f;
  }

  int channels_ = 0;
  int bins_ = 0;
  int frames_ = 0;
  int sample_rate_ = kDefaultSampleRate;
  std::vector<cfloat> data_;
};

// Real-input FFT of a fixed size. Plans are created once per instance;
// execution copies through instance-owned buffers so results never depend on
// caller memory alignment.
class RealFft {
 public:
  explicit RealFft(int n);
  ~RealFft();
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;
  RealFft(RealFft&&) noexcept;
  RealFft& operator=(RealFft&&) noexcept;

  [[nodiscard]] int size() const { return n_; }
  // in: n samples, out: n/2+1 bins.
  void forward(const float* in, cfloat* out);
  // in: n/2+1 bins, out: n samples, scaled by 1/n.
  void inverse(const cfloat* in, float* out);

 private:
  struct Impl;
  int n_;
  std::unique_ptr<Impl> impl_;
};

// Offline transforms. `audio` length must be a multiple of hop.
Spectrogram stft(std::span<const float> audio, const StftConfig& cfg,
                 int sample_rate = kDefaultSampleRate);
Spectrogram stft(const AudioClip& clip, const StftConfig& cfg);

// Weighted overlap-add; output has frames * hop samples per channel. The
// final (win_len - hop) samples see only part of the window overlap and are
// exact only where the summed squared window exceeds 1e-3 of its steady value.
AudioClip istft(const Spectrogram& spec, const StftConfig& cfg);

// Streaming analysis: carries the last (win_len - hop) samples per channel.
class StftStream {
 public:
  StftStream(const StftConfig& cfg, int channels,
             int sample_rate = kDefaultSampleRate);

  // Emits chunk_len / hop frames. Chunk length must be a multiple of hop.
  Spectrogram push(const AudioClip& chunk);
  void reset();

  [[nodiscard]] long long frames_emitted() const { return frames_emitted_; }
  [[nodiscard]] const std::vector<std::vector<float>>& carry() const {
    return carry_;
  }

 private:
  StftConfig cfg_;
  int channels_;
  int sample_rate_;
  std::vector<float> window_;
  RealFft fft_;
  std::vector<std::vector<float>> carry_;
  long long frames_emitted_ = 0;
};

// Streaming synthesis with a fixed latency of (win_len - hop) samples: the
// first frames only complete negative-time samples, which are dropped, and
// `flush` releases the final (win_len - hop) samples.
class IstftStream {
 public:
  IstftStream(const StftConfig& cfg, int channels,
              int sample_rate = kDefaultSampleRate);

  // Emits hop samples per frame, minus the initial latency.
  AudioClip push(const Spectrogram& frames);
  // Emits the tail still held in the overlap-add accumulator.
  AudioClip flush();
  void reset();

  [[nodiscard]] long long frames_consumed() const { return frames_consumed_; }
  [[nodiscard]] int latency() const { return cfg_.overlap(); }

 private:
  StftConfig cfg_;
  int channels_;
  int sample_rate_;
  std::vector<float> window_;
  RealFft fft_;
  std::vector<std::vector<float>> acc_;
  float floor_;
  std::vector<float> env_;
  long long frames_consumed_ = 0;
};

// Real/imaginary parts as separate channels, ordered (re0, im0, re1, im1, ...).
// Result has batch 1.
numkern::Tensor4 pack_complex(const Spectrogram& spec);
Spectrogram unpack_complex(const numkern::Tensor4& t,
                           int sample_rate = kDefaultSampleRate);

}  // namespace auralis::dsp
