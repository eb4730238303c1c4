// Copyright 2026 The Auralis Authors
// SPDX-License-Identifier: Apache-2.0

#include "auralis/dsp/stft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <mutex>
#include <numbers>
#include <string>

#include "auralis/errors.hpp"

namespace auralis::dsp {
namespace {

// FFTW planning is not thread-safe.
std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

// Overlap-add normalization. The last (win_len - hop) samples of a stream are
// covered only by window tails; the envelope is floored there so that the
// near-zero window edge cannot amplify rounding or model error.
inline float normalize(float acc, float env, float floor) {
  return acc / std::max(env, floor);
}

float envelope_floor(const StftConfig& cfg) {
  return 1e-3f * cola_constant(cfg);
}

void check_hop_multiple(std::size_t len, const StftConfig& cfg) {
  if (len % static_cast<std::size_t>(cfg.hop) != 0) {
    throw InputError("audio length " + std::to_string(len) +
                     " is not a multiple of hop " + std::to_string(cfg.hop));
  }
}

}  // namespace

void StftConfig::validate() const {
  if (win_len < 2 || hop < 1 || hop >= win_len || win_len % hop != 0) {
    throw ConfigError("stft: need 1 <= hop < win_len with hop | win_len, got "
                      "win_len=" + std::to_string(win_len) +
                      " hop=" + std::to_string(hop));
  }
  const auto w = hann_window(win_len);
  float lo = 1e30f;
  float hi = -1e30f;
  for (int s = 0; s < hop; ++s) {
    float acc = 0.0f;
    for (int k = s; k < win_len; k += hop) acc += w[k] * w[k];
    lo = std::min(lo, acc);
    hi = std::max(hi, acc);
  }
  if (hi - lo > 1e-5f * hi) {
    throw ConfigError("stft: squared Hann window is not COLA at hop " +
                      std::to_string(hop));
  }
}

std::vector<float> hann_window(int n) {
  std::vector<float> w(n);
  for (int i = 0; i < n; ++i) {
    w[i] = static_cast<float>(
        0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / n));
  }
  return w;
}

float cola_constant(const StftConfig& cfg) {
  const auto w = hann_window(cfg.win_len);
  float acc = 0.0f;
  for (int k = 0; k < cfg.win_len; k += cfg.hop) acc += w[k] * w[k];
  return acc;
}

// --- Spectrogram -----------------------------------------------------------

Spectrogram::Spectrogram(int channels, int bins, int frames, int sample_rate)
    : channels_(channels),
      bins_(bins),
      frames_(frames),
      sample_rate_(sample_rate),
      data_(static_cast<std::size_t>(channels) * bins * frames) {
  if (channels < 1 || bins < 1 || frames < 0) {
    throw ConfigError("spectrogram dims invalid");
  }
}

Spectrogram Spectrogram::slice_frames(int f0, int f1) const {
  if (f0 < 0 || f1 > frames_ || f0 > f1) {
    throw ConfigError("slice_frames: bad range");
  }
  Spectrogram out(channels_, bins_, f1 - f0, sample_rate_);
  for (int c = 0; c < channels_; ++c) {
    for (int k = 0; k < bins_; ++k) {
      std::copy_n(data_.begin() + index(c, k, f0), f1 - f0,
                  out.data_.begin() + out.index(c, k, 0));
    }
  }
  return out;
}

void Spectrogram::append_frames(const Spectrogram& other) {
  if (frames_ == 0 && data_.empty()) {
    *this = other;
    return;
  }
  if (other.channels_ != channels_ || other.bins_ != bins_) {
    throw ConfigError("append_frames: channel/bin mismatch");
  }
  Spectrogram out(channels_, bins_, frames_ + other.frames_, sample_rate_);
  for (int c = 0; c < channels_; ++c) {
    for (int k = 0; k < bins_; ++k) {
      std::copy_n(data_.begin() + index(c, k, 0), frames_,
                  out.data_.begin() + out.index(c, k, 0));
      std::copy_n(other.data_.begin() + other.index(c, k, 0), other.frames_,
                  out.data_.begin() + out.index(c, k, frames_));
    }
  }
  *this = std::move(out);
}

Spectrogram Spectrogram::repeat_channels(int times) const {
  Spectrogram out(channels_ * times, bins_, frames_, sample_rate_);
  const std::size_t per = static_cast<std::size_t>(channels_) * bins_ * frames_;
  for (int r = 0; r < times; ++r) {
    std::copy(data_.begin(), data_.end(), out.data_.begin() + r * per);
  }
  return out;
}

bool Spectrogram::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](cfloat v) {
    return std::isfinite(v.real()) && std::isfinite(v.imag());
  });
}

// --- RealFft ---------------------------------------------------------------

struct RealFft::Impl {
  float* time = nullptr;
  fftwf_complex* freq = nullptr;
  fftwf_plan fwd = nullptr;
  fftwf_plan inv = nullptr;

  ~Impl() {
    std::lock_guard lock(plan_mutex());
    if (fwd != nullptr) fftwf_destroy_plan(fwd);
    if (inv != nullptr) fftwf_destroy_plan(inv);
    fftwf_free(time);
    fftwf_free(freq);
  }
};

RealFft::RealFft(int n) : n_(n), impl_(std::make_unique<Impl>()) {
  if (n < 2) throw ConfigError("fft size must be >= 2");
  std::lock_guard lock(plan_mutex());
  impl_->time = fftwf_alloc_real(n);
  impl_->freq = fftwf_alloc_complex(n / 2 + 1);
  impl_->fwd = fftwf_plan_dft_r2c_1d(n, impl_->time, impl_->freq, FFTW_ESTIMATE);
  // c2r destroys its input; it always runs on our own copy.
  impl_->inv = fftwf_plan_dft_c2r_1d(n, impl_->freq, impl_->time, FFTW_ESTIMATE);
}

RealFft::~RealFft() = default;
RealFft::RealFft(RealFft&&) noexcept = default;
RealFft& RealFft::operator=(RealFft&&) noexcept = default;

void RealFft::forward(const float* in, cfloat* out) {
  std::memcpy(impl_->time, in, sizeof(float) * n_);
  fftwf_execute(impl_->fwd);
  std::memcpy(static_cast<void*>(out), impl_->freq,
              sizeof(fftwf_complex) * (n_ / 2 + 1));
}

void RealFft::inverse(const cfloat* in, float* out) {
  std::memcpy(impl_->freq, in, sizeof(fftwf_complex) * (n_ / 2 + 1));
  fftwf_execute(impl_->inv);
  const float scale = 1.0f / static_cast<float>(n_);
  for (int i = 0; i < n_; ++i) out[i] = impl_->time[i] * scale;
}

// --- offline ---------------------------------------------------------------

Spectrogram stft(std::span<const float> audio, const StftConfig& cfg,
                 int sample_rate) {
  AudioClip clip;
  clip.sample_rate = sample_rate;
  clip.channels.emplace_back(audio.begin(), audio.end());
  return stft(clip, cfg);
}

Spectrogram stft(const AudioClip& clip, const StftConfig& cfg) {
  cfg.validate();
  if (clip.channels.empty()) throw InputError("stft: no channels");
  check_hop_multiple(clip.length(), cfg);
  const int frames = static_cast<int>(clip.length() / cfg.hop);
  const int bins = cfg.bins();
  const int lead = cfg.overlap();
  Spectrogram spec(clip.num_channels(), bins, frames, clip.sample_rate);
  const auto window = hann_window(cfg.win_len);
  RealFft fft(cfg.win_len);
  std::vector<float> padded;
  std::vector<float> frame(cfg.win_len);
  std::vector<cfloat> out(bins);
  for (int c = 0; c < clip.num_channels(); ++c) {
    const auto& x = clip.channels[c];
    padded.assign(lead, 0.0f);
    padded.insert(padded.end(), x.begin(), x.end());
    for (int f = 0; f < frames; ++f) {
      const float* src = padded.data() + static_cast<std::size_t>(f) * cfg.hop;
      for (int i = 0; i < cfg.win_len; ++i) frame[i] = src[i] * window[i];
      fft.forward(frame.data(), out.data());
      for (int k = 0; k < bins; ++k) spec.at(c, k, f) = out[k];
    }
  }
  return spec;
}

AudioClip istft(const Spectrogram& spec, const StftConfig& cfg) {
  cfg.validate();
  if (spec.bins() != cfg.bins()) {
    throw InputError("istft: spectrogram has " + std::to_string(spec.bins()) +
                     " bins, config expects " + std::to_string(cfg.bins()));
  }
  const int frames = spec.frames();
  const int lead = cfg.overlap();
  const std::size_t total = static_cast<std::size_t>(frames) * cfg.hop + lead;
  const auto window = hann_window(cfg.win_len);
  RealFft fft(cfg.win_len);
  std::vector<cfloat> bins(cfg.bins());
  std::vector<float> frame(cfg.win_len);

  // Sample s of the output sits at index s + lead of the accumulators.
  const float floor = envelope_floor(cfg);
  std::vector<float> env(total, 0.0f);
  for (int f = 0; f < frames; ++f) {
    for (int i = 0; i < cfg.win_len; ++i) {
      env[static_cast<std::size_t>(f) * cfg.hop + i] += window[i] * window[i];
    }
  }
  AudioClip out;
  out.sample_rate = spec.sample_rate();
  for (int c = 0; c < spec.channels(); ++c) {
    std::vector<float> acc(total, 0.0f);
    for (int f = 0; f < frames; ++f) {
      for (int k = 0; k < cfg.bins(); ++k) bins[k] = spec.at(c, k, f);
      fft.inverse(bins.data(), frame.data());
      float* dst = acc.data() + static_cast<std::size_t>(f) * cfg.hop;
      for (int i = 0; i < cfg.win_len; ++i) dst[i] += frame[i] * window[i];
    }
    std::vector<float> y(static_cast<std::size_t>(frames) * cfg.hop);
    for (std::size_t s = 0; s < y.size(); ++s) {
      y[s] = normalize(acc[s + lead], env[s + lead], floor);
    }
    out.channels.push_back(std::move(y));
  }
  return out;
}

// --- streaming -------------------------------------------------------------

StftStream::StftStream(const StftConfig& cfg, int channels, int sample_rate)
    : cfg_(cfg),
      channels_(channels),
      sample_rate_(sample_rate),
      window_(hann_window(cfg.win_len)),
      fft_(cfg.win_len) {
  cfg_.validate();
  reset();
}

void StftStream::reset() {
  carry_.assign(channels_, std::vector<float>(cfg_.overlap(), 0.0f));
  frames_emitted_ = 0;
}

Spectrogram StftStream::push(const AudioClip& chunk) {
  if (chunk.num_channels() != channels_) {
    throw InputError("stft stream: expected " + std::to_string(channels_) +
                     " channels");
  }
  check_hop_multiple(chunk.length(), cfg_);
  const int frames = static_cast<int>(chunk.length() / cfg_.hop);
  Spectrogram spec(channels_, cfg_.bins(), frames, sample_rate_);
  std::vector<float> buf;
  std::vector<float> frame(cfg_.win_len);
  std::vector<cfloat> out(cfg_.bins());
  for (int c = 0; c < channels_; ++c) {
    buf = carry_[c];
    buf.insert(buf.end(), chunk.channels[c].begin(), chunk.channels[c].end());
    for (int f = 0; f < frames; ++f) {
      const float* src = buf.data() + static_cast<std::size_t>(f) * cfg_.hop;
      for (int i = 0; i < cfg_.win_len; ++i) frame[i] = src[i] * window_[i];
      fft_.forward(frame.data(), out.data());
      for (int k = 0; k < cfg_.bins(); ++k) spec.at(c, k, f) = out[k];
    }
    carry_[c].assign(buf.end() - cfg_.overlap(), buf.end());
  }
  frames_emitted_ += frames;
  return spec;
}

IstftStream::IstftStream(const StftConfig& cfg, int channels, int sample_rate)
    : cfg_(cfg),
      channels_(channels),
      sample_rate_(sample_rate),
      window_(hann_window(cfg.win_len)),
      fft_(cfg.win_len),
      floor_(envelope_floor(cfg)) {
  cfg_.validate();
  reset();
}

void IstftStream::reset() {
  acc_.assign(channels_, std::vector<float>(cfg_.win_len, 0.0f));
  env_.assign(cfg_.win_len, 0.0f);
  frames_consumed_ = 0;
}

AudioClip IstftStream::push(const Spectrogram& frames) {
  if (frames.channels() != channels_ || frames.bins() != cfg_.bins()) {
    throw InputError("istft stream: expected " + std::to_string(channels_) +
                     " channels x " + std::to_string(cfg_.bins()) + " bins");
  }
  const int hop = cfg_.hop;
  const int lead = cfg_.overlap();
  AudioClip out;
  out.sample_rate = sample_rate_;
  out.channels.assign(channels_, {});
  std::vector<cfloat> bins(cfg_.bins());
  std::vector<float> frame(cfg_.win_len);
  for (int f = 0; f < frames.frames(); ++f) {
    // The accumulator holds samples [g*hop - lead, g*hop + hop) for the
    // global frame index g; its first hop samples are final after frame g.
    const long long g = frames_consumed_ + f;
    for (int i = 0; i < cfg_.win_len; ++i) env_[i] += window_[i] * window_[i];
    for (int c = 0; c < channels_; ++c) {
      for (int k = 0; k < cfg_.bins(); ++k) bins[k] = frames.at(c, k, f);
      fft_.inverse(bins.data(), frame.data());
      auto& acc = acc_[c];
      for (int i = 0; i < cfg_.win_len; ++i) acc[i] += frame[i] * window_[i];
      const long long first = g * hop - lead;
      for (int i = 0; i < hop; ++i) {
        if (first + i < 0) continue;
        out.channels[c].push_back(normalize(acc[i], env_[i], floor_));
      }
      std::copy(acc.begin() + hop, acc.end(), acc.begin());
      std::fill(acc.end() - hop, acc.end(), 0.0f);
    }
    std::copy(env_.begin() + hop, env_.end(), env_.begin());
    std::fill(env_.end() - hop, env_.end(), 0.0f);
  }
  frames_consumed_ += frames.frames();
  return out;
}

AudioClip IstftStream::flush() {
  const int lead = cfg_.overlap();
  AudioClip out;
  out.sample_rate = sample_rate_;
  out.channels.assign(channels_, {});
  // With fewer frames than the latency, part of the tail lies before t=0.
  const long long skip =
      std::max<long long>(0, lead - frames_consumed_ * cfg_.hop);
  for (int c = 0; c < channels_; ++c) {
    for (int i = static_cast<int>(skip); i < lead; ++i) {
      out.channels[c].push_back(normalize(acc_[c][i], env_[i], floor_));
    }
  }
  reset();
  return out;
}

// --- packing ---------------------------------------------------------------

numkern::Tensor4 pack_complex(const Spectrogram& spec) {
  numkern::Tensor4 t({1, 2 * spec.channels(), spec.bins(), spec.frames()});
  for (int c = 0; c < spec.channels(); ++c) {
    for (int k = 0; k < spec.bins(); ++k) {
      for (int f = 0; f < spec.frames(); ++f) {
        const cfloat v = spec.at(c, k, f);
        t.at(0, 2 * c, k, f) = v.real();
        t.at(0, 2 * c + 1, k, f) = v.imag();
      }
    }
  }
  return t;
}

Spectrogram unpack_complex(const numkern::Tensor4& t, int sample_rate) {
  if (t.n() != 1 || t.c() % 2 != 0) {
    throw ConfigError("unpack_complex: need batch 1 and an even channel count, "
                      "got " + t.shape().str());
  }
  Spectrogram spec(t.c() / 2, t.h(), t.w(), sample_rate);
  for (int c = 0; c < spec.channels(); ++c) {
    for (int k = 0; k < spec.bins(); ++k) {
      for (int f = 0; f < spec.frames(); ++f) {
        spec.at(c, k, f) = {t.at(0, 2 * c, k, f), t.at(0, 2 * c + 1, k, f)};
      }
    }
  }
  return spec;
}

}  // namespace auralis::dsp
