// Copyright 2026 The Auralis Authors
// SPDX-License-Identifier: Apache-2.0

#include "auralis/streampipe/session.hpp"

#include <algorithm>
#include <cstring>
#include <string>

#include "auralis/errors.hpp"
#include "auralis/seed.hpp"

namespace auralis::streampipe {

using numkern::Tensor4;

void RenderConfig::validate(const caunet::NetConfig& net) const {
  stft.validate();
  solvers::validate(schedule);
  if (!(sigma >= 0.0f)) throw ConfigError("flow.sigma must be >= 0");
  const int block = stft.hop * net.resample_factor();
  if (chunk_len <= 0 || chunk_len % block != 0) {
    throw ConfigError("io.chunk_len must be a positive multiple of " +
                      std::to_string(block) + " samples for this model");
  }
  if (net.freq_bins != stft.bins()) {
    throw ConfigError("model expects " + std::to_string(net.freq_bins) +
                      " bins, STFT produces " + std::to_string(stft.bins()));
  }
  if (net.out_channels != 4) {
    throw ConfigError("model must predict 4 packed channels");
  }
  const int cond = net.in_channels - net.out_channels;
  if (cond != 0 && cond != 4) {
    throw ConfigError("model input channels must be 4 or 8, got " +
                      std::to_string(net.in_channels));
  }
}

std::size_t BufferBank::num_values() const {
  std::size_t n = 0;
  for (const auto& [k, s] : entries_) n += s.num_values();
  return n;
}

std::uint64_t BufferBank::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](const void* p, std::size_t len) {
    const auto* b = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < len; ++i) {
      h ^= b[i];
      h *= 0x100000001b3ULL;
    }
  };
  for (const auto& [k, s] : entries_) {
    mix(&k, sizeof k);
    for (const auto& [name, t] : s.layers) {
      mix(name.data(), name.size());
      mix(t.data(), t.numel() * sizeof(float));
    }
  }
  return h;
}

void require_coverage(const PoseTrack& track, double end_s, const char* name) {
  if (track.empty()) throw InputError(std::string(name) + " pose track is empty");
  if (track.last_time() + 1.0 / kDefaultPoseRate < end_s - 1e-9) {
    throw InputError(std::string(name) + " poses end at " +
                     std::to_string(track.last_time()) + " s, audio needs " +
                     std::to_string(end_s) + " s");
  }
}

Tensor4 solve_frames(caunet::CausalUNet& model, const Tensor4& x,
                     const Tensor4& poses, long long first_frame,
                     const RenderConfig& cfg, BufferBank* bank) {
  const bool conditioned = model.config().in_channels != model.config().out_channels;
  const Tensor4* cond = conditioned ? &x : nullptr;
  const Tensor4 z = cfm::sample_noise(x, cfm::NoiseSpec{cfg.sigma, cfg.seed},
                                      first_frame);
  auto field = [&](const Tensor4& phi, double t, int eval_index) {
    const float tv = static_cast<float>(t);
    caunet::StreamState* state =
        bank != nullptr ? &bank->entry(eval_index) : nullptr;
    return model.predict(phi, cond, {&tv, 1}, poses, state);
  };
  return solvers::integrate(field, z, cfg.schedule).phi;
}

StreamSession::StreamSession(caunet::CausalUNet& model, RenderConfig cfg)
    : model_(model),
      cfg_(std::move(cfg)),
      stft_(cfg_.stft, 1),
      istft_(cfg_.stft, 2) {
  cfg_.validate(model_.config());
}

AudioClip StreamSession::emit(AudioClip out) {
  const auto keep = static_cast<std::size_t>(
      std::min<long long>(static_cast<long long>(out.length()),
                          samples_in_ - samples_out_));
  for (auto& ch : out.channels) ch.resize(keep);
  samples_out_ += static_cast<long long>(keep);
  return out;
}

AudioClip StreamSession::push(const AudioClip& mono_chunk, const PoseTrack& tx,
                              const PoseTrack& rx) {
  if (poisoned_) {
    throw NumericError("stream session is poisoned by an earlier non-finite value");
  }
  if (closed_) throw UsageError("stream session is already finished");
  if (mono_chunk.num_channels() != 1) throw InputError("chunks must be mono");
  const auto len = static_cast<int>(mono_chunk.length());
  if (last_seen_) throw InputError("chunk pushed after the final short chunk");
  if (len == 0 || len > cfg_.chunk_len) {
    throw InputError("chunk has " + std::to_string(len) + " samples, expected " +
                     std::to_string(cfg_.chunk_len));
  }
  const int sr = mono_chunk.sample_rate;
  const double end_s = static_cast<double>(samples_in_ + len) / sr;
  require_coverage(tx, end_s, "tx");
  require_coverage(rx, end_s, "rx");

  AudioClip padded = mono_chunk;
  padded.channels[0].resize(cfg_.chunk_len, 0.0f);
  const bool last = len < cfg_.chunk_len;
  const int hop = cfg_.stft.hop;
  const int frames = cfg_.chunk_len / hop;
  const int valid = (len + hop - 1) / hop;

  try {
    const dsp::Spectrogram spec = stft_.push(padded);
    if (!spec.all_finite()) throw NumericError("non-finite input audio");
    const Tensor4 x = dsp::pack_complex(spec.repeat_channels(2));
    const Tensor4 poses =
        caunet::frame_poses(tx, rx, frames, frames_, hop, sr);
    BufferBank fresh;
    Tensor4 y = solve_frames(model_, x, poses, frames_,
                             cfg_, cfg_.buffer_bank ? &bank_ : &fresh);
    if (valid < frames) y = numkern::slice_time(y, 0, valid);
    AudioClip out = istft_.push(dsp::unpack_complex(y, sr));
    frames_ += frames;
    samples_in_ += len;
    ++chunks_;
    last_seen_ = last;
    return emit(std::move(out));
  } catch (const NumericError&) {
    poisoned_ = true;
    throw;
  }
}

AudioClip StreamSession::finish() {
  if (poisoned_) {
    throw NumericError("stream session is poisoned by an earlier non-finite value");
  }
  if (closed_) throw UsageError("stream session is already finished");
  closed_ = true;
  return emit(istft_.flush());
}

AudioClip render_offline(caunet::CausalUNet& model, const AudioClip& mono,
                         const PoseTrack& tx, const PoseTrack& rx,
                         const RenderConfig& cfg) {
  cfg.validate(model.config());
  if (mono.num_channels() != 1) throw InputError("input must be mono");
  const std::size_t n = mono.length();
  if (n == 0) throw InputError("input is empty");
  const int sr = mono.sample_rate;
  require_coverage(tx, static_cast<double>(n) / sr, "tx");
  require_coverage(rx, static_cast<double>(n) / sr, "rx");
  const int hop = cfg.stft.hop;
  AudioClip padded = mono;
  padded.channels[0].resize((n + hop - 1) / hop * hop, 0.0f);
  const dsp::Spectrogram spec = dsp::stft(padded, cfg.stft);
  if (!spec.all_finite()) throw NumericError("non-finite input audio");
  const Tensor4 x = dsp::pack_complex(spec.repeat_channels(2));
  const Tensor4 poses = caunet::frame_poses(tx, rx, x.w(), 0, hop, sr);
  const Tensor4 y = solve_frames(model, x, poses, 0, cfg, nullptr);
  AudioClip out = dsp::istft(dsp::unpack_complex(y, sr), cfg.stft);
  for (auto& ch : out.channels) ch.resize(n);
  return out;
}

AudioClip render_streamed(caunet::CausalUNet& model, const AudioClip& mono,
                          const PoseTrack& tx, const PoseTrack& rx,
                          const RenderConfig& cfg) {
  if (mono.num_channels() != 1) throw InputError("input must be mono");
  StreamSession session(model, cfg);
  AudioClip out;
  out.sample_rate = mono.sample_rate;
  out.channels.resize(2);
  auto append = [&out](const AudioClip& part) {
    for (int c = 0; c < 2; ++c) {
      out.channels[c].insert(out.channels[c].end(), part.channels[c].begin(),
                             part.channels[c].end());
    }
  };
  const std::size_t n = mono.length();
  const auto chunk = static_cast<std::size_t>(cfg.chunk_len);
  for (std::size_t i = 0; i < n; i += chunk) {
    AudioClip part;
    part.sample_rate = mono.sample_rate;
    const auto first = mono.channels[0].begin() + static_cast<std::ptrdiff_t>(i);
    part.channels.emplace_back(first, first + static_cast<std::ptrdiff_t>(std::min(chunk, n - i)));
    append(session.push(part, tx, rx));
  }
  append(session.finish());
  return out;
}

AudioClip render_independent(caunet::CausalUNet& model, const AudioClip& mono,
                             const PoseTrack& tx, const PoseTrack& rx,
                             const RenderConfig& cfg) {
  if (mono.num_channels() != 1) throw InputError("input must be mono");
  cfg.validate(model.config());
  auto shifted = [](const PoseTrack& track, double offset) {
    PoseTrack out;
    for (std::size_t i = 0; i < track.size(); ++i) {
      out.push_back(track.times[i] - offset, track.poses[i]);
    }
    return out;
  };
  AudioClip out;
  out.sample_rate = mono.sample_rate;
  out.channels.resize(2);
  const std::size_t n = mono.length();
  const auto chunk = static_cast<std::size_t>(cfg.chunk_len);
  for (std::size_t i = 0; i < n; i += chunk) {
    AudioClip part;
    part.sample_rate = mono.sample_rate;
    const auto first = mono.channels[0].begin() + static_cast<std::ptrdiff_t>(i);
    part.channels.emplace_back(first, first + static_cast<std::ptrdiff_t>(std::min(chunk, n - i)));
    const double offset = static_cast<double>(i) / mono.sample_rate;
    RenderConfig local = cfg;
    local.seed = mix_seed(cfg.seed, i / chunk);
    const AudioClip rendered =
        render_offline(model, part, shifted(tx, offset), shifted(rx, offset), local);
    for (int c = 0; c < 2; ++c) {
      out.channels[c].insert(out.channels[c].end(), rendered.channels[c].begin(),
                             rendered.channels[c].end());
    }
  }
  return out;
}

}  // namespace auralis::streampipe
