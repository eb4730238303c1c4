// Copyright 2026 The Auralis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>

#include "auralis/audio.hpp"
#include "auralis/caunet/unet.hpp"
#include "auralis/cfm/flow.hpp"
#include "auralis/dsp/stft.hpp"
#include "auralis/pose.hpp"
#include "auralis/solvers/solvers.hpp"

namespace auralis::streampipe {

struct RenderConfig {
  dsp::StftConfig stft;
  solvers::Schedule schedule = solvers::make_schedule(
      solvers::ScheduleKind::kEarlySkip, 6, solvers::SolverKind::kMidpoint);
  float sigma = cfm::kDefaultSigma;
  std::uint64_t seed = 0;
  // Samples per streamed chunk.
  int chunk_len = 32768;
  // When false every chunk starts from zero layer histories.
  bool buffer_bank = true;

  // chunk_len must be a whole number of model frame blocks
  // (hop * resample factor) so that chunks never need frame padding.
  void validate(const caunet::NetConfig& net) const;
};

// Layer histories of the network, one set per solver evaluation index.
class BufferBank {
 public:
  caunet::StreamState& entry(int eval_index) { return entries_[eval_index]; }
  [[nodiscard]] std::size_t size() const { return entries_.size(); }
  [[nodiscard]] std::size_t num_values() const;
  [[nodiscard]] const std::map<int, caunet::StreamState>& entries() const {
    return entries_;
  }
  // FNV-1a over every stored value, in key order.
  [[nodiscard]] std::uint64_t hash() const;
  void clear() { entries_.clear(); }

 private:
  std::map<int, caunet::StreamState> entries_;
};

// Throws InputError unless the track has a pose at or after
// end_s - 1 / kDefaultPoseRate.
void require_coverage(const PoseTrack& track, double end_s, const char* name);

// Chunked binaural rendering. Each push runs streaming STFT, frame-keyed
// noise injection, the solver (one bank entry per evaluation index) and
// streaming ISTFT. Concatenated pushes plus finish() reproduce
// render_offline() on the whole input.
class StreamSession {
 public:
  // The model must outlive the session.
  StreamSession(caunet::CausalUNet& model, RenderConfig cfg);

  // Chunks must hold chunk_len samples; only the last may be shorter.
  // Poses are whole tracks in absolute time. Returns the samples completed
  // so far (the first push is short by the synthesis latency).
  AudioClip push(const AudioClip& mono_chunk, const PoseTrack& tx,
                 const PoseTrack& rx);
  // Releases the remaining samples; the session is closed afterwards.
  AudioClip finish();

  [[nodiscard]] bool poisoned() const { return poisoned_; }
  [[nodiscard]] bool closed() const { return closed_; }
  [[nodiscard]] long long chunks() const { return chunks_; }
  [[nodiscard]] long long samples_in() const { return samples_in_; }
  [[nodiscard]] const BufferBank& bank() const { return bank_; }
  BufferBank& bank() { return bank_; }
  [[nodiscard]] const RenderConfig& config() const { return cfg_; }

 private:
  AudioClip emit(AudioClip out);

  caunet::CausalUNet& model_;
  RenderConfig cfg_;
  dsp::StftStream stft_;
  dsp::IstftStream istft_;
  BufferBank bank_;
  long long chunks_ = 0;
  long long frames_ = 0;
  long long samples_in_ = 0;
  long long samples_out_ = 0;
  bool last_seen_ = false;
  bool poisoned_ = false;
  bool closed_ = false;
};

// Single pass over the whole clip with the same noise policy; the
// equivalence oracle for StreamSession. Output length equals input length.
AudioClip render_offline(caunet::CausalUNet& model, const AudioClip& mono,
                         const PoseTrack& tx, const PoseTrack& rx,
                         const RenderConfig& cfg);

// Feeds the clip through a StreamSession in chunks of cfg.chunk_len and
// returns the concatenated output, which has the input's length.
AudioClip render_streamed(caunet::CausalUNet& model, const AudioClip& mono,
                          const PoseTrack& tx, const PoseTrack& rx,
                          const RenderConfig& cfg);

// Non-streaming baseline: every chunk of cfg.chunk_len samples is rendered
// offline on its own, with fresh analysis, synthesis and layer state and its
// own noise seed, and the outputs are concatenated.
AudioClip render_independent(caunet::CausalUNet& model, const AudioClip& mono,
                             const PoseTrack& tx, const PoseTrack& rx,
                             const RenderConfig& cfg);

// Solves the flow for packed mono frames x (1, 4, bins, T) starting at
// absolute frame `first_frame`. `bank` may be null for zero histories.
numkern::Tensor4 solve_frames(caunet::CausalUNet& model, const numkern::Tensor4& x,
                     const numkern::Tensor4& poses, long long first_frame,
                     const RenderConfig& cfg, BufferBank* bank);

}  // namespace auralis::streampipe
