// Copyright 2026 The Auralis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "auralis/audio.hpp"
#include "auralis/caunet/unet.hpp"
#include "auralis/cfm/adam.hpp"
#include "auralis/cfm/flow.hpp"
#include "auralis/dsp/stft.hpp"
#include "auralis/pose.hpp"

namespace auralis::cfm {

struct TrainConfig {
  float learning_rate = 1e-4f;
  float weight_decay = 1e-5f;
  int batch_size = 4;
  long long steps = 2000;
  // Samples per training crop.
  int crop_len = 32768;
  std::uint64_t seed = 0;
  float sigma = kDefaultSigma;
  // Tiny noise and no mono condition channels.
  bool simplified_fm = false;

  [[nodiscard]] float effective_sigma() const {
    return simplified_fm ? kSimplifiedSigma : sigma;
  }
  // Condition channels the model must accept besides phi.
  [[nodiscard]] int condition_channels() const { return simplified_fm ? 0 : 4; }
  void validate(int hop) const;
};

// A clip on the frame grid: mono spectrogram duplicated to two channels and
// packed (1, 4, bins, T), the packed binaural target, and frame poses.
struct Example {
  Tensor4 x;
  Tensor4 y;
  Tensor4 poses;

  [[nodiscard]] int frames() const { return x.w(); }
};

Example make_example(const AudioClip& mono, const AudioClip& binaural,
                     const PoseTrack& tx, const PoseTrack& rx,
                     const dsp::StftConfig& stft);

// Examples stacked along the batch axis.
struct Batch {
  Tensor4 x;
  Tensor4 y;
  Tensor4 poses;

  [[nodiscard]] int size() const { return x.n(); }
};

Batch stack(std::span<const Example> examples);

// Draws the batch for a given step: clip indices and frame-aligned crop
// offsets come from a generator keyed by (seed, step), so any step can be
// reproduced without replaying earlier ones.
Batch sample_batch(std::span<const Example> data, const TrainConfig& cfg,
                   int hop, long long step);

// One optimizer step of conditional flow matching: per-element t ~ U(0, 1),
// z = x + sigma * eps, phi_t = t y + (1 - t) z, L1 between the predicted
// field and y - z.
class Trainer {
 public:
  Trainer(caunet::CausalUNet& model, TrainConfig cfg);

  // Returns the loss before the update. Throws NumericError on a non-finite
  // loss or gradient, leaving the parameters untouched.
  double step(const Batch& batch);

  [[nodiscard]] long long steps_taken() const { return adam_.steps(); }
  [[nodiscard]] const TrainConfig& config() const { return cfg_; }
  Adam& optimizer() { return adam_; }

 private:
  caunet::CausalUNet& model_;
  TrainConfig cfg_;
  Adam adam_;
};

}  // namespace auralis::cfm
