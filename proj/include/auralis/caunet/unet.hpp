// Copyright 2026 The Auralis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "auralis/caunet/config.hpp"
#include "auralis/numkern/param_store.hpp"
#include "auralis/numkern/tape.hpp"
#include "auralis/pose.hpp"

namespace auralis::caunet {

using numkern::ParamStore;
using numkern::Tape;
using numkern::Tensor4;
using numkern::Var;

inline constexpr int kPoseDims = 7;
inline constexpr int kFramePoseDims = 2 * kPoseDims;  // tx then rx

// [cos(2 pi B v), sin(2 pi B v)] for a (rows x dim) matrix B.
std::vector<float> rgfe_encode(std::span<const float> v,
                               std::span<const float> fourier, int rows);

// Per-frame poses (1, 14, 1, frames): tx position, tx quaternion, rx
// position, rx quaternion. Frame f ends at sample (first_frame + f + 1) * hop
// and takes the latest pose at or before that instant (zero-order hold).
Tensor4 frame_poses(const PoseTrack& tx, const PoseTrack& rx, int frames,
                    long long first_frame, int hop, int sample_rate);

// Time histories of every causal layer, keyed by layer name. A default
// constructed state is the all-zero history of an offline pass.
struct StreamState {
  std::map<std::string, Tensor4> layers;
  // Set after a forward pass that needed frame padding; the histories then
  // contain padding and further chunks are refused.
  bool sealed = false;

  [[nodiscard]] std::size_t num_values() const;
};

// Causal U-Net predicting the flow field. Inputs are real-packed
// spectrograms (n, 4, bins, frames).
class CausalUNet {
 public:
  explicit CausalUNet(NetConfig cfg);
  // Adopts an existing parameter set (e.g. from a checkpoint); every expected
  // path must be present with the expected shape.
  CausalUNet(NetConfig cfg, ParamStore params);

  [[nodiscard]] const NetConfig& config() const { return cfg_; }
  ParamStore& params() { return params_; }
  [[nodiscard]] const ParamStore& params() const { return params_; }

  // phi: (n, 4, bins, T); cond: (n, 4, bins, T) or null when the config has
  // no condition channels; t: n flow times; poses: (n, 14, 1, T).
  // With `state`, layer histories are read from and written back to it.
  Var forward(Tape& tape, const Var& phi, const Tensor4* cond,
              std::span<const float> t, const Tensor4& poses,
              StreamState* state = nullptr);

  // Inference convenience wrapper.
  Tensor4 predict(const Tensor4& phi, const Tensor4* cond,
                  std::span<const float> t, const Tensor4& poses,
                  StreamState* state = nullptr);

  // Pose features after the RGFE lift, one column per frame: (n, 4*rows, 1, T).
  [[nodiscard]] Tensor4 pose_features(const Tensor4& poses) const;

  // Upper bound on the number of input frames, the current one included,
  // that one output frame can depend on.
  [[nodiscard]] int receptive_field() const;

 private:
  void build();
  void check_params() const;

  NetConfig cfg_;
  ParamStore params_;
};

}  // namespace auralis::caunet
