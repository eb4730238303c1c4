// Copyright 2026 The Auralis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "auralis/caunet/unet.hpp"

namespace auralis::caunet {

// Time-axis history (frames) prepended by every causal layer.
inline constexpr int kConvHistory = 2;
inline constexpr int kResampleHistory = 2;

enum class Resample { kNone, kDown, kUp };

struct BlockSpec {
  std::string name;
  int in_ch = 0;
  int out_ch = 0;
  Resample mode = Resample::kNone;
  int level = 0;  // temporal level of the block input
};

// Encoder blocks then decoder blocks, in execution order.
std::vector<BlockSpec> block_specs(const NetConfig& cfg);

// Deterministic per-path seed for parameter initialization.
std::uint64_t path_seed(std::uint64_t seed, const std::string& path);
Tensor4 uniform_init(numkern::Shape4 shape, float bound, std::uint64_t seed);
Tensor4 gaussian_init(numkern::Shape4 shape, float stddev, std::uint64_t seed);

// Registers "<name>.w" / "<name>.b" drawn from U(-1/sqrt(fan_in), +).
void add_conv_params(ParamStore& ps, std::uint64_t seed, const std::string& name,
                     numkern::Shape4 wshape, int out_ch, int fan_in);
// Registers "<name>.g" = 1 and "<name>.b" = 0.
void add_norm_params(ParamStore& ps, const std::string& name, int ch);
void add_block_params(ParamStore& ps, std::uint64_t seed, const BlockSpec& b,
                      int embed_dim);

// Layer builders for one forward pass. Every time-causal layer is "prepend
// history, then a valid convolution"; the history comes from `state` when
// given and is zero otherwise.
class LayerContext {
 public:
  LayerContext(Tape& tape, ParamStore& ps, int norm_groups, float norm_eps,
               StreamState* state)
      : tape_(tape), ps_(ps), groups_(norm_groups), eps_(norm_eps),
        state_(state) {}

  Var param(const std::string& path) { return tape_.param(ps_, path); }

  Var with_history(const std::string& name, const Var& x, int frames);
  // 3x3, time history 2, freq padding 1 + 1.
  Var conv3(const std::string& name, const Var& x);
  // 4x4 stride 2, time history 2, freq padding 1 + 1.
  Var down(const std::string& name, const Var& x);
  // 4x4 transposed stride 2 over 2 history frames, cropped so that high-rate
  // frame m only sees low-rate frames j with 2j + 1 <= m.
  Var up(const std::string& name, const Var& x);
  Var pointwise(const std::string& name, const Var& x);
  Var norm_act(const std::string& name, const Var& x);
  Var mlp(const std::string& name, const Var& x);
  // Norm, SiLU, conv, + t and pose projections, norm, SiLU, conv, optional
  // resample, plus the residual path. temb is (n, E, 1, 1), pemb
  // (n, E, 1, frames at the block input rate).
  Var block(const BlockSpec& b, const Var& x, const Var& temb, const Var& pemb);

 private:
  Tape& tape_;
  ParamStore& ps_;
  int groups_;
  float eps_;
  StreamState* state_;
};

}  // namespace auralis::caunet
