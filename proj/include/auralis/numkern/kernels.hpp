// Copyright 2026 The Auralis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

#include "auralis/numkern/tensor.hpp"

namespace auralis::numkern {

// Stride along (freq, time).
struct Stride {
  int h = 1;
  int w = 1;
};

// Zero padding. left/right pad the time axis, top/bottom the freq axis.
struct Padding {
  int left = 0;
  int right = 0;
  int top = 0;
  int bottom = 0;
};

// Cross-correlation (ML convention). weight is (out_ch, in_ch, kh, kw),
// bias has out_ch entries or is empty.
Tensor4 conv2d(const Tensor4& input, const Tensor4& weight,
               std::span<const float> bias, Stride stride = {},
               Padding pad = {});

// Gradients of conv2d. Any output pointer may be null; dweight/dbias are
// accumulated into, dinput is overwritten.
void conv2d_backward(const Tensor4& input, const Tensor4& weight,
                     const Tensor4& dout, Stride stride, Padding pad,
                     Tensor4* dinput, Tensor4* dweight,
                     std::span<float> dbias);

// Adjoint of the strided conv2d. weight is (in_ch, out_ch, kh, kw). The raw
// output has (in - 1) * stride + k samples per axis; trimming is the
// caller's job.
Tensor4 conv2d_transposed(const Tensor4& input, const Tensor4& weight,
                          std::span<const float> bias, Stride stride = {});

void conv2d_transposed_backward(const Tensor4& input, const Tensor4& weight,
                                const Tensor4& dout, Stride stride,
                                Tensor4* dinput, Tensor4* dweight,
                                std::span<float> dbias);

// Per-(batch, group, frame) statistics, kept for the backward pass.
struct GroupNormStats {
  int groups = 0;
  std::vector<float> mean;  // [n][groups][w]
  std::vector<float> rstd;  // [n][groups][w]
};

// Group normalization whose statistics never cross time frames: each
// (batch, group, frame) slice of channels x freq bins is normalized on its own.
Tensor4 frame_group_norm(const Tensor4& input, int num_groups,
                         std::span<const float> gamma,
                         std::span<const float> beta, float eps,
                         GroupNormStats* stats = nullptr);

void frame_group_norm_backward(const Tensor4& input,
                               const GroupNormStats& stats,
                               std::span<const float> gamma,
                               const Tensor4& dout, Tensor4* dinput,
                               std::span<float> dgamma,
                               std::span<float> dbeta);

// Groups actually used for a channel count: `requested`, clamped to the
// channel count.
int effective_groups(int channels, int requested);

Tensor4 silu(const Tensor4& input);
Tensor4 silu_backward(const Tensor4& input, const Tensor4& dout);

}  // namespace auralis::numkern
