// Copyright 2026 The Auralis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>

#include "auralis/dsp/stft.hpp"
#include "auralis/numkern/tensor.hpp"
#include "auralis/seed.hpp"

namespace auralis::cfm {

using numkern::Shape4;
using numkern::Tensor4;

inline constexpr float kDefaultSigma = 0.5f;
inline constexpr float kSimplifiedSigma = 1e-4f;

struct NoiseSpec {
  float sigma = kDefaultSigma;
  std::uint64_t seed = 0;
};

using auralis::mix_seed;

// Unit Gaussian draws shaped like `shape`. Every (batch element, absolute
// frame) column of c*h values comes from its own generator keyed by
// (seed, batch index, first_frame + local frame), so any chunking of the time
// axis reproduces the same numbers.
Tensor4 frame_gaussian(Shape4 shape, std::uint64_t seed,
                       long long first_frame = 0);

// z = x + sigma * eps on the real/imag packing.
Tensor4 sample_noise(const Tensor4& x, const NoiseSpec& noise,
                     long long first_frame = 0);
dsp::Spectrogram sample_noise(const dsp::Spectrogram& x, const NoiseSpec& noise,
                              long long first_frame = 0);

// phi_t = t y + (1 - t) z.
Tensor4 flow_interpolate(const Tensor4& y, const Tensor4& z, float t);
// Per batch element t.
Tensor4 flow_interpolate(const Tensor4& y, const Tensor4& z,
                         std::span<const float> t);

// v = y - z, independent of t.
Tensor4 target_field(const Tensor4& y, const Tensor4& z);

struct Loss {
  double value = 0.0;
  Tensor4 grad;  // d(loss)/d(pred)
};

// Mean absolute error over all elements; the gradient uses sign(0) = 0.
Loss l1_loss(const Tensor4& pred, const Tensor4& target);
// L1 between a predicted field and y - z.
Loss cfm_loss(const Tensor4& pred, const Tensor4& y, const Tensor4& z);

}  // namespace auralis::cfm
