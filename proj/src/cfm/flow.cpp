// Copyright 2026 The Auralis Authors
// SPDX-License-Identifier: Apache-2.0

#include "auralis/cfm/flow.hpp"

#include <cmath>
#include <random>
#include <string>

#include "auralis/errors.hpp"

namespace auralis::cfm {
namespace {

void require_same(const Tensor4& a, const Tensor4& b, const char* what) {
  if (!(a.shape() == b.shape())) {
    throw ConfigError(std::string(what) + ": shape " + a.shape().str() +
                      " vs " + b.shape().str());
  }
}

}  // namespace

Tensor4 frame_gaussian(Shape4 shape, std::uint64_t seed, long long first_frame) {
  Tensor4 out(shape);
  const int rows = shape.c * shape.h;
  for (int b = 0; b < shape.n; ++b) {
    const std::uint64_t key = mix_seed(seed, static_cast<std::uint64_t>(b));
    for (int t = 0; t < shape.w; ++t) {
      std::mt19937_64 rng(
          mix_seed(key, static_cast<std::uint64_t>(first_frame + t)));
      std::normal_distribution<float> dist(0.0f, 1.0f);
      float* base = out.data() + out.offset(b, 0, 0, t);
      for (int r = 0; r < rows; ++r) base[static_cast<std::size_t>(r) * shape.w] = dist(rng);
    }
  }
  return out;
}

Tensor4 sample_noise(const Tensor4& x, const NoiseSpec& noise,
                     long long first_frame) {
  if (!(noise.sigma >= 0.0f)) throw ConfigError("noise sigma must be >= 0");
  if (noise.sigma == 0.0f) return x;
  Tensor4 z = frame_gaussian(x.shape(), noise.seed, first_frame);
  float* zp = z.data();
  const float* xp = x.data();
  for (std::size_t i = 0; i < z.numel(); ++i) zp[i] = xp[i] + noise.sigma * zp[i];
  return z;
}

dsp::Spectrogram sample_noise(const dsp::Spectrogram& x, const NoiseSpec& noise,
                              long long first_frame) {
  return dsp::unpack_complex(
      sample_noise(dsp::pack_complex(x), noise, first_frame), x.sample_rate());
}

Tensor4 flow_interpolate(const Tensor4& y, const Tensor4& z, float t) {
  require_same(y, z, "flow_interpolate");
  if (t < 0.0f || t > 1.0f) throw ConfigError("flow time must lie in [0, 1]");
  Tensor4 out(y.shape());
  const float* yp = y.data();
  const float* zp = z.data();
  float* op = out.data();
  for (std::size_t i = 0; i < out.numel(); ++i) {
    op[i] = t * yp[i] + (1.0f - t) * zp[i];
  }
  return out;
}

Tensor4 flow_interpolate(const Tensor4& y, const Tensor4& z,
                         std::span<const float> t) {
  require_same(y, z, "flow_interpolate");
  if (static_cast<int>(t.size()) != y.n()) {
    throw ConfigError("flow_interpolate: one t per batch element expected");
  }
  Tensor4 out(y.shape());
  const std::size_t per = y.numel() / y.n();
  for (int b = 0; b < y.n(); ++b) {
    const float tb = t[b];
    if (tb < 0.0f || tb > 1.0f) throw ConfigError("flow time must lie in [0, 1]");
    const float* yp = y.data() + b * per;
    const float* zp = z.data() + b * per;
    float* op = out.data() + b * per;
    for (std::size_t i = 0; i < per; ++i) op[i] = tb * yp[i] + (1.0f - tb) * zp[i];
  }
  return out;
}

Tensor4 target_field(const Tensor4& y, const Tensor4& z) {
  require_same(y, z, "target_field");
  Tensor4 v(y.shape());
  for (std::size_t i = 0; i < v.numel(); ++i) {
    v.values()[i] = y.values()[i] - z.values()[i];
  }
  return v;
}

Loss l1_loss(const Tensor4& pred, const Tensor4& target) {
  require_same(pred, target, "l1_loss");
  Loss out;
  out.grad = Tensor4(pred.shape());
  const float inv = 1.0f / static_cast<float>(pred.numel());
  double acc = 0.0;
  for (std::size_t i = 0; i < pred.numel(); ++i) {
    const float d = pred.values()[i] - target.values()[i];
    acc += std::abs(d);
    out.grad.values()[i] = d > 0.0f ? inv : (d < 0.0f ? -inv : 0.0f);
  }
  out.value = acc / static_cast<double>(pred.numel());
  if (!std::isfinite(out.value)) throw NumericError("loss is not finite");
  return out;
}

Loss cfm_loss(const Tensor4& pred, const Tensor4& y, const Tensor4& z) {
  return l1_loss(pred, target_field(y, z));
}

}  // namespace auralis::cfm
