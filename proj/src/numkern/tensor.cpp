// Copyright 2026 The Auralis Authors
// SPDX-License-Identifier: Apache-2.0

#include "auralis/numkern/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "auralis/errors.hpp"

namespace auralis::numkern {

std::string Shape4::str() const {
  return "(" + std::to_string(n) + "," + std::to_string(c) + "," +
         std::to_string(h) + "," + std::to_string(w) + ")";
}

Tensor4::Tensor4(Shape4 shape, float fill) : shape_(shape) {
  if (shape.n < 1 || shape.c < 1 || shape.h < 1 || shape.w < 1) {
    throw ConfigError("tensor dims must be >= 1, got " + shape.str());
  }
  data_.assign(shape.numel(), fill);
}

Tensor4::Tensor4(Shape4 shape, std::vector<float> values)
    : shape_(shape), data_(std::move(values)) {
  if (shape.n < 1 || shape.c < 1 || shape.h < 1 || shape.w < 1) {
    throw ConfigError("tensor dims must be >= 1, got " + shape.str());
  }
  if (data_.size() != shape.numel()) {
    throw ConfigError("tensor data length " + std::to_string(data_.size()) +
                      " does not match shape " + shape.str());
  }
}

void Tensor4::fill(float v) { std::fill(data_.begin(), data_.end(), v); }

void Tensor4::add_(const Tensor4& other) {
  if (!(other.shape_ == shape_)) {
    throw ConfigError("add_: shape " + other.shape_.str() + " vs " +
                      shape_.str());
  }
  const float* src = other.data();
  float* dst = data();
  for (std::size_t i = 0; i < data_.size(); ++i) dst[i] += src[i];
}

void Tensor4::scale_(float s) {
  for (float& v : data_) v *= s;
}

bool Tensor4::all_finite() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](float v) { return std::isfinite(v); });
}

Tensor4 slice_time(const Tensor4& x, int t0, int t1) {
  if (t0 < 0 || t1 > x.w() || t0 >= t1) {
    throw ConfigError("slice_time: bad range [" + std::to_string(t0) + "," +
                      std::to_string(t1) + ") for " + x.shape().str());
  }
  Tensor4 out({x.n(), x.c(), x.h(), t1 - t0});
  const std::size_t rows = static_cast<std::size_t>(x.n()) * x.c() * x.h();
  const int len = t1 - t0;
  for (std::size_t r = 0; r < rows; ++r) {
    std::memcpy(out.data() + r * len, x.data() + r * x.w() + t0,
                sizeof(float) * len);
  }
  return out;
}

Tensor4 concat_time(const Tensor4& a, const Tensor4& b) {
  if (a.n() != b.n() || a.c() != b.c() || a.h() != b.h()) {
    throw ConfigError("concat_time: " + a.shape().str() + " vs " +
                      b.shape().str());
  }
  const int wa = a.w();
  const int wb = b.w();
  Tensor4 out({a.n(), a.c(), a.h(), wa + wb});
  const std::size_t rows = static_cast<std::size_t>(a.n()) * a.c() * a.h();
  for (std::size_t r = 0; r < rows; ++r) {
    float* dst = out.data() + r * (wa + wb);
    std::memcpy(dst, a.data() + r * wa, sizeof(float) * wa);
    std::memcpy(dst + wa, b.data() + r * wb, sizeof(float) * wb);
  }
  return out;
}

Tensor4 concat_batch(std::span<const Tensor4> parts) {
  if (parts.empty()) throw ConfigError("concat_batch: no tensors");
  const Shape4 s0 = parts.front().shape();
  int n = 0;
  for (const Tensor4& t : parts) {
    if (t.c() != s0.c || t.h() != s0.h || t.w() != s0.w) {
      throw ConfigError("concat_batch: " + s0.str() + " vs " + t.shape().str());
    }
    n += t.n();
  }
  Tensor4 out({n, s0.c, s0.h, s0.w});
  float* dst = out.data();
  for (const Tensor4& t : parts) {
    std::memcpy(dst, t.data(), sizeof(float) * t.numel());
    dst += t.numel();
  }
  return out;
}

Tensor4 slice_batch(const Tensor4& x, int b0, int b1) {
  if (b0 < 0 || b1 > x.n() || b0 >= b1) {
    throw ConfigError("slice_batch: bad range for " + x.shape().str());
  }
  const std::size_t per = x.numel() / x.n();
  Tensor4 out({b1 - b0, x.c(), x.h(), x.w()});
  std::memcpy(out.data(), x.data() + per * b0, sizeof(float) * per * (b1 - b0));
  return out;
}

double dot(const Tensor4& a, const Tensor4& b) {
  if (!(a.shape() == b.shape())) {
    throw ConfigError("dot: shape mismatch");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < a.numel(); ++i) {
    acc += static_cast<double>(a.data()[i]) * b.data()[i];
  }
  return acc;
}

float max_abs_diff(const Tensor4& a, const Tensor4& b) {
  if (!(a.shape() == b.shape())) {
    throw ConfigError("max_abs_diff: shape mismatch");
  }
  float m = 0.0f;
  for (std::size_t i = 0; i < a.numel(); ++i) {
    m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  }
  return m;
}

}  // namespace auralis::numkern
