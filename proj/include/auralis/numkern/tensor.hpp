// Copyright 2026 The Auralis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace auralis::numkern {

// Layout is (batch, channels, freq_bins, time_frames), time innermost.
struct Shape4 {
  int n = 1;
  int c = 1;
  int h = 1;
  int w = 1;

  [[nodiscard]] std::size_t numel() const {
    return static_cast<std::size_t>(n) * c * h * w;
  }
  bool operator==(const Shape4&) const = default;
  [[nodiscard]] std::string str() const;
};

class Tensor4 {
 public:
  Tensor4() = default;
  explicit Tensor4(Shape4 shape, float fill = 0.0f);
  Tensor4(Shape4 shape, std::vector<float> values);

  [[nodiscard]] const Shape4& shape() const { return shape_; }
  [[nodiscard]] int n() const { return shape_.n; }
  [[nodiscard]] int c() const { return shape_.c; }
  [[nodiscard]] int h() const { return shape_.h; }
  [[nodiscard]] int w() const { return shape_.w; }
  [[nodiscard]] std::size_t numel() const { return data_.size(); }
  [[nodiscard]] bool empty() const { return data_.empty(); }

  float* data() { return data_.data(); }
  [[nodiscard]] const float* data() const { return data_.data(); }
  std::span<float> values() { return data_; }
  [[nodiscard]] std::span<const float> values() const { return data_; }
  std::vector<float>& storage() { return data_; }

  [[nodiscard]] std::size_t offset(int b, int ch, int f, int t) const {
    return ((static_cast<std::size_t>(b) * shape_.c + ch) * shape_.h + f) *
               shape_.w + t;
  }
  float& at(int b, int ch, int f, int t) { return data_[offset(b, ch, f, t)]; }
  [[nodiscard]] float at(int b, int ch, int f, int t) const {
    return data_[offset(b, ch, f, t)];
  }

  void fill(float v);
  // Elementwise accumulate; shapes must match.
  void add_(const Tensor4& other);
  void scale_(float s);

  [[nodiscard]] bool all_finite() const;

 private:
  Shape4 shape_{0, 0, 0, 0};
  std::vector<float> data_;
};

// Copies time frames [t0, t1) into a new tensor.
Tensor4 slice_time(const Tensor4& x, int t0, int t1);
// Concatenates along the time axis; n/c/h must agree.
Tensor4 concat_time(const Tensor4& a, const Tensor4& b);
// Stacks along the batch axis; c/h/w must agree.
Tensor4 concat_batch(std::span<const Tensor4> parts);
// Copies batch elements [b0, b1).
Tensor4 slice_batch(const Tensor4& x, int b0, int b1);

double dot(const Tensor4& a, const Tensor4& b);
float max_abs_diff(const Tensor4& a, const Tensor4& b);

}  // namespace auralis::numkern
