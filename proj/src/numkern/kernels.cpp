// Copyright 2026 The Auralis Authors
// SPDX-License-Identifier: Apache-2.0

#include "auralis/numkern/kernels.hpp"

#include <cblas.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>

#include "auralis/errors.hpp"

namespace auralis::numkern {
namespace {

struct Geometry {
  int in_c, in_h, in_w;
  int kh, kw;
  Stride stride;
  Padding pad;
  int out_h, out_w;

  [[nodiscard]] int k_rows() const { return in_c * kh * kw; }
  [[nodiscard]] int cols() const { return out_h * out_w; }
};

Geometry conv_geometry(const Shape4& in, int kh, int kw, Stride stride,
                       Padding pad) {
  if (stride.h < 1 || stride.w < 1) {
    throw ConfigError("conv2d: stride must be >= 1");
  }
  const int ph = in.h + pad.top + pad.bottom;
  const int pw = in.w + pad.left + pad.right;
  if (ph < kh || pw < kw) {
    throw ConfigError("conv2d: padded input " + std::to_string(ph) + "x" +
                      std::to_string(pw) + " smaller than kernel " +
                      std::to_string(kh) + "x" + std::to_string(kw));
  }
  return {in.c, in.h, in.w, kh, kw, stride, pad,
          (ph - kh) / stride.h + 1, (pw - kw) / stride.w + 1};
}

bool is_pointwise(const Geometry& g) {
  return g.kh == 1 && g.kw == 1 && g.stride.h == 1 && g.stride.w == 1 &&
         g.pad.left == 0 && g.pad.right == 0 && g.pad.top == 0 &&
         g.pad.bottom == 0;
}

// col is (in_c*kh*kw) x (out_h*out_w), row-major.
void im2col(const float* img, const Geometry& g, float* col) {
  const int cols = g.cols();
  for (int c = 0; c < g.in_c; ++c) {
    const float* plane = img + static_cast<std::size_t>(c) * g.in_h * g.in_w;
    for (int i = 0; i < g.kh; ++i) {
      for (int j = 0; j < g.kw; ++j) {
        float* row = col + (static_cast<std::size_t>(c * g.kh + i) * g.kw + j) *
                               cols;
        for (int oh = 0; oh < g.out_h; ++oh) {
          const int ih = oh * g.stride.h + i - g.pad.top;
          float* dst = row + static_cast<std::size_t>(oh) * g.out_w;
          if (ih < 0 || ih >= g.in_h) {
            std::fill(dst, dst + g.out_w, 0.0f);
            continue;
          }
          const float* src = plane + static_cast<std::size_t>(ih) * g.in_w;
          if (g.stride.w == 1) {
            // contiguous run with zero borders
            const int start = j - g.pad.left;
            int ow = 0;
            for (; ow < g.out_w && start + ow < 0; ++ow) dst[ow] = 0.0f;
            const int stop = std::min(g.out_w, g.in_w - start);
            if (stop > ow) {
              std::memcpy(dst + ow, src + start + ow,
                          sizeof(float) * (stop - ow));
              ow = stop;
            }
            for (; ow < g.out_w; ++ow) dst[ow] = 0.0f;
          } else {
            for (int ow = 0; ow < g.out_w; ++ow) {
              const int iw = ow * g.stride.w + j - g.pad.left;
              dst[ow] = (iw >= 0 && iw < g.in_w) ? src[iw] : 0.0f;
            }
          }
        }
      }
    }
  }
}

// Scatter-add inverse of im2col. img must be zeroed by the caller.
void col2im(const float* col, const Geometry& g, float* img) {
  const int cols = g.cols();
  for (int c = 0; c < g.in_c; ++c) {
    float* plane = img + static_cast<std::size_t>(c) * g.in_h * g.in_w;
    for (int i = 0; i < g.kh; ++i) {
      for (int j = 0; j < g.kw; ++j) {
        const float* row =
            col + (static_cast<std::size_t>(c * g.kh + i) * g.kw + j) * cols;
        for (int oh = 0; oh < g.out_h; ++oh) {
          const int ih = oh * g.stride.h + i - g.pad.top;
          if (ih < 0 || ih >= g.in_h) continue;
          float* dst = plane + static_cast<std::size_t>(ih) * g.in_w;
          const float* src = row + static_cast<std::size_t>(oh) * g.out_w;
          for (int ow = 0; ow < g.out_w; ++ow) {
            const int iw = ow * g.stride.w + j - g.pad.left;
            if (iw >= 0 && iw < g.in_w) dst[iw] += src[ow];
          }
        }
      }
    }
  }
}

void check_bias(std::span<const float> bias, int channels, const char* op) {
  if (!bias.empty() && static_cast<int>(bias.size()) != channels) {
    throw ConfigError(std::string(op) + ": bias length " +
                      std::to_string(bias.size()) + " != channels " +
                      std::to_string(channels));
  }
}

void add_bias(Tensor4& out, std::span<const float> bias) {
  if (bias.empty()) return;
  const std::size_t plane = static_cast<std::size_t>(out.h()) * out.w();
  for (int b = 0; b < out.n(); ++b) {
    for (int c = 0; c < out.c(); ++c) {
      float* p = out.data() + (static_cast<std::size_t>(b) * out.c() + c) * plane;
      const float v = bias[c];
      for (std::size_t i = 0; i < plane; ++i) p[i] += v;
    }
  }
}

void accumulate_bias_grad(const Tensor4& dout, std::span<float> dbias) {
  if (dbias.empty()) return;
  const std::size_t plane = static_cast<std::size_t>(dout.h()) * dout.w();
  for (int b = 0; b < dout.n(); ++b) {
    for (int c = 0; c < dout.c(); ++c) {
      const float* p =
          dout.data() + (static_cast<std::size_t>(b) * dout.c() + c) * plane;
      double acc = 0.0;
      for (std::size_t i = 0; i < plane; ++i) acc += p[i];
      dbias[c] += static_cast<float>(acc);
    }
  }
}

}  // namespace

Tensor4 conv2d(const Tensor4& input, const Tensor4& weight,
               std::span<const float> bias, Stride stride, Padding pad) {
  if (weight.c() != input.c()) {
    throw ConfigError("conv2d: weight in_ch " + std::to_string(weight.c()) +
                      " != input channels " + std::to_string(input.c()));
  }
  check_bias(bias, weight.n(), "conv2d");
  const Geometry g =
      conv_geometry(input.shape(), weight.h(), weight.w(), stride, pad);
  const int out_c = weight.n();
  Tensor4 out({input.n(), out_c, g.out_h, g.out_w});
  const int k = g.k_rows();
  const int cols = g.cols();
  const bool pointwise = is_pointwise(g);
  std::vector<float> col(pointwise ? 0 : static_cast<std::size_t>(k) * cols);
  const std::size_t in_plane = static_cast<std::size_t>(input.c()) * input.h() *
                               input.w();
  const std::size_t out_plane = static_cast<std::size_t>(out_c) * cols;
  for (int b = 0; b < input.n(); ++b) {
    const float* src = input.data() + b * in_plane;
    if (!pointwise) im2col(src, g, col.data());
    cblas_sgemm(CblasRowMajor, CblasNoTrans, CblasNoTrans, out_c, cols, k,
                1.0f, weight.data(), k, pointwise ? src : col.data(), cols,
                0.0f, out.data() + b * out_plane, cols);
  }
  add_bias(out, bias);
  return out;
}

void conv2d_backward(const Tensor4& input, const Tensor4& weight,
                     const Tensor4& dout, Stride stride, Padding pad,
                     Tensor4* dinput, Tensor4* dweight,
                     std::span<float> dbias) {
  const Geometry g =
      conv_geometry(input.shape(), weight.h(), weight.w(), stride, pad);
  const int out_c = weight.n();
  if (dout.n() != input.n() || dout.c() != out_c || dout.h() != g.out_h ||
      dout.w() != g.out_w) {
    throw ConfigError("conv2d_backward: dout shape " + dout.shape().str());
  }
  const int k = g.k_rows();
  const int cols = g.cols();
  const bool pointwise = is_pointwise(g);
  std::vector<float> col(pointwise ? 0 : static_cast<std::size_t>(k) * cols);
  std::vector<float> dcol(pointwise ? 0 : static_cast<std::size_t>(k) * cols);
  const std::size_t in_plane = static_cast<std::size_t>(input.c()) * input.h() *
                               input.w();
  const std::size_t out_plane = static_cast<std::size_t>(out_c) * cols;
  if (dinput != nullptr) *dinput = Tensor4(input.shape());
  for (int b = 0; b < input.n(); ++b) {
    const float* src = input.data() + b * in_plane;
    const float* dy = dout.data() + b * out_plane;
    if (dweight != nullptr) {
      if (!pointwise) im2col(src, g, col.data());
      // dW (out_c x k) += dy (out_c x cols) * col^T
      cblas_sgemm(CblasRowMajor, CblasNoTrans, CblasTrans, out_c, k, cols,
                  1.0f, dy, cols, pointwise ? src : col.data(), cols, 1.0f,
                  dweight->data(), k);
    }
    if (dinput != nullptr) {
      float* dx = dinput->data() + b * in_plane;
      if (pointwise) {
        cblas_sgemm(CblasRowMajor, CblasTrans, CblasNoTrans, k, cols, out_c,
                    1.0f, weight.data(), k, dy, cols, 0.0f, dx, cols);
      } else {
        cblas_sgemm(CblasRowMajor, CblasTrans, CblasNoTrans, k, cols, out_c,
                    1.0f, weight.data(), k, dy, cols, 0.0f, dcol.data(), cols);
        col2im(dcol.data(), g, dx);
      }
    }
  }
  accumulate_bias_grad(dout, dbias);
}

Tensor4 conv2d_transposed(const Tensor4& input, const Tensor4& weight,
                          std::span<const float> bias, Stride stride) {
  if (weight.n() != input.c()) {
    throw ConfigError("conv2d_transposed: weight in_ch " +
                      std::to_string(weight.n()) + " != input channels " +
                      std::to_string(input.c()));
  }
  if (stride.h < 1 || stride.w < 1) {
    throw ConfigError("conv2d_transposed: stride must be >= 1");
  }
  const int out_c = weight.c();
  check_bias(bias, out_c, "conv2d_transposed");
  const int kh = weight.h();
  const int kw = weight.w();
  const int out_h = (input.h() - 1) * stride.h + kh;
  const int out_w = (input.w() - 1) * stride.w + kw;
  // The forward of a transposed conv is the data-gradient of a conv whose
  // input is the raw output.
  const Geometry g{out_c, out_h, out_w, kh, kw, stride, {}, input.h(), input.w()};
  Tensor4 out({input.n(), out_c, out_h, out_w});
  const int k = g.k_rows();
  const int cols = g.cols();
  std::vector<float> col(static_cast<std::size_t>(k) * cols);
  const std::size_t in_plane = static_cast<std::size_t>(input.c()) * cols;
  const std::size_t out_plane = static_cast<std::size_t>(out_c) * out_h * out_w;
  for (int b = 0; b < input.n(); ++b) {
    // col (k x cols) = W^T (k x in_c) * x (in_c x cols)
    cblas_sgemm(CblasRowMajor, CblasTrans, CblasNoTrans, k, cols, input.c(),
                1.0f, weight.data(), k, input.data() + b * in_plane, cols, 0.0f,
                col.data(), cols);
    col2im(col.data(), g, out.data() + b * out_plane);
  }
  add_bias(out, bias);
  return out;
}

void conv2d_transposed_backward(const Tensor4& input, const Tensor4& weight,
                                const Tensor4& dout, Stride stride,
                                Tensor4* dinput, Tensor4* dweight,
                                std::span<float> dbias) {
  const int out_c = weight.c();
  const int kh = weight.h();
  const int kw = weight.w();
  const int out_h = (input.h() - 1) * stride.h + kh;
  const int out_w = (input.w() - 1) * stride.w + kw;
  if (dout.n() != input.n() || dout.c() != out_c || dout.h() != out_h ||
      dout.w() != out_w) {
    throw ConfigError("conv2d_transposed_backward: dout shape " +
                      dout.shape().str());
  }
  const Geometry g{out_c, out_h, out_w, kh, kw, stride, {}, input.h(), input.w()};
  const int k = g.k_rows();
  const int cols = g.cols();
  std::vector<float> col(static_cast<std::size_t>(k) * cols);
  const std::size_t in_plane = static_cast<std::size_t>(input.c()) * cols;
  const std::size_t out_plane = static_cast<std::size_t>(out_c) * out_h * out_w;
  if (dinput != nullptr) *dinput = Tensor4(input.shape());
  for (int b = 0; b < input.n(); ++b) {
    im2col(dout.data() + b * out_plane, g, col.data());
    if (dinput != nullptr) {
      // dx (in_c x cols) = W (in_c x k) * col (k x cols)
      cblas_sgemm(CblasRowMajor, CblasNoTrans, CblasNoTrans, input.c(), cols,
                  k, 1.0f, weight.data(), k, col.data(), cols, 0.0f,
                  dinput->data() + b * in_plane, cols);
    }
    if (dweight != nullptr) {
      // dW (in_c x k) += x (in_c x cols) * col^T
      cblas_sgemm(CblasRowMajor, CblasNoTrans, CblasTrans, input.c(), k, cols,
                  1.0f, input.data() + b * in_plane, cols, col.data(), cols,
                  1.0f, dweight->data(), k);
    }
  }
  accumulate_bias_grad(dout, dbias);
}

int effective_groups(int channels, int requested) {
  return std::max(1, std::min(requested, channels));
}

Tensor4 frame_group_norm(const Tensor4& input, int num_groups,
                         std::span<const float> gamma,
                         std::span<const float> beta, float eps,
                         GroupNormStats* stats) {
  const int C = input.c();
  if (num_groups < 1 || C % num_groups != 0) {
    throw ConfigError("frame_group_norm: " + std::to_string(C) +
                      " channels not divisible by " +
                      std::to_string(num_groups) + " groups");
  }
  if (static_cast<int>(gamma.size()) != C || static_cast<int>(beta.size()) != C) {
    throw ConfigError("frame_group_norm: affine params must have " +
                      std::to_string(C) + " entries");
  }
  const int N = input.n();
  const int H = input.h();
  const int W = input.w();
  const int cpg = C / num_groups;
  const double count = static_cast<double>(cpg) * H;
  Tensor4 out(input.shape());
  std::vector<double> sum(W);
  std::vector<double> sq(W);
  std::vector<float> mean(W);
  std::vector<float> rstd(W);
  if (stats != nullptr) {
    stats->groups = num_groups;
    stats->mean.assign(static_cast<std::size_t>(N) * num_groups * W, 0.0f);
    stats->rstd.assign(static_cast<std::size_t>(N) * num_groups * W, 0.0f);
  }
  for (int b = 0; b < N; ++b) {
    for (int g = 0; g < num_groups; ++g) {
      std::fill(sum.begin(), sum.end(), 0.0);
      for (int c = g * cpg; c < (g + 1) * cpg; ++c) {
        for (int f = 0; f < H; ++f) {
          const float* row = input.data() + input.offset(b, c, f, 0);
          for (int t = 0; t < W; ++t) sum[t] += row[t];
        }
      }
      for (int t = 0; t < W; ++t) mean[t] = static_cast<float>(sum[t] / count);
      std::fill(sq.begin(), sq.end(), 0.0);
      for (int c = g * cpg; c < (g + 1) * cpg; ++c) {
        for (int f = 0; f < H; ++f) {
          const float* row = input.data() + input.offset(b, c, f, 0);
          for (int t = 0; t < W; ++t) {
            const double d = static_cast<double>(row[t]) - mean[t];
            sq[t] += d * d;
          }
        }
      }
      for (int t = 0; t < W; ++t) {
        rstd[t] = static_cast<float>(1.0 / std::sqrt(sq[t] / count + eps));
      }
      for (int c = g * cpg; c < (g + 1) * cpg; ++c) {
        const float ga = gamma[c];
        const float be = beta[c];
        for (int f = 0; f < H; ++f) {
          const float* row = input.data() + input.offset(b, c, f, 0);
          float* dst = out.data() + out.offset(b, c, f, 0);
          for (int t = 0; t < W; ++t) {
            dst[t] = (row[t] - mean[t]) * rstd[t] * ga + be;
          }
        }
      }
      if (stats != nullptr) {
        const std::size_t base = (static_cast<std::size_t>(b) * num_groups + g) * W;
        std::copy(mean.begin(), mean.end(), stats->mean.begin() + base);
        std::copy(rstd.begin(), rstd.end(), stats->rstd.begin() + base);
      }
    }
  }
  return out;
}

void frame_group_norm_backward(const Tensor4& input,
                               const GroupNormStats& stats,
                               std::span<const float> gamma,
                               const Tensor4& dout, Tensor4* dinput,
                               std::span<float> dgamma,
                               std::span<float> dbeta) {
  const int N = input.n();
  const int C = input.c();
  const int H = input.h();
  const int W = input.w();
  const int G = stats.groups;
  const int cpg = C / G;
  const double count = static_cast<double>(cpg) * H;
  if (dinput != nullptr) *dinput = Tensor4(input.shape());
  std::vector<double> sum_dy(W);
  std::vector<double> sum_dy_xhat(W);
  for (int b = 0; b < N; ++b) {
    for (int g = 0; g < G; ++g) {
      const std::size_t base = (static_cast<std::size_t>(b) * G + g) * W;
      const float* mean = stats.mean.data() + base;
      const float* rstd = stats.rstd.data() + base;
      std::fill(sum_dy.begin(), sum_dy.end(), 0.0);
      std::fill(sum_dy_xhat.begin(), sum_dy_xhat.end(), 0.0);
      for (int c = g * cpg; c < (g + 1) * cpg; ++c) {
        double dg = 0.0;
        double db = 0.0;
        for (int f = 0; f < H; ++f) {
          const float* x = input.data() + input.offset(b, c, f, 0);
          const float* dy = dout.data() + dout.offset(b, c, f, 0);
          for (int t = 0; t < W; ++t) {
            const double xhat = (static_cast<double>(x[t]) - mean[t]) * rstd[t];
            dg += dy[t] * xhat;
            db += dy[t];
            const double dyh = static_cast<double>(dy[t]) * gamma[c];
            sum_dy[t] += dyh;
            sum_dy_xhat[t] += dyh * xhat;
          }
        }
        if (!dgamma.empty()) dgamma[c] += static_cast<float>(dg);
        if (!dbeta.empty()) dbeta[c] += static_cast<float>(db);
      }
      if (dinput == nullptr) continue;
      for (int c = g * cpg; c < (g + 1) * cpg; ++c) {
        for (int f = 0; f < H; ++f) {
          const float* x = input.data() + input.offset(b, c, f, 0);
          const float* dy = dout.data() + dout.offset(b, c, f, 0);
          float* dx = dinput->data() + dinput->offset(b, c, f, 0);
          for (int t = 0; t < W; ++t) {
            const double xhat = (static_cast<double>(x[t]) - mean[t]) * rstd[t];
            const double dyh = static_cast<double>(dy[t]) * gamma[c];
            dx[t] = static_cast<float>(
                rstd[t] * (dyh - sum_dy[t] / count - xhat * sum_dy_xhat[t] / count));
          }
        }
      }
    }
  }
}

Tensor4 silu(const Tensor4& input) {
  Tensor4 out(input.shape());
  const float* x = input.data();
  float* y = out.data();
  for (std::size_t i = 0; i < input.numel(); ++i) {
    y[i] = x[i] / (1.0f + std::exp(-x[i]));
  }
  return out;
}

Tensor4 silu_backward(const Tensor4& input, const Tensor4& dout) {
  Tensor4 dx(input.shape());
  const float* x = input.data();
  const float* dy = dout.data();
  float* d = dx.data();
  for (std::size_t i = 0; i < input.numel(); ++i) {
    const float s = 1.0f / (1.0f + std::exp(-x[i]));
    d[i] = dy[i] * s * (1.0f + x[i] * (1.0f - s));
  }
  return dx;
}

}  // namespace auralis::numkern
