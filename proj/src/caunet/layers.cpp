// Copyright 2026 The Auralis Authors
// SPDX-License-Identifier: Apache-2.0

#include "auralis/caunet/layers.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "auralis/errors.hpp"
#include "auralis/numkern/kernels.hpp"

namespace auralis::caunet {
namespace {

using numkern::Padding;
using numkern::Shape4;

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

std::uint64_t path_seed(std::uint64_t seed, const std::string& path) {
  std::uint64_t x = seed ^ fnv1a(path);
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Tensor4 uniform_init(Shape4 shape, float bound, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> d(-bound, bound);
  Tensor4 t(shape);
  for (float& v : t.values()) v = d(rng);
  return t;
}

Tensor4 gaussian_init(Shape4 shape, float scale, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> d(0.0f, scale);
  Tensor4 t(shape);
  for (float& v : t.values()) v = d(rng);
  return t;
}

// Weight and bias of a convolution with the given fan-in, PyTorch default
// style bounds.
void add_conv_params(ParamStore& ps, std::uint64_t seed, const std::string& name,
                     Shape4 wshape, int out_ch, int fan_in) {
  const float bound = 1.0f / std::sqrt(static_cast<float>(fan_in));
  ps.add(name + ".w", uniform_init(wshape, bound, path_seed(seed, name + ".w")));
  ps.add(name + ".b",
         uniform_init({1, 1, 1, out_ch}, bound, path_seed(seed, name + ".b")));
}

void add_norm_params(ParamStore& ps, const std::string& name, int ch) {
  ps.add(name + ".g", Tensor4({1, 1, 1, ch}, 1.0f));
  ps.add(name + ".b", Tensor4({1, 1, 1, ch}, 0.0f));
}

std::vector<BlockSpec> block_specs(const NetConfig& cfg) {
  const auto ch = cfg.block_channels();
  const int nb = cfg.num_blocks();
  const int r = cfg.num_resample;
  std::vector<BlockSpec> specs;
  for (int i = 0; i < nb; ++i) {
    specs.push_back({"enc." + std::to_string(i), ch[i], ch[i + 1],
                     i < r ? Resample::kDown : Resample::kNone,
                     std::min(i, r)});
  }
  for (int k = 0; k < nb; ++k) {
    const int i = nb - 1 - k;
    const int in = k == 0 ? ch[nb] : 2 * ch[i + 1];
    specs.push_back({"dec." + std::to_string(i), in, ch[i],
                     i < r ? Resample::kUp : Resample::kNone,
                     std::min(i + 1, r)});
  }
  return specs;
}

void add_block_params(ParamStore& ps, std::uint64_t seed, const BlockSpec& b,
                      int e) {
  add_norm_params(ps, b.name + ".norm1", b.in_ch);
  add_conv_params(ps, seed, b.name + ".conv1", {b.out_ch, b.in_ch, 3, 3},
                  b.out_ch, b.in_ch * 9);
  add_conv_params(ps, seed, b.name + ".t_proj", {b.out_ch, e, 1, 1}, b.out_ch, e);
  add_conv_params(ps, seed, b.name + ".pose_proj", {b.out_ch, e, 1, 1}, b.out_ch,
                  e);
  add_norm_params(ps, b.name + ".norm2", b.out_ch);
  add_conv_params(ps, seed, b.name + ".conv2", {b.out_ch, b.out_ch, 3, 3},
                  b.out_ch, b.out_ch * 9);
  switch (b.mode) {
    case Resample::kDown:
      add_conv_params(ps, seed, b.name + ".resample", {b.out_ch, b.out_ch, 4, 4},
                      b.out_ch, b.out_ch * 16);
      add_conv_params(ps, seed, b.name + ".residual", {b.out_ch, b.in_ch, 4, 4},
                      b.out_ch, b.in_ch * 16);
      break;
    case Resample::kUp:
      // Transposed weights are (in, out, kh, kw).
      add_conv_params(ps, seed, b.name + ".resample", {b.out_ch, b.out_ch, 4, 4},
                      b.out_ch, b.out_ch * 16);
      add_conv_params(ps, seed, b.name + ".residual", {b.in_ch, b.out_ch, 4, 4},
                      b.out_ch, b.out_ch * 16);
      break;
    case Resample::kNone:
      if (b.in_ch != b.out_ch) {
        add_conv_params(ps, seed, b.name + ".residual",
                        {b.out_ch, b.in_ch, 1, 1}, b.out_ch, b.in_ch);
      }
      break;
  }
}

Var LayerContext::with_history(const std::string& name, const Var& x, int frames) {
  const Tensor4& xv = x->value();
  const Shape4 hs{xv.n(), xv.c(), xv.h(), frames};
  Tensor4 hist;
  if (state_ != nullptr) {
    auto it = state_->layers.find(name);
    if (it != state_->layers.end()) {
      if (!(it->second.shape() == hs)) {
        throw ConfigError("stream history for '" + name + "' has shape " +
                          it->second.shape().str() + ", expected " + hs.str());
      }
      hist = it->second;
    }
  }
  if (hist.empty()) hist = Tensor4(hs);
  Var padded = numkern::prepend_time(tape_, hist, x);
  if (state_ != nullptr) {
    const Tensor4& pv = padded->value();
    state_->layers[name] = numkern::slice_time(pv, pv.w() - frames, pv.w());
  }
  return padded;
}

Var LayerContext::conv3(const std::string& name, const Var& x) {
  Var h = with_history(name, x, kConvHistory);
  return numkern::conv2d(tape_, h, param(name + ".w"), param(name + ".b"), {},
                         Padding{0, 0, 1, 1});
}

Var LayerContext::down(const std::string& name, const Var& x) {
  Var h = with_history(name, x, kResampleHistory);
  return numkern::conv2d(tape_, h, param(name + ".w"), param(name + ".b"), {2, 2},
                         Padding{0, 0, 1, 1});
}

// Transposed 4x4 / stride 2. With two history frames the raw output has
// 2(n + 2) + 2 frames; frame 3 of it is the first one whose inputs are all
// at or before the matching low-rate frame.
Var LayerContext::up(const std::string& name, const Var& x) {
  const int n = x->value().w();
  const int bins = x->value().h();
  Var h = with_history(name, x, kResampleHistory);
  Var raw = numkern::conv2d_transposed(tape_, h, param(name + ".w"),
                                       param(name + ".b"), {2, 2});
  return numkern::crop(tape_, raw, 1, 2 * bins, 3, 2 * n);
}

Var LayerContext::pointwise(const std::string& name, const Var& x) {
  return numkern::conv2d(tape_, x, param(name + ".w"), param(name + ".b"));
}

Var LayerContext::norm_act(const std::string& name, const Var& x) {
  const int groups = numkern::effective_groups(x->value().c(), groups_);
  Var h = numkern::frame_group_norm(tape_, x, param(name + ".g"), param(name + ".b"),
                                    groups, eps_);
  return numkern::silu(tape_, h);
}

Var LayerContext::mlp(const std::string& name, const Var& x) {
  Var h = pointwise(name + ".fc1", x);
  return pointwise(name + ".fc2", numkern::silu(tape_, h));
}

Var LayerContext::block(const BlockSpec& b, const Var& x, const Var& temb, const Var& pemb) {
  Var h = conv3(b.name + ".conv1", norm_act(b.name + ".norm1", x));
  h = numkern::add_broadcast(tape_, h, pointwise(b.name + ".t_proj", temb));
  h = numkern::add_broadcast(tape_, h, pointwise(b.name + ".pose_proj", pemb));
  h = conv3(b.name + ".conv2", norm_act(b.name + ".norm2", h));
  Var r = x;
  switch (b.mode) {
    case Resample::kDown:
      h = down(b.name + ".resample", h);
      r = down(b.name + ".residual", x);
      break;
    case Resample::kUp:
      h = up(b.name + ".resample", h);
      r = up(b.name + ".residual", x);
      break;
    case Resample::kNone:
      if (b.in_ch != b.out_ch) r = pointwise(b.name + ".residual", x);
      break;
  }
  return numkern::add(tape_, h, r);
}

}  // namespace auralis::caunet
