// Copyright 2026 The Auralis Authors
// SPDX-License-Identifier: Apache-2.0

#include "auralis/caunet/unet.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "auralis/caunet/layers.hpp"
#include "auralis/errors.hpp"
#include "auralis/numkern/kernels.hpp"

namespace auralis::caunet {

std::vector<float> rgfe_encode(std::span<const float> v,
                               std::span<const float> fourier, int rows) {
  const int dim = static_cast<int>(v.size());
  if (static_cast<int>(fourier.size()) != rows * dim) {
    throw ConfigError("rgfe: matrix has " + std::to_string(fourier.size()) +
                      " entries, expected " + std::to_string(rows * dim));
  }
  std::vector<float> out(2 * static_cast<std::size_t>(rows));
  for (int r = 0; r < rows; ++r) {
    double p = 0.0;
    for (int d = 0; d < dim; ++d) p += static_cast<double>(fourier[r * dim + d]) * v[d];
    p *= 2.0 * std::numbers::pi;
    out[r] = static_cast<float>(std::cos(p));
    out[rows + r] = static_cast<float>(std::sin(p));
  }
  return out;
}

Tensor4 frame_poses(const PoseTrack& tx, const PoseTrack& rx, int frames,
                    long long first_frame, int hop, int sample_rate) {
  tx.validate();
  rx.validate();
  Tensor4 out({1, kFramePoseDims, 1, frames});
  for (int f = 0; f < frames; ++f) {
    const double end =
        static_cast<double>((first_frame + f + 1) * hop - 1) / sample_rate;
    int row = 0;
    for (const PoseTrack* track : {&tx, &rx}) {
      const Pose& p = track->hold(end);
      for (double v : p.position) out.at(0, row++, 0, f) = static_cast<float>(v);
      for (double v : p.rotation) out.at(0, row++, 0, f) = static_cast<float>(v);
    }
  }
  return out;
}

std::size_t StreamState::num_values() const {
  std::size_t n = 0;
  for (const auto& [name, t] : layers) n += t.numel();
  return n;
}

// ---------------------------------------------------------------------------

CausalUNet::CausalUNet(NetConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
  build();
}

CausalUNet::CausalUNet(NetConfig cfg, ParamStore params)
    : cfg_(std::move(cfg)), params_(std::move(params)) {
  cfg_.validate();
  check_params();
}

void CausalUNet::build() {
  const std::uint64_t seed = cfg_.init_seed;
  ParamStore& ps = params_;
  const int base = cfg_.base_channels;
  const int e = cfg_.embed_dim;
  const int rows = cfg_.fourier_rows;
  const int in = cfg_.in_channels + (cfg_.freq_coord ? 1 : 0);

  add_conv_params(ps, seed, "in", {base, in, 3, 3}, base, in * 9);

  ps.add("t_embed.fourier",
         gaussian_init({1, 1, rows, 1}, cfg_.time_fourier_scale,
                       path_seed(seed, "t_embed.fourier")),
         false);
  add_conv_params(ps, seed, "t_embed.fc1", {e, 2 * rows, 1, 1}, e, 2 * rows);
  add_conv_params(ps, seed, "t_embed.fc2", {e, e, 1, 1}, e, e);

  ps.add("pose_embed.fourier",
         gaussian_init({1, 1, rows, kPoseDims}, cfg_.pose_fourier_scale,
                       path_seed(seed, "pose_embed.fourier")),
         false);
  add_conv_params(ps, seed, "pose_embed.fc1", {e, 4 * rows, 1, 1}, e, 4 * rows);
  add_conv_params(ps, seed, "pose_embed.fc2", {e, e, 1, 1}, e, e);

  for (const auto& b : block_specs(cfg_)) add_block_params(ps, seed, b, e);
  if (cfg_.head_norm) add_norm_params(ps, "head.norm", 2 * base);
  add_conv_params(ps, seed, "head.conv", {cfg_.out_channels, 2 * base, 3, 3},
           cfg_.out_channels, 2 * base * 9);
}

void CausalUNet::check_params() const {
  CausalUNet reference(cfg_);
  for (const auto& [path, p] : reference.params()) {
    if (!params_.contains(path)) {
      throw ConfigError("checkpoint is missing parameter '" + path + "'");
    }
    if (!(params_.at(path).value.shape() == p.value.shape())) {
      throw ConfigError("parameter '" + path + "' has shape " +
                        params_.at(path).value.shape().str() + ", model expects " +
                        p.value.shape().str());
    }
  }
  if (params_.size() != reference.params().size()) {
    throw ConfigError("checkpoint has parameters the model does not use");
  }
}

int CausalUNet::receptive_field() const {
  // Upper bound: look-backs add along the longest path. A 3x3 conv at level l
  // looks 2 * 2^l base frames back, a resampling layer 3 * 2^l (l being the
  // finer of its two rates).
  int rf = 2;  // input conv
  for (const auto& b : block_specs(cfg_)) {
    const int scale = 1 << b.level;
    rf += 2 * 2 * scale;
    if (b.mode == Resample::kDown) rf += 3 * scale;
    if (b.mode == Resample::kUp) rf += 3 * (scale / 2);
  }
  return rf + 2 + 1;  // head conv, plus the current frame
}

Tensor4 CausalUNet::pose_features(const Tensor4& poses) const {
  if (poses.c() != kFramePoseDims || poses.h() != 1) {
    throw ConfigError("poses must be (n, 14, 1, T), got " + poses.shape().str());
  }
  const int rows = cfg_.fourier_rows;
  const auto fourier = params_.at("pose_embed.fourier").value.values();
  Tensor4 out({poses.n(), 4 * rows, 1, poses.w()});
  float v[kPoseDims];
  for (int b = 0; b < poses.n(); ++b) {
    for (int t = 0; t < poses.w(); ++t) {
      for (int part = 0; part < 2; ++part) {
        for (int d = 0; d < kPoseDims; ++d) {
          v[d] = poses.at(b, part * kPoseDims + d, 0, t);
        }
        const auto feat = rgfe_encode(v, fourier, rows);
        for (int k = 0; k < 2 * rows; ++k) {
          out.at(b, part * 2 * rows + k, 0, t) = feat[k];
        }
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

void check_finite(const Var& v, const std::string& where) {
  if (!v->value().all_finite()) {
    throw NumericError("non-finite activation after " + where);
  }
}

}  // namespace

Var CausalUNet::forward(Tape& tape, const Var& phi, const Tensor4* cond,
                        std::span<const float> t, const Tensor4& poses,
                        StreamState* state) {
  const Tensor4& pv = phi->value();
  const int n = pv.n();
  const int bins = pv.h();
  const int frames = pv.w();
  const int cond_ch = cond != nullptr ? cond->c() : 0;
  if (pv.c() + cond_ch != cfg_.in_channels) {
    throw ConfigError("model expects " + std::to_string(cfg_.in_channels) +
                      " input channels, got " + std::to_string(pv.c() + cond_ch));
  }
  if (pv.c() != cfg_.out_channels) {
    throw ConfigError("phi must have " + std::to_string(cfg_.out_channels) +
                      " channels");
  }
  if (bins != cfg_.freq_bins) {
    throw ConfigError("model expects " + std::to_string(cfg_.freq_bins) +
                      " bins, got " + std::to_string(bins));
  }
  if (cond != nullptr &&
      (cond->n() != n || cond->h() != bins || cond->w() != frames)) {
    throw ConfigError("condition " + cond->shape().str() +
                      " does not match phi " + pv.shape().str());
  }
  if (static_cast<int>(t.size()) != n) {
    throw ConfigError("one flow time per batch element expected");
  }
  if (poses.n() != n || poses.c() != kFramePoseDims || poses.h() != 1 ||
      poses.w() != frames) {
    throw ConfigError("poses " + poses.shape().str() + " do not match phi " +
                      pv.shape().str());
  }
  if (state != nullptr && state->sealed) {
    throw UsageError("stream state already consumed a padded final chunk");
  }

  const int m = cfg_.resample_factor();
  const int pad_frames = (m - frames % m) % m;
  const int total = frames + pad_frames;
  if (pad_frames != 0 && state != nullptr) state->sealed = true;

  LayerContext pass(tape, params_, cfg_.norm_groups, cfg_.norm_eps, state);

  // Input: [phi, cond, (coord)], padded in freq and time.
  Var h = phi;
  if (cond != nullptr) h = numkern::concat_channels(tape, h, tape.constant(*cond));
  if (cfg_.freq_coord) {
    Tensor4 coord({n, 1, bins, frames});
    for (int b = 0; b < n; ++b) {
      for (int k = 0; k < bins; ++k) {
        const float c = bins > 1 ? -1.0f + 2.0f * k / (bins - 1) : 0.0f;
        for (int f = 0; f < frames; ++f) coord.at(b, 0, k, f) = c;
      }
    }
    h = numkern::concat_channels(tape, h, tape.constant(std::move(coord)));
  }
  h = numkern::pad_freq(tape, h, cfg_.padded_bins() - bins);
  h = numkern::pad_time(tape, h, pad_frames);

  // Time embedding (n, E, 1, 1).
  const int rows = cfg_.fourier_rows;
  Tensor4 tfeat({n, 2 * rows, 1, 1});
  {
    const auto fourier = params_.at("t_embed.fourier").value.values();
    for (int b = 0; b < n; ++b) {
      const float tv = t[b];
      const auto f = rgfe_encode({&tv, 1}, fourier, rows);
      for (int k = 0; k < 2 * rows; ++k) tfeat.at(b, k, 0, 0) = f[k];
    }
  }
  Var temb = pass.mlp("t_embed", tape.constant(std::move(tfeat)));

  // Pose embeddings per level. Level-l frame j summarizes base frames up to
  // (j + 1) * 2^l - 1 and takes that frame's pose.
  Tensor4 pfeat = pose_features(poses);
  if (pad_frames != 0) {
    pfeat = numkern::concat_time(
        pfeat, Tensor4({n, pfeat.c(), 1, pad_frames}));
  }
  std::vector<Var> pemb(cfg_.num_resample + 1);
  auto pose_level = [&](int level) -> const Var& {
    if (!pemb[level]) {
      const int step = 1 << level;
      const int count = total / step;
      Tensor4 sub({n, pfeat.c(), 1, count});
      for (int b = 0; b < n; ++b) {
        for (int c = 0; c < pfeat.c(); ++c) {
          for (int j = 0; j < count; ++j) {
            sub.at(b, c, 0, j) = pfeat.at(b, c, 0, (j + 1) * step - 1);
          }
        }
      }
      pemb[level] = pass.mlp("pose_embed", tape.constant(std::move(sub)));
    }
    return pemb[level];
  };

  h = pass.conv3("in", h);
  std::vector<Var> skips{h};
  const auto specs = block_specs(cfg_);
  const int nb = cfg_.num_blocks();
  for (int i = 0; i < nb; ++i) {
    h = pass.block(specs[i], h, temb, pose_level(specs[i].level));
    check_finite(h, specs[i].name);
    skips.push_back(h);
  }
  for (int k = 0; k < nb; ++k) {
    const BlockSpec& b = specs[nb + k];
    const int i = nb - 1 - k;
    if (k > 0) h = numkern::concat_channels(tape, h, skips[i + 1]);
    h = pass.block(b, h, temb, pose_level(b.level));
    check_finite(h, b.name);
  }
  h = numkern::concat_channels(tape, h, skips[0]);
  if (cfg_.head_norm) h = pass.norm_act("head.norm", h);
  h = pass.conv3("head.conv", h);
  check_finite(h, "head");
  return numkern::crop(tape, h, 0, bins, 0, frames);
}

Tensor4 CausalUNet::predict(const Tensor4& phi, const Tensor4* cond,
                            std::span<const float> t, const Tensor4& poses,
                            StreamState* state) {
  Tape tape(false);
  return forward(tape, tape.constant(phi), cond, t, poses, state)->value();
}

}  // namespace auralis::caunet
