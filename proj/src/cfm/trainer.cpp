// Copyright 2026 The Auralis Authors
// SPDX-License-Identifier: Apache-2.0

#include "auralis/cfm/trainer.hpp"

#include <random>
#include <string>

#include "auralis/errors.hpp"

namespace auralis::cfm {

void TrainConfig::validate(int hop) const {
  if (!(learning_rate >= 0.0f)) throw ConfigError("train.lr must be >= 0");
  if (!(weight_decay >= 0.0f)) throw ConfigError("train.wd must be >= 0");
  if (batch_size < 1) throw ConfigError("train.batch must be >= 1");
  if (steps < 0) throw ConfigError("train.steps must be >= 0");
  if (crop_len <= 0 || crop_len % hop != 0) {
    throw ConfigError("train crop length must be a positive multiple of hop");
  }
  if (!(sigma >= 0.0f)) throw ConfigError("flow.sigma must be >= 0");
}

Example make_example(const AudioClip& mono, const AudioClip& binaural,
                     const PoseTrack& tx, const PoseTrack& rx,
                     const dsp::StftConfig& stft) {
  if (mono.num_channels() != 1 || binaural.num_channels() != 2) {
    throw InputError("expected a mono input and a two-channel target");
  }
  if (mono.length() != binaural.length()) {
    throw InputError("input and target lengths differ");
  }
  Example ex;
  ex.x = dsp::pack_complex(dsp::stft(mono, stft).repeat_channels(2));
  ex.y = dsp::pack_complex(dsp::stft(binaural, stft));
  ex.poses = caunet::frame_poses(tx, rx, ex.x.w(), 0, stft.hop, mono.sample_rate);
  return ex;
}

Batch stack(std::span<const Example> examples) {
  std::vector<Tensor4> xs;
  std::vector<Tensor4> ys;
  std::vector<Tensor4> ps;
  for (const Example& e : examples) {
    xs.push_back(e.x);
    ys.push_back(e.y);
    ps.push_back(e.poses);
  }
  return {numkern::concat_batch(xs), numkern::concat_batch(ys),
          numkern::concat_batch(ps)};
}

Batch sample_batch(std::span<const Example> data, const TrainConfig& cfg,
                   int hop, long long step) {
  if (data.empty()) throw InputError("training set is empty");
  const int frames = cfg.crop_len / hop;
  std::mt19937_64 rng(mix_seed(mix_seed(cfg.seed, 0x5eedULL),
                               static_cast<std::uint64_t>(step)));
  std::vector<Example> picked;
  for (int b = 0; b < cfg.batch_size; ++b) {
    const auto idx = std::uniform_int_distribution<std::size_t>(
        0, data.size() - 1)(rng);
    const Example& e = data[idx];
    if (e.frames() < frames) {
      throw InputError("clip " + std::to_string(idx) + " is shorter than the crop");
    }
    const int off =
        std::uniform_int_distribution<int>(0, e.frames() - frames)(rng);
    picked.push_back({numkern::slice_time(e.x, off, off + frames),
                      numkern::slice_time(e.y, off, off + frames),
                      numkern::slice_time(e.poses, off, off + frames)});
  }
  return stack(picked);
}

Trainer::Trainer(caunet::CausalUNet& model, TrainConfig cfg)
    : model_(model),
      cfg_(cfg),
      adam_(AdamConfig{cfg.learning_rate, 0.9f, 0.999f, 1e-8f, cfg.weight_decay}) {
  const int expected = model_.config().out_channels + cfg_.condition_channels();
  if (model_.config().in_channels != expected) {
    throw ConfigError("model takes " +
                      std::to_string(model_.config().in_channels) +
                      " input channels, training mode needs " +
                      std::to_string(expected));
  }
}

double Trainer::step(const Batch& batch) {
  const int n = batch.size();
  const std::uint64_t key =
      mix_seed(mix_seed(cfg_.seed, 0xf10eULL),
               static_cast<std::uint64_t>(adam_.steps()));
  std::mt19937_64 rng(key);
  std::uniform_real_distribution<float> unit(0.0f, 1.0f);
  std::vector<float> t(n);
  for (float& v : t) v = unit(rng);

  const Tensor4 z =
      sample_noise(batch.x, NoiseSpec{cfg_.effective_sigma(), mix_seed(key, 1)});
  const Tensor4 phi = flow_interpolate(batch.y, z, t);

  numkern::Tape tape;
  model_.params().zero_grad();
  const Tensor4* cond = cfg_.simplified_fm ? nullptr : &batch.x;
  numkern::Var u =
      model_.forward(tape, tape.constant(phi), cond, t, batch.poses);
  const Loss loss = cfm_loss(u->value(), batch.y, z);
  tape.backward(u, loss.grad);
  for (const auto& [path, p] : model_.params()) {
    if (p.trainable && !p.grad.all_finite()) {
      throw NumericError("non-finite gradient for '" + path + "' at step " +
                         std::to_string(adam_.steps()));
    }
  }
  adam_.step(model_.params());
  return loss.value;
}

}  // namespace auralis::cfm
