// Copyright 2026 The Auralis Authors
// SPDX-License-Identifier: Apache-2.0

#include "auralis/cfm/adam.hpp"

#include <cmath>

#include "auralis/errors.hpp"

namespace auralis::cfm {

void AdamConfig::validate() const {
  if (!(learning_rate >= 0.0f)) throw ConfigError("learning rate must be >= 0");
  if (!(beta1 >= 0.0f && beta1 < 1.0f && beta2 >= 0.0f && beta2 < 1.0f)) {
    throw ConfigError("adam betas must lie in [0, 1)");
  }
  if (!(eps > 0.0f)) throw ConfigError("adam eps must be > 0");
  if (!(weight_decay >= 0.0f)) throw ConfigError("weight decay must be >= 0");
}

Adam::Adam(AdamConfig cfg) : cfg_(cfg) { cfg_.validate(); }

void Adam::step(numkern::ParamStore& params) {
  ++steps_;
  const double bc1 = 1.0 - std::pow(static_cast<double>(cfg_.beta1), steps_);
  const double bc2 = 1.0 - std::pow(static_cast<double>(cfg_.beta2), steps_);
  const auto step_size = static_cast<float>(cfg_.learning_rate / bc1);
  const auto inv_sqrt_bc2 = static_cast<float>(1.0 / std::sqrt(bc2));
  for (auto& [path, p] : params) {
    if (!p.trainable) continue;
    auto it = moments_.find(path);
    if (it == moments_.end()) {
      it = moments_
               .emplace(path, AdamMoments{numkern::Tensor4(p.value.shape()),
                                          numkern::Tensor4(p.value.shape())})
               .first;
    }
    float* w = p.value.data();
    const float* g = p.grad.data();
    float* m = it->second.m.data();
    float* v = it->second.v.data();
    for (std::size_t i = 0; i < p.value.numel(); ++i) {
      const float gi = g[i] + cfg_.weight_decay * w[i];
      m[i] = cfg_.beta1 * m[i] + (1.0f - cfg_.beta1) * gi;
      v[i] = cfg_.beta2 * v[i] + (1.0f - cfg_.beta2) * gi * gi;
      w[i] -= step_size * m[i] / (std::sqrt(v[i]) * inv_sqrt_bc2 + cfg_.eps);
    }
  }
}

void Adam::restore(long long steps, std::map<std::string, AdamMoments> moments) {
  steps_ = steps;
  moments_ = std::move(moments);
}

}  // namespace auralis::cfm
