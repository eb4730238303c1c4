// Copyright 2026 The Auralis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <string>

#include "auralis/numkern/param_store.hpp"

namespace auralis::cfm {

struct AdamConfig {
  float learning_rate = 1e-4f;
  float beta1 = 0.9f;
  float beta2 = 0.999f;
  float eps = 1e-8f;
  // Coupled (L2) decay: wd * theta is added to the gradient.
  float weight_decay = 1e-5f;

  void validate() const;
};

struct AdamMoments {
  numkern::Tensor4 m;
  numkern::Tensor4 v;
};

class Adam {
 public:
  explicit Adam(AdamConfig cfg = {});

  // Updates every trainable parameter from its gradient slot. Gradients are
  // left untouched.
  void step(numkern::ParamStore& params);

  [[nodiscard]] const AdamConfig& config() const { return cfg_; }
  void set_learning_rate(float lr) { cfg_.learning_rate = lr; }
  [[nodiscard]] long long steps() const { return steps_; }

  // Checkpoint access.
  [[nodiscard]] const std::map<std::string, AdamMoments>& moments() const {
    return moments_;
  }
  void restore(long long steps, std::map<std::string, AdamMoments> moments);

 private:
  AdamConfig cfg_;
  long long steps_ = 0;
  std::map<std::string, AdamMoments> moments_;
};

}  // namespace auralis::cfm
