// Copyright 2026 The Auralis Authors
// SPDX-License-Identifier: Apache-2.0

#include "auralis/numkern/param_store.hpp"

#include "auralis/errors.hpp"

namespace auralis::numkern {

Param& ParamStore::add(const std::string& path, Tensor4 init, bool trainable) {
  if (path.empty()) throw ConfigError("parameter path must be non-empty");
  if (params_.contains(path)) {
    throw ConfigError("duplicate parameter path: " + path);
  }
  Tensor4 grad(init.shape());
  auto [it, ok] = params_.emplace(
      path, Param{std::move(init), std::move(grad), trainable});
  return it->second;
}

bool ParamStore::contains(const std::string& path) const {
  return params_.contains(path);
}

Param& ParamStore::at(const std::string& path) {
  auto it = params_.find(path);
  if (it == params_.end()) throw ConfigError("unknown parameter: " + path);
  return it->second;
}

const Param& ParamStore::at(const std::string& path) const {
  auto it = params_.find(path);
  if (it == params_.end()) throw ConfigError("unknown parameter: " + path);
  return it->second;
}

void ParamStore::zero_grad() {
  for (auto& [_, p] : params_) p.grad.fill(0.0f);
}

std::size_t ParamStore::num_values(bool trainable_only) const {
  std::size_t total = 0;
  for (const auto& [_, p] : params_) {
    if (!trainable_only || p.trainable) total += p.value.numel();
  }
  return total;
}

std::vector<std::string> ParamStore::paths() const {
  std::vector<std::string> out;
  out.reserve(params_.size());
  for (const auto& [k, _] : params_) out.push_back(k);
  return out;
}

}  // namespace auralis::numkern
