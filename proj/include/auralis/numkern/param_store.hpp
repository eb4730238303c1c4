// Copyright 2026 The Auralis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <string>
#include <vector>

#include "auralis/numkern/tensor.hpp"

namespace auralis::numkern {

struct Param {
  Tensor4 value;
  Tensor4 grad;  // same shape as value
  bool trainable = true;
};

// Named parameters and their gradient slots. Iteration order is the
// lexicographic order of the paths, which keeps optimizers and checkpoints
// deterministic.
class ParamStore {
 public:
  Param& add(const std::string& path, Tensor4 init, bool trainable = true);

  [[nodiscard]] bool contains(const std::string& path) const;
  Param& at(const std::string& path);
  [[nodiscard]] const Param& at(const std::string& path) const;

  void zero_grad();
  [[nodiscard]] std::size_t size() const { return params_.size(); }
  [[nodiscard]] std::size_t num_values(bool trainable_only = false) const;
  [[nodiscard]] std::vector<std::string> paths() const;

  auto begin() { return params_.begin(); }
  auto end() { return params_.end(); }
  [[nodiscard]] auto begin() const { return params_.begin(); }
  [[nodiscard]] auto end() const { return params_.end(); }

 private:
  std::map<std::string, Param> params_;
};

}  // namespace auralis::numkern
