// Copyright 2026 The Auralis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "auralis/numkern/kernels.hpp"
#include "auralis/numkern/param_store.hpp"
#include "auralis/numkern/tensor.hpp"

namespace auralis::numkern {

// A value produced during a forward pass. Parameter nodes alias the
// ParamStore entry; their gradients accumulate straight into it.
class Node {
 public:
  explicit Node(Tensor4 value) : own_(std::move(value)) {}
  explicit Node(Param* param) : param_(param) {}

  [[nodiscard]] const Tensor4& value() const {
    return param_ != nullptr ? param_->value : own_;
  }
  [[nodiscard]] bool is_param() const { return param_ != nullptr; }
  [[nodiscard]] bool needs_grad() const { return needs_grad_; }
  void set_needs_grad(bool v) { needs_grad_ = v; }

  // Adds g into this node's gradient (allocated on first use).
  void accumulate(const Tensor4& g);
  // Gradient accumulated so far; empty if nothing flowed here.
  [[nodiscard]] const Tensor4& grad() const {
    return param_ != nullptr ? param_->grad : grad_;
  }
  // Direct access for kernels that accumulate in place.
  Tensor4& grad_slot();

 private:
  Tensor4 own_;
  Tensor4 grad_;
  Param* param_ = nullptr;
  bool needs_grad_ = false;
};

using Var = std::shared_ptr<Node>;

// Reverse-mode tape over the fixed op set below. A non-recording tape
// evaluates the same ops without keeping any backward state, which is what
// inference uses.
class Tape {
 public:
  explicit Tape(bool recording = true) : recording_(recording) {}

  [[nodiscard]] bool recording() const { return recording_; }

  Var constant(Tensor4 value) const;
  // Differentiable leaf owned by the tape user (e.g. a gradient probe).
  Var leaf(Tensor4 value) const;
  Var param(ParamStore& store, const std::string& path) const;

  void record(std::function<void()> backward_fn);

  // Seeds d(loss)/d(out) = out_grad and runs the recorded ops in reverse.
  // The tape is consumed.
  void backward(const Var& out, const Tensor4& out_grad);

  [[nodiscard]] std::size_t size() const { return ops_.size(); }

 private:
  bool recording_;
  std::vector<std::function<void()>> ops_;
};

Var conv2d(Tape& tape, const Var& x, const Var& w, const Var& b,
           Stride stride = {}, Padding pad = {});
Var conv2d_transposed(Tape& tape, const Var& x, const Var& w, const Var& b,
                      Stride stride = {});
Var frame_group_norm(Tape& tape, const Var& x, const Var& gamma,
                     const Var& beta, int num_groups, float eps);
Var silu(Tape& tape, const Var& x);
Var add(Tape& tape, const Var& a, const Var& b);
// x + cond, where cond is (n, c, 1, 1) or (n, c, 1, w): broadcast over freq
// and, when its width is 1, over time.
Var add_broadcast(Tape& tape, const Var& x, const Var& cond);
Var concat_channels(Tape& tape, const Var& a, const Var& b);
// Prepends a constant history along time; gradient flows only to x.
Var prepend_time(Tape& tape, const Tensor4& history, const Var& x);
// Appends `extra` zero frames.
Var pad_time(Tape& tape, const Var& x, int extra);
// Crops [h0, h0+h) x [w0, w0+w).
Var crop(Tape& tape, const Var& x, int h0, int h, int w0, int w);
// Zero-pads the freq axis at the bottom (high bins).
Var pad_freq(Tape& tape, const Var& x, int extra);

}  // namespace auralis::numkern
