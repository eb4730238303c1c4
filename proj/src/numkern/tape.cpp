// Copyright 2026 The Auralis Authors
// SPDX-License-Identifier: Apache-2.0

#include "auralis/numkern/tape.hpp"

#include <cstring>

#include "auralis/errors.hpp"

namespace auralis::numkern {
namespace {

std::span<const float> bias_span(const Var& b) {
  if (!b) return {};
  return b->value().values();
}

std::span<float> bias_grad_span(const Var& b) {
  if (!b || !b->needs_grad()) return {};
  return b->grad_slot().values();
}

bool any_grad(const Var& a) { return a && a->needs_grad(); }

template <typename... Vs>
bool any_grad(const Var& a, const Vs&... rest) {
  return any_grad(a) || any_grad(rest...);
}

Var make_result(Tensor4 value, bool needs_grad) {
  auto v = std::make_shared<Node>(std::move(value));
  v->set_needs_grad(needs_grad);
  return v;
}

}  // namespace

void Node::accumulate(const Tensor4& g) {
  Tensor4& slot = grad_slot();
  slot.add_(g);
}

Tensor4& Node::grad_slot() {
  if (param_ != nullptr) return param_->grad;
  if (grad_.empty()) grad_ = Tensor4(own_.shape());
  return grad_;
}

Var Tape::constant(Tensor4 value) const {
  return std::make_shared<Node>(std::move(value));
}

Var Tape::leaf(Tensor4 value) const {
  auto v = std::make_shared<Node>(std::move(value));
  v->set_needs_grad(recording_);
  return v;
}

Var Tape::param(ParamStore& store, const std::string& path) const {
  Param& p = store.at(path);
  auto v = std::make_shared<Node>(&p);
  v->set_needs_grad(recording_ && p.trainable);
  return v;
}

void Tape::record(std::function<void()> backward_fn) {
  if (recording_) ops_.push_back(std::move(backward_fn));
}

void Tape::backward(const Var& out, const Tensor4& out_grad) {
  if (!recording_) {
    throw UsageError("backward on a non-recording tape");
  }
  if (ops_.empty()) {
    throw UsageError("backward called before any recorded forward op");
  }
  if (!(out->value().shape() == out_grad.shape())) {
    throw ConfigError("backward: seed gradient shape " +
                      out_grad.shape().str() + " != output " +
                      out->value().shape().str());
  }
  out->accumulate(out_grad);
  for (auto it = ops_.rbegin(); it != ops_.rend(); ++it) (*it)();
  ops_.clear();
}

Var conv2d(Tape& tape, const Var& x, const Var& w, const Var& b, Stride stride,
           Padding pad) {
  Tensor4 y = numkern::conv2d(x->value(), w->value(), bias_span(b), stride, pad);
  const bool ng = tape.recording() && any_grad(x, w, b);
  Var out = make_result(std::move(y), ng);
  if (ng) {
    tape.record([x, w, b, out, stride, pad] {
      const Tensor4& g = out->grad();
      if (g.empty()) return;
      Tensor4 dx;
      conv2d_backward(x->value(), w->value(), g, stride, pad,
                      x->needs_grad() ? &dx : nullptr,
                      w->needs_grad() ? &w->grad_slot() : nullptr,
                      bias_grad_span(b));
      if (x->needs_grad()) x->accumulate(dx);
    });
  }
  return out;
}

Var conv2d_transposed(Tape& tape, const Var& x, const Var& w, const Var& b,
                      Stride stride) {
  Tensor4 y =
      numkern::conv2d_transposed(x->value(), w->value(), bias_span(b), stride);
  const bool ng = tape.recording() && any_grad(x, w, b);
  Var out = make_result(std::move(y), ng);
  if (ng) {
    tape.record([x, w, b, out, stride] {
      const Tensor4& g = out->grad();
      if (g.empty()) return;
      Tensor4 dx;
      conv2d_transposed_backward(x->value(), w->value(), g, stride,
                                 x->needs_grad() ? &dx : nullptr,
                                 w->needs_grad() ? &w->grad_slot() : nullptr,
                                 bias_grad_span(b));
      if (x->needs_grad()) x->accumulate(dx);
    });
  }
  return out;
}

Var frame_group_norm(Tape& tape, const Var& x, const Var& gamma,
                     const Var& beta, int num_groups, float eps) {
  const bool ng = tape.recording() && any_grad(x, gamma, beta);
  auto stats = ng ? std::make_shared<GroupNormStats>() : nullptr;
  Tensor4 y = numkern::frame_group_norm(x->value(), num_groups,
                                        gamma->value().values(),
                                        beta->value().values(), eps,
                                        stats.get());
  Var out = make_result(std::move(y), ng);
  if (ng) {
    tape.record([x, gamma, beta, out, stats] {
      const Tensor4& g = out->grad();
      if (g.empty()) return;
      Tensor4 dx;
      frame_group_norm_backward(
          x->value(), *stats, gamma->value().values(), g,
          x->needs_grad() ? &dx : nullptr,
          gamma->needs_grad() ? gamma->grad_slot().values() : std::span<float>{},
          beta->needs_grad() ? beta->grad_slot().values() : std::span<float>{});
      if (x->needs_grad()) x->accumulate(dx);
    });
  }
  return out;
}

Var silu(Tape& tape, const Var& x) {
  const bool ng = tape.recording() && any_grad(x);
  Var out = make_result(numkern::silu(x->value()), ng);
  if (ng) {
    tape.record([x, out] {
      const Tensor4& g = out->grad();
      if (g.empty()) return;
      x->accumulate(silu_backward(x->value(), g));
    });
  }
  return out;
}

Var add(Tape& tape, const Var& a, const Var& b) {
  Tensor4 y = a->value();
  y.add_(b->value());
  const bool ng = tape.recording() && any_grad(a, b);
  Var out = make_result(std::move(y), ng);
  if (ng) {
    tape.record([a, b, out] {
      const Tensor4& g = out->grad();
      if (g.empty()) return;
      if (a->needs_grad()) a->accumulate(g);
      if (b->needs_grad()) b->accumulate(g);
    });
  }
  return out;
}

Var add_broadcast(Tape& tape, const Var& x, const Var& cond) {
  const Tensor4& xv = x->value();
  const Tensor4& cv = cond->value();
  if (cv.n() != xv.n() || cv.c() != xv.c() || cv.h() != 1 ||
      (cv.w() != 1 && cv.w() != xv.w())) {
    throw ConfigError("add_broadcast: cond " + cv.shape().str() +
                      " does not broadcast to " + xv.shape().str());
  }
  const bool per_frame = cv.w() != 1;
  Tensor4 y = xv;
  for (int b = 0; b < xv.n(); ++b) {
    for (int c = 0; c < xv.c(); ++c) {
      const float* cp = cv.data() + cv.offset(b, c, 0, 0);
      for (int f = 0; f < xv.h(); ++f) {
        float* row = y.data() + y.offset(b, c, f, 0);
        for (int t = 0; t < xv.w(); ++t) row[t] += per_frame ? cp[t] : cp[0];
      }
    }
  }
  const bool ng = tape.recording() && any_grad(x, cond);
  Var out = make_result(std::move(y), ng);
  if (ng) {
    tape.record([x, cond, out, per_frame] {
      const Tensor4& g = out->grad();
      if (g.empty()) return;
      if (x->needs_grad()) x->accumulate(g);
      if (!cond->needs_grad()) return;
      Tensor4 dc(cond->value().shape());
      for (int b = 0; b < g.n(); ++b) {
        for (int c = 0; c < g.c(); ++c) {
          float* dp = dc.data() + dc.offset(b, c, 0, 0);
          for (int f = 0; f < g.h(); ++f) {
            const float* row = g.data() + g.offset(b, c, f, 0);
            for (int t = 0; t < g.w(); ++t) dp[per_frame ? t : 0] += row[t];
          }
        }
      }
      cond->accumulate(dc);
    });
  }
  return out;
}

Var concat_channels(Tape& tape, const Var& a, const Var& b) {
  const Tensor4& av = a->value();
  const Tensor4& bv = b->value();
  if (av.n() != bv.n() || av.h() != bv.h() || av.w() != bv.w()) {
    throw ConfigError("concat_channels: " + av.shape().str() + " vs " +
                      bv.shape().str());
  }
  const std::size_t plane = static_cast<std::size_t>(av.h()) * av.w();
  const std::size_t ca = av.c() * plane;
  const std::size_t cb = bv.c() * plane;
  Tensor4 y({av.n(), av.c() + bv.c(), av.h(), av.w()});
  for (int n = 0; n < av.n(); ++n) {
    float* dst = y.data() + n * (ca + cb);
    std::memcpy(dst, av.data() + n * ca, sizeof(float) * ca);
    std::memcpy(dst + ca, bv.data() + n * cb, sizeof(float) * cb);
  }
  const bool ng = tape.recording() && any_grad(a, b);
  Var out = make_result(std::move(y), ng);
  if (ng) {
    tape.record([a, b, out, ca, cb] {
      const Tensor4& g = out->grad();
      if (g.empty()) return;
      const int batch = g.n();
      if (a->needs_grad()) {
        Tensor4 da(a->value().shape());
        for (int n = 0; n < batch; ++n) {
          std::memcpy(da.data() + n * ca, g.data() + n * (ca + cb),
                      sizeof(float) * ca);
        }
        a->accumulate(da);
      }
      if (b->needs_grad()) {
        Tensor4 db(b->value().shape());
        for (int n = 0; n < batch; ++n) {
          std::memcpy(db.data() + n * cb, g.data() + n * (ca + cb) + ca,
                      sizeof(float) * cb);
        }
        b->accumulate(db);
      }
    });
  }
  return out;
}

Var prepend_time(Tape& tape, const Tensor4& history, const Var& x) {
  Tensor4 y = concat_time(history, x->value());
  const bool ng = tape.recording() && any_grad(x);
  Var out = make_result(std::move(y), ng);
  if (ng) {
    const int lead = history.w();
    tape.record([x, out, lead] {
      const Tensor4& g = out->grad();
      if (g.empty()) return;
      x->accumulate(slice_time(g, lead, g.w()));
    });
  }
  return out;
}

Var pad_time(Tape& tape, const Var& x, int extra) {
  if (extra == 0) return x;
  const Tensor4& xv = x->value();
  Tensor4 y = concat_time(xv, Tensor4({xv.n(), xv.c(), xv.h(), extra}));
  const bool ng = tape.recording() && any_grad(x);
  Var out = make_result(std::move(y), ng);
  if (ng) {
    const int w = xv.w();
    tape.record([x, out, w] {
      const Tensor4& g = out->grad();
      if (g.empty()) return;
      x->accumulate(slice_time(g, 0, w));
    });
  }
  return out;
}

Var crop(Tape& tape, const Var& x, int h0, int h, int w0, int w) {
  const Tensor4& xv = x->value();
  if (h0 < 0 || w0 < 0 || h < 1 || w < 1 || h0 + h > xv.h() || w0 + w > xv.w()) {
    throw ConfigError("crop: window out of range for " + xv.shape().str());
  }
  Tensor4 y({xv.n(), xv.c(), h, w});
  for (int n = 0; n < xv.n(); ++n) {
    for (int c = 0; c < xv.c(); ++c) {
      for (int f = 0; f < h; ++f) {
        std::memcpy(y.data() + y.offset(n, c, f, 0),
                    xv.data() + xv.offset(n, c, h0 + f, w0), sizeof(float) * w);
      }
    }
  }
  const bool ng = tape.recording() && any_grad(x);
  Var out = make_result(std::move(y), ng);
  if (ng) {
    tape.record([x, out, h0, h, w0, w] {
      const Tensor4& g = out->grad();
      if (g.empty()) return;
      Tensor4 dx(x->value().shape());
      for (int n = 0; n < g.n(); ++n) {
        for (int c = 0; c < g.c(); ++c) {
          for (int f = 0; f < h; ++f) {
            std::memcpy(dx.data() + dx.offset(n, c, h0 + f, w0),
                        g.data() + g.offset(n, c, f, 0), sizeof(float) * w);
          }
        }
      }
      x->accumulate(dx);
    });
  }
  return out;
}

Var pad_freq(Tape& tape, const Var& x, int extra) {
  const Tensor4& xv = x->value();
  if (extra == 0) return x;
  Tensor4 y({xv.n(), xv.c(), xv.h() + extra, xv.w()});
  for (int n = 0; n < xv.n(); ++n) {
    for (int c = 0; c < xv.c(); ++c) {
      std::memcpy(y.data() + y.offset(n, c, 0, 0),
                  xv.data() + xv.offset(n, c, 0, 0),
                  sizeof(float) * xv.h() * xv.w());
    }
  }
  const bool ng = tape.recording() && any_grad(x);
  Var out = make_result(std::move(y), ng);
  if (ng) {
    tape.record([x, out] {
      const Tensor4& g = out->grad();
      if (g.empty()) return;
      const Tensor4& xv = x->value();
      Tensor4 dx(xv.shape());
      for (int n = 0; n < xv.n(); ++n) {
        for (int c = 0; c < xv.c(); ++c) {
          std::memcpy(dx.data() + dx.offset(n, c, 0, 0),
                      g.data() + g.offset(n, c, 0, 0),
                      sizeof(float) * xv.h() * xv.w());
        }
      }
      x->accumulate(dx);
    });
  }
  return out;
}

}  // namespace auralis::numkern
