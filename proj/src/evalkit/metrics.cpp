// Copyright 2026 The Auralis Authors
// SPDX-License-Identifier: Apache-2.0

#include "auralis/evalkit/metrics.hpp"

#include <cmath>
#include <numbers>

#include "auralis/errors.hpp"

namespace auralis::evalkit {
namespace {

void check_pair(const AudioClip& pred, const AudioClip& ref) {
  if (pred.num_channels() != ref.num_channels() || pred.length() != ref.length()) {
    throw InputError("prediction (" + std::to_string(pred.num_channels()) + " x " +
                     std::to_string(pred.length()) + ") and reference (" +
                     std::to_string(ref.num_channels()) + " x " +
                     std::to_string(ref.length()) + ") differ in shape");
  }
  if (ref.length() == 0) throw InputError("cannot score empty audio");
}

void check_pair(const dsp::Spectrogram& a, const dsp::Spectrogram& b) {
  if (a.channels() != b.channels() || a.bins() != b.bins() ||
      a.frames() != b.frames()) {
    throw InputError("spectrogram shapes differ");
  }
  if (a.values().empty()) throw InputError("cannot score an empty spectrogram");
}

dsp::Spectrogram padded_stft(const AudioClip& clip, const dsp::StftConfig& cfg) {
  const std::size_t n = clip.length();
  const std::size_t padded = (n + cfg.hop - 1) / cfg.hop * cfg.hop;
  if (padded == n) return dsp::stft(clip, cfg);
  AudioClip p = clip;
  for (auto& ch : p.channels) ch.resize(padded, 0.0f);
  return dsp::stft(p, cfg);
}

}  // namespace

double wave_l2(const AudioClip& pred, const AudioClip& ref) {
  check_pair(pred, ref);
  double s = 0.0;
  for (int c = 0; c < ref.num_channels(); ++c) {
    for (std::size_t i = 0; i < ref.length(); ++i) {
      const double d = double(pred.channels[c][i]) - ref.channels[c][i];
      s += d * d;
    }
  }
  return s / (static_cast<double>(ref.length()) * ref.num_channels());
}

double mag_l2(const dsp::Spectrogram& pred, const dsp::Spectrogram& ref) {
  check_pair(pred, ref);
  const auto p = pred.values();
  const auto r = ref.values();
  double s = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double d = double(std::abs(p[i])) - std::abs(r[i]);
    s += d * d;
  }
  return s / static_cast<double>(r.size());
}

double mag_l2(const AudioClip& pred, const AudioClip& ref,
              const dsp::StftConfig& cfg) {
  check_pair(pred, ref);
  return mag_l2(padded_stft(pred, cfg), padded_stft(ref, cfg));
}

double phase_err(const dsp::Spectrogram& pred, const dsp::Spectrogram& ref) {
  check_pair(pred, ref);
  const auto p = pred.values();
  const auto r = ref.values();
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double w = std::abs(r[i]);
    if (w == 0.0) continue;
    // arg(p * conj(r)) is the wrapped difference, in (-pi, pi].
    const auto d = std::complex<double>(p[i]) * std::conj(std::complex<double>(r[i]));
    double a = std::abs(std::arg(d));
    if (p[i] == dsp::cfloat{}) a = std::numbers::pi / 2;
    num += w * a;
    den += w;
  }
  return den > 0.0 ? num / den : 0.0;
}

double phase_err(const AudioClip& pred, const AudioClip& ref,
                 const dsp::StftConfig& cfg) {
  check_pair(pred, ref);
  return phase_err(padded_stft(pred, cfg), padded_stft(ref, cfg));
}

Metrics compute_metrics(const AudioClip& pred, const AudioClip& ref,
                        const dsp::StftConfig& cfg) {
  check_pair(pred, ref);
  const auto ps = padded_stft(pred, cfg);
  const auto rs = padded_stft(ref, cfg);
  return {wave_l2(pred, ref), mag_l2(ps, rs), phase_err(ps, rs)};
}

int itd_lag(const AudioClip& binaural, int max_lag) {
  if (binaural.num_channels() != 2) throw InputError("itd needs two channels");
  if (max_lag < 0) throw ConfigError("max lag must be >= 0");
  const auto& l = binaural.channels[0];
  const auto& r = binaural.channels[1];
  const auto n = static_cast<long long>(l.size());
  int best = 0;
  double best_v = -HUGE_VAL;
  for (int k = -max_lag; k <= max_lag; ++k) {
    double s = 0.0;
    for (long long i = std::max<long long>(0, k); i < std::min(n, n + k); ++i) {
      s += double(l[i]) * r[i - k];
    }
    // Ties resolve toward the smaller |k|.
    if (s > best_v || (s == best_v && std::abs(k) < std::abs(best))) {
      best_v = s;
      best = k;
    }
  }
  return best;
}

AudioClip duplicate_mono(const AudioClip& mono) {
  if (mono.num_channels() != 1) throw InputError("expected mono audio");
  AudioClip out = mono;
  out.channels.push_back(mono.channels[0]);
  return out;
}

}  // namespace auralis::evalkit
