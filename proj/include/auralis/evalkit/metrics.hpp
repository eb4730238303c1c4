// Copyright 2026 The Auralis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "auralis/audio.hpp"
#include "auralis/dsp/stft.hpp"

namespace auralis::evalkit {

// Mean squared sample difference over all channels.
double wave_l2(const AudioClip& pred, const AudioClip& ref);

// Mean squared difference of STFT magnitudes over channels, bins and frames.
// Waveforms are zero-padded to a whole number of hops.
double mag_l2(const AudioClip& pred, const AudioClip& ref,
              const dsp::StftConfig& cfg = {});
double mag_l2(const dsp::Spectrogram& pred, const dsp::Spectrogram& ref);

// sum |Y| * |wrap(arg Yhat - arg Y)| / sum |Y|, in [0, pi]. Zero when the
// reference is silent.
double phase_err(const AudioClip& pred, const AudioClip& ref,
                 const dsp::StftConfig& cfg = {});
double phase_err(const dsp::Spectrogram& pred, const dsp::Spectrogram& ref);

struct Metrics {
  double wave_l2 = 0.0;
  double mag_l2 = 0.0;
  double phase_err = 0.0;
};

Metrics compute_metrics(const AudioClip& pred, const AudioClip& ref,
                        const dsp::StftConfig& cfg = {});

// Interaural lag in samples: the k in [-max_lag, max_lag] maximizing
// sum_n left[n] * right[n - k]. Positive when the left ear lags, i.e. the
// source sits to the right.
int itd_lag(const AudioClip& binaural, int max_lag = 48);

// Mono duplicated to two channels; the identity baseline.
AudioClip duplicate_mono(const AudioClip& mono);

}  // namespace auralis::evalkit
