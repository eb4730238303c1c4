// Copyright 2026 The Auralis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <vector>

namespace auralis {

inline constexpr int kDefaultSampleRate = 48000;

// Mono or multichannel waveform. All channels share one length.
struct AudioClip {
  int sample_rate = kDefaultSampleRate;
  std::vector<std::vector<float>> channels;

  [[nodiscard]] int num_channels() const {
    return static_cast<int>(channels.size());
  }
  [[nodiscard]] std::size_t length() const {
    return channels.empty() ? 0 : channels.front().size();
  }
  [[nodiscard]] double duration_s() const {
    return static_cast<double>(length()) / sample_rate;
  }
};

}  // namespace auralis
