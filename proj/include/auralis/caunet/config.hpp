// Copyright 2026 The Auralis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace auralis::caunet {

struct NetConfig {
  std::string preset = "full";
  // phi (4 real channels) plus the duplicated mono condition (4).
  int in_channels = 8;
  int out_channels = 4;
  int base_channels = 32;
  // One entry per encoder block; block i outputs base * multipliers[i].
  std::vector<int> multipliers{1, 2, 2, 4, 4, 8, 8};
  // The first num_resample encoder blocks halve freq and time.
  int num_resample = 4;
  int embed_dim = 128;
  int fourier_rows = 32;
  float time_fourier_scale = 1.0f;
  float pose_fourier_scale = 1.0f;
  int norm_groups = 8;
  float norm_eps = 1e-5f;
  int freq_bins = 257;
  // Normalize and activate before the output convolution.
  bool head_norm = true;
  // Extra input channel holding the normalized frequency coordinate.
  bool freq_coord = false;
  std::uint64_t init_seed = 0;

  [[nodiscard]] int num_blocks() const {
    return static_cast<int>(multipliers.size());
  }
  // Frequency and frame counts are padded to multiples of this.
  [[nodiscard]] int resample_factor() const { return 1 << num_resample; }
  [[nodiscard]] int padded_bins() const;
  [[nodiscard]] std::vector<int> block_channels() const;  // base, then blocks

  void validate() const;

  // Full-scale network: 7 blocks, 4 resamplings.
  static NetConfig full();
  // Desk-scale network: 5 blocks, 3 resamplings, 16 base channels.
  static NetConfig toy();
  static NetConfig from_preset(const std::string& name);
};

nlohmann::json to_json(const NetConfig& cfg);
// Unknown keys are rejected; missing keys keep the preset named in
// "preset" (default "full").
NetConfig net_config_from_json(const nlohmann::json& j);

}  // namespace auralis::caunet
