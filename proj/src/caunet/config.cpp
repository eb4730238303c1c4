// Copyright 2026 The Auralis Authors
// SPDX-License-Identifier: Apache-2.0

#include "auralis/caunet/config.hpp"

#include <set>

#include "auralis/errors.hpp"
#include "auralis/numkern/kernels.hpp"

namespace auralis::caunet {

int NetConfig::padded_bins() const {
  const int m = resample_factor();
  return (freq_bins + m - 1) / m * m;
}

std::vector<int> NetConfig::block_channels() const {
  std::vector<int> ch{base_channels};
  for (int m : multipliers) ch.push_back(base_channels * m);
  return ch;
}

void NetConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError("model: " + msg); };
  if (in_channels < 1 || out_channels < 1 || base_channels < 1) {
    fail("channel counts must be positive");
  }
  if (multipliers.empty()) fail("at least one block is required");
  if (num_resample < 0 || num_resample > num_blocks()) {
    fail("num_resample must lie in [0, num_blocks]");
  }
  if (embed_dim < 1 || fourier_rows < 1) fail("embedding sizes must be positive");
  if (norm_groups < 1 || !(norm_eps > 0.0f)) fail("bad normalization settings");
  if (freq_bins < 1) fail("freq_bins must be positive");
  for (int m : multipliers) {
    if (m < 1) fail("multipliers must be positive");
  }
  const auto ch = block_channels();
  std::set<int> widths(ch.begin(), ch.end());
  for (int i = 0; i + 1 < static_cast<int>(ch.size()); ++i) {
    widths.insert(ch[i + 1] * 2);
  }
  widths.insert(2 * base_channels);
  for (int c : widths) {
    if (c % numkern::effective_groups(c, norm_groups) != 0) {
      fail("channel width " + std::to_string(c) +
           " is not divisible by the norm group count");
    }
  }
}

NetConfig NetConfig::full() { return NetConfig{}; }

NetConfig NetConfig::toy() {
  NetConfig c;
  c.preset = "toy";
  c.base_channels = 16;
  c.multipliers = {1, 2, 2, 4, 4};
  c.num_resample = 3;
  c.embed_dim = 64;
  return c;
}

NetConfig NetConfig::from_preset(const std::string& name) {
  if (name == "full") return full();
  if (name == "toy") return toy();
  throw ConfigError("unknown model preset '" + name + "'");
}

nlohmann::json to_json(const NetConfig& c) {
  return {{"preset", c.preset},
          {"in_channels", c.in_channels},
          {"out_channels", c.out_channels},
          {"base_channels", c.base_channels},
          {"multipliers", c.multipliers},
          {"num_resample", c.num_resample},
          {"embed_dim", c.embed_dim},
          {"fourier_rows", c.fourier_rows},
          {"time_fourier_scale", c.time_fourier_scale},
          {"pose_fourier_scale", c.pose_fourier_scale},
          {"norm_groups", c.norm_groups},
          {"norm_eps", c.norm_eps},
          {"freq_bins", c.freq_bins},
          {"head_norm", c.head_norm},
          {"freq_coord", c.freq_coord},
          {"init_seed", c.init_seed}};
}

NetConfig net_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("model config must be an object");
  NetConfig c = NetConfig::from_preset(j.value("preset", std::string("full")));
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "preset") continue;
      else if (key == "in_channels") c.in_channels = v.get<int>();
      else if (key == "out_channels") c.out_channels = v.get<int>();
      else if (key == "base_channels") c.base_channels = v.get<int>();
      else if (key == "multipliers") c.multipliers = v.get<std::vector<int>>();
      else if (key == "num_resample") c.num_resample = v.get<int>();
      else if (key == "embed_dim") c.embed_dim = v.get<int>();
      else if (key == "fourier_rows") c.fourier_rows = v.get<int>();
      else if (key == "time_fourier_scale") c.time_fourier_scale = v.get<float>();
      else if (key == "pose_fourier_scale") c.pose_fourier_scale = v.get<float>();
      else if (key == "norm_groups") c.norm_groups = v.get<int>();
      else if (key == "norm_eps") c.norm_eps = v.get<float>();
      else if (key == "freq_bins") c.freq_bins = v.get<int>();
      else if (key == "head_norm") c.head_norm = v.get<bool>();
      else if (key == "freq_coord") c.freq_coord = v.get<bool>();
      else if (key == "init_seed") c.init_seed = v.get<std::uint64_t>();
      else throw ConfigError("model: unknown key '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("model: ") + e.what());
  }
  c.validate();
  return c;
}

}  // namespace auralis::caunet
