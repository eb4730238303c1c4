// Copyright 2026 The Auralis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include <json.hpp>

#include "auralis/cfm/adam.hpp"
#include "auralis/cli/run_config.hpp"
#include "auralis/numkern/param_store.hpp"

namespace auralis::cli {

// Binary layout, all integers little-endian:
//   "AURALCKP" | u32 version | u64 header bytes | header JSON
//   | u32 array count | arrays
// Header JSON holds the run config, the optimizer step count and free-form
// metadata. Each array is
//   u32 name bytes | name | u8 kind | u8 trainable | 4 x i32 shape
//   | float32 values
// with kind 0 for parameters (including frozen Fourier matrices) and 1/2
// for the optimizer's first/second moments of the named parameter.
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  RunConfig config;
  numkern::ParamStore params;
  bool has_optimizer = false;
  long long optimizer_steps = 0;
  std::map<std::string, cfm::AdamMoments> moments;
  nlohmann::json meta = nlohmann::json::object();
};

// Writes through a temporary file and renames it into place.
void save_checkpoint(const std::filesystem::path& path, const RunConfig& cfg,
                     const numkern::ParamStore& params, const cfm::Adam* adam,
                     const nlohmann::json& meta = nlohmann::json::object());

// InputError on a missing, truncated or foreign file or another version.
Checkpoint load_checkpoint(const std::filesystem::path& path);

// ConfigError unless `requested` describes the network stored in `ckpt`.
void require_same_model(const RunConfig& ckpt, const caunet::NetConfig& requested);

}  // namespace auralis::cli
