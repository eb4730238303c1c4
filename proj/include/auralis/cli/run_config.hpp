// Copyright 2026 The Auralis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "auralis/caunet/config.hpp"
#include "auralis/cfm/trainer.hpp"
#include "auralis/dsp/stft.hpp"
#include "auralis/solvers/solvers.hpp"
#include "auralis/streampipe/session.hpp"

namespace auralis::cli {

struct FlowSection {
  float sigma = 0.5f;
  bool simplified_fm = false;
};

struct SolverSection {
  std::string kind = "midpoint";
  int nfe = 6;
  std::string schedule = "early_skip";
  double sway_coefficient = 0.0;
  std::uint64_t seed = 0;  // render noise
};

struct TrainSection {
  float lr = 1e-4f;
  float wd = 1e-5f;
  int batch = 4;
  long long steps = 2000;
  std::uint64_t seed = 0;
  int crop_len = 32768;
  int log_every = 50;
  // Losses averaged for the first and last moving-average points.
  int average_window = 100;
  // 0 saves only at the end.
  long long checkpoint_every = 0;
};

struct IoSection {
  std::string dataset_dir = "data";
  std::string checkpoint = "model.ckpt";
  std::string out_dir = "out";
  int chunk_len = 32768;
};

// Everything one run needs. Sections map to the JSON objects "stft",
// "model", "flow", "solver", "train" and "io"; unknown keys are rejected.
struct RunConfig {
  dsp::StftConfig stft;
  caunet::NetConfig model;
  FlowSection flow;
  SolverSection solver;
  TrainSection train;
  IoSection io;

  // Checks each section and their agreement (bins, channel counts,
  // chunk alignment). Throws ConfigError.
  void validate() const;

  [[nodiscard]] solvers::Schedule schedule() const;
  [[nodiscard]] cfm::TrainConfig train_config() const;
  [[nodiscard]] streampipe::RenderConfig render_config() const;
};

nlohmann::json to_json(const RunConfig& cfg);
RunConfig run_config_from_json(const nlohmann::json& j);
RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace auralis::cli
