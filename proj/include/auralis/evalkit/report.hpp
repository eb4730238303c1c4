// Copyright 2026 The Auralis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "auralis/evalkit/metrics.hpp"
#include "auralis/io/pose_csv.hpp"
#include "auralis/synthdata/synth.hpp"

namespace auralis::evalkit {

struct ClipResult {
  std::string id;
  Metrics metrics;
  double azimuth_deg = 0.0;
  int ref_lag = 0;
  int pred_lag = 0;
};

struct MetricReport {
  // Ordered key/value pairs: nfe, solver, schedule, model, ...
  std::vector<std::pair<std::string, std::string>> metadata;
  std::vector<ClipResult> clips;
  Metrics mean;
  // Clips whose mid-clip |sin(azimuth)| reaches the directional threshold,
  // and how many of them have a predicted lag of matching sign.
  int directional = 0;
  int itd_sign_matches = 0;

  void set(const std::string& key, const std::string& value);
  [[nodiscard]] std::string get(const std::string& key) const;
  [[nodiscard]] double itd_accuracy() const;
  // Per-clip rows followed by the mean row.
  void write_csv(std::ostream& out) const;
  [[nodiscard]] std::string text() const;
};

// One row per report, for sweeps over solver settings.
void write_summary_csv(std::ostream& out, const std::vector<MetricReport>& reports);

struct EvalOptions {
  std::string split = "test";
  dsp::StftConfig stft;
  double directional_sin = 0.5;
  int max_lag = 48;
  int max_clips = -1;  // all
};

// Produces the binaural estimate for one clip.
using Renderer = std::function<AudioClip(const synthdata::ClipRecord& clip,
                                         const AudioClip& mono,
                                         const io::PosePair& poses)>;

MetricReport evaluate(const std::filesystem::path& dataset_dir,
                      const synthdata::Manifest& manifest, const Renderer& render,
                      const EvalOptions& opts = {});

// Scores the mono-duplicated identity baseline.
MetricReport evaluate_identity(const std::filesystem::path& dataset_dir,
                               const synthdata::Manifest& manifest,
                               const EvalOptions& opts = {});

}  // namespace auralis::evalkit
