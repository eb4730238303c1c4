// Copyright 2026 The Auralis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "auralis/audio.hpp"
#include "auralis/pose.hpp"

namespace auralis::synthdata {

// Spherical-head room model.
struct RoomSpec {
  double head_radius = 0.0875;    // m
  double speed_of_sound = 343.0;  // m/s
  // (delay s, gain) echoes of the direct path.
  std::vector<std::pair<double, double>> taps{
      {0.0071, 0.35}, {0.0113, 0.25}, {0.0173, 0.18}, {0.0251, 0.12}};
  // Extra tap delay on the right ear, in samples.
  int right_tap_offset = 7;
  double noise_std = 0.002;
  // Gains follow 1 / max(path, min_distance).
  double min_distance = 1.0;  // m

  // Throws ConfigError unless delays are positive and increasing, gains
  // positive and decaying, noise_std >= 0 and min_distance > 0.
  void validate() const;
};

nlohmann::json to_json(const RoomSpec& room);
RoomSpec room_from_json(const nlohmann::json& j);

struct Trajectory {
  PoseTrack tx;
  PoseTrack rx;
};

// Transmitter: smooth random walk at 1.6 m height inside a 3 x 4 m area,
// reflecting at the walls. Receiver: seated at (1.5, 2.0, 1.2) with a random
// initial yaw and a slow yaw random walk. round(duration * rate) poses.
Trajectory synth_trajectory(double duration_s, std::uint64_t seed,
                            double rate = kDefaultPoseRate);

// Speech-like mono source: 2 to 4 enveloped bursts, each a harmonic chirp
// or band-limited noise.
AudioClip synth_source(std::size_t length, std::uint64_t seed,
                       int sample_rate = kDefaultSampleRate);

// Receiver-frame azimuth of the transmitter in radians, positive to the
// right (rx faces +x of its body frame, +y is its left).
double azimuth(const Pose& tx, const Pose& rx);

// Two-ear rendering: per ear a linearly interpolated fractional delay of
// (distance -/+ r sin(azimuth)) / c, gain 1 / max(path, min_distance), the
// tap reverb and seeded Gaussian noise. Pose-derived quantities are
// interpolated linearly between pose timestamps.
AudioClip binauralize(const AudioClip& mono, const PoseTrack& tx,
                      const PoseTrack& rx, const RoomSpec& room,
                      std::uint64_t seed);

struct SynthClip {
  AudioClip mono;
  AudioClip binaural;
  Trajectory poses;
};

SynthClip synth_clip(std::uint64_t seed, std::size_t length,
                     const RoomSpec& room, int sample_rate = kDefaultSampleRate,
                     double pose_rate = kDefaultPoseRate);

struct DatasetConfig {
  int count = 100;
  double train_fraction = 0.8;
  double val_fraction = 0.1;
  int clip_len = 32768;
  int sample_rate = kDefaultSampleRate;
  double pose_rate = kDefaultPoseRate;
  std::uint64_t seed = 0;
  RoomSpec room;

  // Clips per split, summing to count.
  [[nodiscard]] std::vector<std::pair<std::string, int>> split_counts() const;
  void validate() const;
};

struct ClipRecord {
  std::string id;
  std::string split;
  // Position inside the split's seed range; the generator seed is derived
  // from (dataset seed, split, index).
  int index = 0;
  std::uint64_t seed = 0;
  std::string mono;      // paths relative to the manifest
  std::string binaural;
  std::string poses;
  double azimuth_deg = 0.0;  // at mid-clip
  double distance_m = 0.0;   // at mid-clip
};

struct Manifest {
  DatasetConfig config;
  std::vector<ClipRecord> clips;

  [[nodiscard]] std::vector<ClipRecord> split(const std::string& name) const;
};

nlohmann::json to_json(const Manifest& m);
Manifest manifest_from_json(const nlohmann::json& j);
Manifest read_manifest(const std::filesystem::path& path);

// Generator seed of clip `index` in `split`. Splits draw from disjoint
// index ranges.
std::uint64_t clip_seed(std::uint64_t dataset_seed, const std::string& split,
                        int index);

// Writes <dir>/<split>/<id>_{mono,binaural}.wav, <id>_poses.csv and
// <dir>/manifest.json. Refuses an existing manifest unless `force`.
Manifest make_dataset(const std::filesystem::path& dir,
                      const DatasetConfig& cfg, bool force = false);

}  // namespace auralis::synthdata
