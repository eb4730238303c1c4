// Copyright 2026 The Auralis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace auralis {

// Position in meters and a unit quaternion (w, x, y, z).
struct Pose {
  std::array<double, 3> position{0.0, 0.0, 0.0};
  std::array<double, 4> rotation{1.0, 0.0, 0.0, 0.0};
};

inline constexpr double kDefaultPoseRate = 240.0;

// Timestamped poses of one entity, timestamps strictly increasing.
struct PoseTrack {
  std::vector<double> times;
  std::vector<Pose> poses;

  [[nodiscard]] std::size_t size() const { return poses.size(); }
  [[nodiscard]] bool empty() const { return poses.empty(); }

  void push_back(double t, const Pose& p) {
    times.push_back(t);
    poses.push_back(p);
  }

  // Throws InputError on unsorted timestamps, size mismatch or a quaternion
  // whose norm is off by more than `quat_tol`.
  void validate(double quat_tol = 1e-3) const;

  // Zero-order hold: the latest pose with timestamp <= t; the first pose
  // when t precedes the track.
  [[nodiscard]] const Pose& hold(double t) const;
  // Index of the pose `hold(t)` returns.
  [[nodiscard]] std::size_t hold_index(double t) const;

  [[nodiscard]] double last_time() const {
    return times.empty() ? 0.0 : times.back();
  }
};

double quat_norm(const std::array<double, 4>& q);

// Yaw-only rotation about +z.
std::array<double, 4> quat_from_yaw(double yaw);

// Rotates v by q.
std::array<double, 3> rotate(const std::array<double, 4>& q,
                             const std::array<double, 3>& v);
// Rotates v by the inverse of q (world to body frame).
std::array<double, 3> rotate_inverse(const std::array<double, 4>& q,
                                     const std::array<double, 3>& v);

}  // namespace auralis
