// Copyright 2026 The Auralis Authors
// SPDX-License-Identifier: Apache-2.0

#include "auralis/pose.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "auralis/errors.hpp"

namespace auralis {

double quat_norm(const std::array<double, 4>& q) {
  return std::sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3]);
}

void PoseTrack::validate(double quat_tol) const {
  if (times.size() != poses.size()) {
    throw InputError("pose track: " + std::to_string(times.size()) +
                     " timestamps for " + std::to_string(poses.size()) +
                     " poses");
  }
  for (std::size_t i = 0; i < poses.size(); ++i) {
    if (i > 0 && !(times[i] > times[i - 1])) {
      throw InputError("pose track: timestamps not strictly increasing at row " +
                       std::to_string(i));
    }
    if (std::abs(quat_norm(poses[i].rotation) - 1.0) > quat_tol) {
      throw InputError("pose track: quaternion at row " + std::to_string(i) +
                       " is not unit norm");
    }
  }
}

std::size_t PoseTrack::hold_index(double t) const {
  if (poses.empty()) throw InputError("pose track is empty");
  const auto it = std::upper_bound(times.begin(), times.end(), t);
  if (it == times.begin()) return 0;
  return static_cast<std::size_t>(it - times.begin()) - 1;
}

const Pose& PoseTrack::hold(double t) const { return poses[hold_index(t)]; }

std::array<double, 4> quat_from_yaw(double yaw) {
  return {std::cos(yaw / 2.0), 0.0, 0.0, std::sin(yaw / 2.0)};
}

std::array<double, 3> rotate(const std::array<double, 4>& q,
                             const std::array<double, 3>& v) {
  const double w = q[0], x = q[1], y = q[2], z = q[3];
  // v' = v + 2 w (u x v) + 2 u x (u x v), u = (x, y, z)
  const double cx = y * v[2] - z * v[1];
  const double cy = z * v[0] - x * v[2];
  const double cz = x * v[1] - y * v[0];
  return {v[0] + 2.0 * (w * cx + y * cz - z * cy),
          v[1] + 2.0 * (w * cy + z * cx - x * cz),
          v[2] + 2.0 * (w * cz + x * cy - y * cx)};
}

std::array<double, 3> rotate_inverse(const std::array<double, 4>& q,
                                     const std::array<double, 3>& v) {
  return rotate({q[0], -q[1], -q[2], -q[3]}, v);
}

}  // namespace auralis
