// Copyright 2026 The Auralis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <iosfwd>

#include "auralis/pose.hpp"

namespace auralis::io {

struct PosePair {
  PoseTrack tx;
  PoseTrack rx;
};

// Header `time_s,entity,px,py,pz,qw,qx,qy,qz`; entity is `tx` or `rx`.
// Rows of the two entities may interleave. Both tracks are validated with
// a quaternion norm tolerance of 1e-3.
PosePair read_pose_csv(std::istream& in);
PosePair read_pose_csv(const std::filesystem::path& path);

void write_pose_csv(std::ostream& out, const PosePair& poses);
void write_pose_csv(const std::filesystem::path& path, const PosePair& poses);

}  // namespace auralis::io
