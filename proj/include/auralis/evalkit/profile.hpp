// Copyright 2026 The Auralis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "auralis/caunet/unet.hpp"
#include "auralis/streampipe/session.hpp"

namespace auralis::evalkit {

struct RtfRow {
  int nfe = 0;
  std::string solver;
  double median_s = 0.0;
  double rtf = 0.0;  // median_s / clip duration
  std::vector<double> times_s;
};

struct RtfReport {
  int clip_len = 0;
  double clip_s = 0.0;
  int repetitions = 0;
  int warmup = 0;
  std::string hardware;
  std::string model;
  std::vector<RtfRow> rows;  // ascending nfe

  [[nodiscard]] bool monotone() const;
  [[nodiscard]] const RtfRow& row(int nfe) const;
  void write_csv(std::ostream& out) const;
  [[nodiscard]] std::string text() const;
};

struct ProfileOptions {
  std::vector<int> nfe{1, 2, 4, 6, 8, 10};
  int clip_len = 32768;
  int repetitions = 5;
  int warmup = 1;
};

// CPU model and thread count, best effort.
std::string hardware_description();

// Times offline rendering of one seeded noise clip per NFE. Warmup runs are
// discarded; each row reports the median. An NFE the configured solver
// cannot realize (odd counts with a two-stage solver) uses Euler steps.
RtfReport profile_rtf(caunet::CausalUNet& model,
                      const streampipe::RenderConfig& base,
                      const ProfileOptions& opts = {});

}  // namespace auralis::evalkit
