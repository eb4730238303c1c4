// Copyright 2026 The Auralis Authors
// SPDX-License-Identifier: Apache-2.0

#include "auralis/io/pose_csv.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "auralis/errors.hpp"

namespace auralis::io {
namespace {

constexpr const char* kHeader = "time_s,entity,px,py,pz,qw,qx,qy,qz";

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double number(const std::string& s, std::size_t row) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto [p, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || p != end) {
    throw InputError("pose csv row " + std::to_string(row) + ": bad number '" +
                     s + "'");
  }
  return v;
}

}  // namespace

PosePair read_pose_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InputError("pose csv is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kHeader) {
    throw InputError("pose csv header must be '" + std::string(kHeader) + "'");
  }
  PosePair out;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != 9) {
      throw InputError("pose csv row " + std::to_string(row) + ": expected 9 fields");
    }
    Pose p;
    const double t = number(f[0], row);
    for (int i = 0; i < 3; ++i) p.position[i] = number(f[2 + i], row);
    for (int i = 0; i < 4; ++i) p.rotation[i] = number(f[5 + i], row);
    if (f[1] == "tx") {
      out.tx.push_back(t, p);
    } else if (f[1] == "rx") {
      out.rx.push_back(t, p);
    } else {
      throw InputError("pose csv row " + std::to_string(row) + ": entity must be tx or rx");
    }
  }
  if (out.tx.empty() || out.rx.empty()) {
    throw InputError("pose csv needs rows for both tx and rx");
  }
  out.tx.validate();
  out.rx.validate();
  return out;
}

PosePair read_pose_csv(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw InputError("cannot open " + path.string());
  return read_pose_csv(f);
}

void write_pose_csv(std::ostream& out, const PosePair& poses) {
  out << kHeader << '\n';
  out << std::setprecision(17);
  for (const auto* entry : {&poses.tx, &poses.rx}) {
    const char* name = entry == &poses.tx ? "tx" : "rx";
    for (std::size_t i = 0; i < entry->size(); ++i) {
      const Pose& p = entry->poses[i];
      out << entry->times[i] << ',' << name;
      for (double v : p.position) out << ',' << v;
      for (double v : p.rotation) out << ',' << v;
      out << '\n';
    }
  }
}

void write_pose_csv(const std::filesystem::path& path, const PosePair& poses) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw InputError("cannot write " + path.string());
  write_pose_csv(f, poses);
  if (!f) throw InputError("write failed for " + path.string());
}

}  // namespace auralis::io
