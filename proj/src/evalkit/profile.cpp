// Copyright 2026 The Auralis Authors
// SPDX-License-Identifier: Apache-2.0

#include "auralis/evalkit/profile.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

#include "auralis/errors.hpp"

namespace auralis::evalkit {

bool RtfReport::monotone() const {
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].median_s < rows[i - 1].median_s) return false;
  }
  return true;
}

const RtfRow& RtfReport::row(int nfe) const {
  for (const auto& r : rows) {
    if (r.nfe == nfe) return r;
  }
  throw InputError("no profile row for nfe " + std::to_string(nfe));
}

void RtfReport::write_csv(std::ostream& out) const {
  out << "# hardware=" << hardware << "\n# model=" << model
      << "\n# clip_len=" << clip_len << "\n# clip_s=" << clip_s
      << "\n# repetitions=" << repetitions << "\n# warmup=" << warmup << '\n';
  out << "nfe,solver,median_s,rtf\n";
  for (const auto& r : rows) {
    out << r.nfe << ',' << r.solver << ',' << std::setprecision(6) << r.median_s
        << ',' << r.rtf << '\n';
  }
}

std::string RtfReport::text() const {
  std::ostringstream s;
  s << "hardware: " << hardware << "\nmodel: " << model << "\nclip: " << clip_len
    << " samples (" << std::fixed << std::setprecision(3) << clip_s
    << " s), median of " << repetitions << " after " << warmup << " warmup\n";
  s << std::setw(5) << "nfe" << std::setw(14) << "solver" << std::setw(12)
    << "time_s" << std::setw(10) << "rtf" << '\n';
  for (const auto& r : rows) {
    s << std::setw(5) << r.nfe << std::setw(14) << r.solver << std::setw(12)
      << std::setprecision(4) << r.median_s << std::setw(10) << r.rtf << '\n';
  }
  return s.str();
}

std::string hardware_description() {
  std::string cpu = "unknown cpu";
  std::ifstream f("/proc/cpuinfo");
  for (std::string line; std::getline(f, line);) {
    if (line.rfind("model name", 0) == 0) {
      const auto colon = line.find(':');
      if (colon != std::string::npos) cpu = line.substr(colon + 2);
      break;
    }
  }
  return cpu + ", " + std::to_string(std::thread::hardware_concurrency()) +
         " hardware threads";
}

RtfReport profile_rtf(caunet::CausalUNet& model,
                      const streampipe::RenderConfig& base,
                      const ProfileOptions& opts) {
  if (opts.nfe.empty()) throw ConfigError("profile needs at least one nfe");
  if (opts.repetitions < 1 || opts.warmup < 0) {
    throw ConfigError("profile needs repetitions >= 1 and warmup >= 0");
  }
  if (opts.clip_len < base.stft.hop) throw ConfigError("profile clip is too short");
  std::vector<int> nfes = opts.nfe;
  std::sort(nfes.begin(), nfes.end());
  nfes.erase(std::unique(nfes.begin(), nfes.end()), nfes.end());

  AudioClip mono;
  mono.channels.assign(1, std::vector<float>(opts.clip_len));
  std::mt19937_64 rng(base.seed);
  std::normal_distribution<float> g(0.0f, 0.05f);
  for (float& v : mono.channels[0]) v = g(rng);
  PoseTrack tx;
  PoseTrack rx;
  Pose front;
  front.position = {1.0, 0.0, 0.0};
  const double dur = mono.duration_s();
  for (int i = 0; i <= static_cast<int>(dur * kDefaultPoseRate) + 1; ++i) {
    tx.push_back(i / kDefaultPoseRate, front);
    rx.push_back(i / kDefaultPoseRate, Pose{});
  }

  RtfReport report;
  report.clip_len = opts.clip_len;
  report.clip_s = dur;
  report.repetitions = opts.repetitions;
  report.warmup = opts.warmup;
  report.hardware = hardware_description();
  report.model = model.config().preset;
  for (int nfe : nfes) {
    streampipe::RenderConfig cfg = base;
    solvers::SolverKind solver = base.schedule.solver;
    if (nfe % solvers::evals_per_step(solver) != 0) solver = solvers::SolverKind::kEuler;
    cfg.schedule = solvers::make_schedule(base.schedule.kind, nfe, solver,
                                          base.schedule.coefficient);
    RtfRow row;
    row.nfe = nfe;
    row.solver = solvers::to_string(solver);
    for (int i = 0; i < opts.warmup + opts.repetitions; ++i) {
      const auto t0 = std::chrono::steady_clock::now();
      const AudioClip out = streampipe::render_offline(model, mono, tx, rx, cfg);
      const auto t1 = std::chrono::steady_clock::now();
      if (out.length() != mono.length()) throw NumericError("render lost samples");
      if (i >= opts.warmup) {
        row.times_s.push_back(std::chrono::duration<double>(t1 - t0).count());
      }
    }
    std::vector<double> sorted = row.times_s;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t m = sorted.size();
    row.median_s = m % 2 == 1 ? sorted[m / 2] : 0.5 * (sorted[m / 2 - 1] + sorted[m / 2]);
    row.rtf = row.median_s / dur;
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace auralis::evalkit
