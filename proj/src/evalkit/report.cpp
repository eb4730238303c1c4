// Copyright 2026 The Auralis Authors
// SPDX-License-Identifier: Apache-2.0

#include "auralis/evalkit/report.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <sstream>

#include "auralis/errors.hpp"
#include "auralis/io/wav.hpp"

namespace auralis::evalkit {
namespace {

constexpr const char* kFooter =
    "wave_l2: mean squared sample error; mag_l2: mean squared STFT magnitude "
    "error (linear magnitude, unweighted); phase_err: magnitude-weighted mean "
    "absolute wrapped phase error in radians. Other definitions (log "
    "magnitude, unweighted phase) give numbers that are not comparable.";

std::string fmt(double v) {
  std::ostringstream s;
  s << std::setprecision(9) << v;
  return s.str();
}

}  // namespace

void MetricReport::set(const std::string& key, const std::string& value) {
  for (auto& [k, v] : metadata) {
    if (k == key) {
      v = value;
      return;
    }
  }
  metadata.emplace_back(key, value);
}

std::string MetricReport::get(const std::string& key) const {
  for (const auto& [k, v] : metadata) {
    if (k == key) return v;
  }
  return {};
}

double MetricReport::itd_accuracy() const {
  return directional > 0 ? static_cast<double>(itd_sign_matches) / directional : 0.0;
}

void MetricReport::write_csv(std::ostream& out) const {
  for (const auto& [k, v] : metadata) out << "# " << k << "=" << v << '\n';
  out << "clip,wave_l2,mag_l2,phase_err,azimuth_deg,ref_lag,pred_lag\n";
  for (const auto& c : clips) {
    out << c.id << ',' << fmt(c.metrics.wave_l2) << ',' << fmt(c.metrics.mag_l2)
        << ',' << fmt(c.metrics.phase_err) << ',' << fmt(c.azimuth_deg) << ','
        << c.ref_lag << ',' << c.pred_lag << '\n';
  }
  out << "mean," << fmt(mean.wave_l2) << ',' << fmt(mean.mag_l2) << ','
      << fmt(mean.phase_err) << ",,,\n";
  out << "# " << kFooter << '\n';
}

std::string MetricReport::text() const {
  std::ostringstream s;
  for (const auto& [k, v] : metadata) s << k << ": " << v << '\n';
  s << std::left << std::setw(24) << "clip" << std::right << std::setw(14)
    << "wave_l2" << std::setw(14) << "mag_l2" << std::setw(12) << "phase_err"
    << std::setw(10) << "az_deg" << std::setw(6) << "ref" << std::setw(6)
    << "pred" << '\n';
  auto row = [&s](const std::string& id, const Metrics& m) {
    s << std::left << std::setw(24) << id << std::right << std::scientific
      << std::setprecision(4) << std::setw(14) << m.wave_l2 << std::setw(14)
      << m.mag_l2 << std::fixed << std::setw(12) << m.phase_err;
  };
  for (const auto& c : clips) {
    row(c.id, c.metrics);
    s << std::setprecision(1) << std::setw(10) << c.azimuth_deg << std::setw(6)
      << c.ref_lag << std::setw(6) << c.pred_lag << '\n';
  }
  row("mean", mean);
  s << '\n'
    << "itd sign matches: " << itd_sign_matches << " / " << directional << '\n'
    << "note: " << kFooter << '\n';
  return s.str();
}

void write_summary_csv(std::ostream& out, const std::vector<MetricReport>& reports) {
  std::vector<std::string> keys;
  for (const auto& r : reports) {
    for (const auto& [k, v] : r.metadata) {
      if (std::find(keys.begin(), keys.end(), k) == keys.end()) keys.push_back(k);
    }
  }
  for (const auto& k : keys) out << k << ',';
  out << "clips,wave_l2,mag_l2,phase_err,directional,itd_sign_matches\n";
  for (const auto& r : reports) {
    for (const auto& k : keys) out << r.get(k) << ',';
    out << r.clips.size() << ',' << fmt(r.mean.wave_l2) << ',' << fmt(r.mean.mag_l2)
        << ',' << fmt(r.mean.phase_err) << ',' << r.directional << ','
        << r.itd_sign_matches << '\n';
  }
}

MetricReport evaluate(const std::filesystem::path& dataset_dir,
                      const synthdata::Manifest& manifest, const Renderer& render,
                      const EvalOptions& opts) {
  auto clips = manifest.split(opts.split);
  if (clips.empty()) throw InputError("split '" + opts.split + "' has no clips");
  if (opts.max_clips >= 0 && static_cast<int>(clips.size()) > opts.max_clips) {
    clips.resize(opts.max_clips);
  }
  MetricReport report;
  report.set("split", opts.split);
  for (const auto& rec : clips) {
    const AudioClip mono = io::read_wav(dataset_dir / rec.mono);
    const AudioClip ref = io::read_wav(dataset_dir / rec.binaural);
    const io::PosePair poses = io::read_pose_csv(dataset_dir / rec.poses);
    const AudioClip pred = render(rec, mono, poses);
    ClipResult r;
    r.id = rec.id;
    r.metrics = compute_metrics(pred, ref, opts.stft);
    r.azimuth_deg = rec.azimuth_deg;
    r.ref_lag = itd_lag(ref, opts.max_lag);
    r.pred_lag = itd_lag(pred, opts.max_lag);
    const double s = std::sin(rec.azimuth_deg * std::numbers::pi / 180.0);
    if (std::abs(s) >= opts.directional_sin) {
      ++report.directional;
      if ((s > 0 && r.pred_lag > 0) || (s < 0 && r.pred_lag < 0)) {
        ++report.itd_sign_matches;
      }
    }
    report.mean.wave_l2 += r.metrics.wave_l2;
    report.mean.mag_l2 += r.metrics.mag_l2;
    report.mean.phase_err += r.metrics.phase_err;
    report.clips.push_back(r);
  }
  const double n = static_cast<double>(report.clips.size());
  report.mean.wave_l2 /= n;
  report.mean.mag_l2 /= n;
  report.mean.phase_err /= n;
  return report;
}

MetricReport evaluate_identity(const std::filesystem::path& dataset_dir,
                               const synthdata::Manifest& manifest,
                               const EvalOptions& opts) {
  MetricReport r = evaluate(
      dataset_dir, manifest,
      [](const synthdata::ClipRecord&, const AudioClip& mono, const io::PosePair&) {
        return duplicate_mono(mono);
      },
      opts);
  r.set("model", "identity");
  return r;
}

}  // namespace auralis::evalkit
