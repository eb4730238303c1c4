// Copyright 2026 The Auralis Authors
// SPDX-License-Identifier: Apache-2.0

#include "auralis/synthdata/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>

#include "auralis/errors.hpp"
#include "auralis/io/pose_csv.hpp"
#include "auralis/io/wav.hpp"
#include "auralis/seed.hpp"

namespace auralis::synthdata {
namespace {

using nlohmann::json;
constexpr double kPi = std::numbers::pi;

// Second-order Butterworth section (RBJ cookbook form).
struct Biquad {
  double b0, b1, b2, a1, a2;
  double z1 = 0.0, z2 = 0.0;

  static Biquad make(bool highpass, double fc, double sr) {
    const double w = 2.0 * kPi * fc / sr;
    const double alpha = std::sin(w) / std::sqrt(2.0);
    const double c = std::cos(w);
    const double a0 = 1.0 + alpha;
    const double k = highpass ? (1.0 + c) / 2.0 : (1.0 - c) / 2.0;
    const double b1 = highpass ? -(1.0 + c) : (1.0 - c);
    return {k / a0, b1 / a0, k / a0, -2.0 * c / a0, (1.0 - alpha) / a0};
  }

  double operator()(double x) {
    const double y = b0 * x + z1;
    z1 = b1 * x - a1 * y + z2;
    z2 = b2 * x - a2 * y;
    return y;
  }
};

double ear_path(double dist, double az, double r, double sign) {
  return std::max(0.0, dist + sign * r * std::sin(az));
}

}  // namespace

void RoomSpec::validate() const {
  if (!(head_radius >= 0.0)) throw ConfigError("room head radius must be >= 0");
  if (!(speed_of_sound > 0.0)) throw ConfigError("speed of sound must be > 0");
  if (!(noise_std >= 0.0)) throw ConfigError("room noise std must be >= 0");
  if (!(min_distance > 0.0)) throw ConfigError("room min distance must be > 0");
  if (right_tap_offset < 0) throw ConfigError("right tap offset must be >= 0");
  for (std::size_t i = 0; i < taps.size(); ++i) {
    const auto [d, g] = taps[i];
    if (!(d > 0.0) || !(g > 0.0)) {
      throw ConfigError("reverb taps need positive delays and gains");
    }
    if (i > 0 && (d <= taps[i - 1].first || g > taps[i - 1].second)) {
      throw ConfigError("reverb taps must have increasing delays and decaying gains");
    }
  }
}

json to_json(const RoomSpec& room) {
  json taps = json::array();
  for (const auto& [d, g] : room.taps) taps.push_back({d, g});
  return {{"head_radius", room.head_radius},
          {"speed_of_sound", room.speed_of_sound},
          {"taps", taps},
          {"right_tap_offset", room.right_tap_offset},
          {"noise_std", room.noise_std},
          {"min_distance", room.min_distance}};
}

RoomSpec room_from_json(const json& j) {
  RoomSpec r;
  for (const auto& [key, v] : j.items()) {
    if (key == "head_radius") {
      r.head_radius = v.get<double>();
    } else if (key == "speed_of_sound") {
      r.speed_of_sound = v.get<double>();
    } else if (key == "taps") {
      r.taps.clear();
      for (const auto& t : v) r.taps.emplace_back(t.at(0).get<double>(), t.at(1).get<double>());
    } else if (key == "right_tap_offset") {
      r.right_tap_offset = v.get<int>();
    } else if (key == "noise_std") {
      r.noise_std = v.get<double>();
    } else if (key == "min_distance") {
      r.min_distance = v.get<double>();
    } else {
      throw ConfigError("unknown room key '" + key + "'");
    }
  }
  r.validate();
  return r;
}

Trajectory synth_trajectory(double duration_s, std::uint64_t seed, double rate) {
  if (!(duration_s > 0.0) || !(rate > 0.0)) {
    throw ConfigError("trajectory duration and rate must be positive");
  }
  const auto count = static_cast<std::size_t>(std::llround(duration_s * rate));
  std::mt19937_64 rng(mix_seed(seed, 0x7a11));
  std::uniform_real_distribution<double> ux(0.3, 2.7);
  std::uniform_real_distribution<double> uy(0.3, 3.7);
  std::normal_distribution<double> n01(0.0, 1.0);
  const double dt = 1.0 / rate;
  double p[2] = {ux(rng), uy(rng)};
  double v[2] = {0.5 * n01(rng), 0.5 * n01(rng)};
  double yaw = std::uniform_real_distribution<double>(-kPi, kPi)(rng);
  const double bounds[2] = {3.0, 4.0};
  Trajectory out;
  for (std::size_t i = 0; i < count; ++i) {
    for (int a = 0; a < 2; ++a) {
      v[a] = 0.98 * v[a] + 0.3 * std::sqrt(dt) * n01(rng);
      p[a] += v[a] * dt;
      if (p[a] < 0.0) {
        p[a] = -p[a];
        v[a] = -v[a];
      }
      if (p[a] > bounds[a]) {
        p[a] = 2.0 * bounds[a] - p[a];
        v[a] = -v[a];
      }
    }
    yaw += 0.02 * n01(rng);
    const double t = static_cast<double>(i) * dt;
    Pose tx;
    tx.position = {p[0], p[1], 1.6};
    Pose rx;
    rx.position = {1.5, 2.0, 1.2};
    rx.rotation = quat_from_yaw(yaw);
    out.tx.push_back(t, tx);
    out.rx.push_back(t, rx);
  }
  return out;
}

AudioClip synth_source(std::size_t length, std::uint64_t seed, int sample_rate) {
  if (length < 16) throw ConfigError("source length must be at least 16 samples");
  std::mt19937_64 rng(mix_seed(seed, 0x50c3));
  auto uniform = [&rng](double a, double b) {
    return std::uniform_real_distribution<double>(a, b)(rng);
  };
  const auto n = static_cast<long long>(length);
  const double sr = sample_rate;
  std::vector<double> x(length, 0.0);
  const int bursts = std::uniform_int_distribution<int>(2, 4)(rng);
  for (int k = 0; k < bursts; ++k) {
    const long long start =
        std::uniform_int_distribution<long long>(0, n - n / 4 - 1)(rng);
    const long long len =
        std::uniform_int_distribution<long long>(n / 8, n / 2 - 1)(rng);
    const long long end = std::min(n, start + len);
    const long long m = end - start;
    std::vector<double> s(m);
    if (uniform(0.0, 1.0) < 0.5) {
      const double f0 = uniform(150.0, 800.0);
      const double f1 = uniform(150.0, 3000.0);
      const double dur = m / sr;
      for (long long i = 0; i < m; ++i) {
        const double t = i / sr;
        const double ph = 2.0 * kPi * (f0 * t + 0.5 * (f1 - f0) * t * t / dur);
        s[i] = std::sin(ph) + 0.5 * std::sin(2 * ph) + 0.25 * std::sin(3 * ph);
      }
    } else {
      double lo = uniform(200.0, 6000.0);
      double hi = uniform(200.0, 6000.0);
      if (lo > hi) std::swap(lo, hi);
      hi = std::max(hi, lo + 100.0);
      Biquad h1 = Biquad::make(true, lo, sr), h2 = Biquad::make(true, lo, sr);
      Biquad l1 = Biquad::make(false, hi, sr), l2 = Biquad::make(false, hi, sr);
      std::normal_distribution<double> n01(0.0, 1.0);
      double ss = 0.0;
      for (long long i = 0; i < m; ++i) {
        s[i] = l2(l1(h2(h1(n01(rng)))));
        ss += s[i] * s[i];
      }
      const double sd = std::sqrt(ss / static_cast<double>(m)) + 1e-9;
      for (double& v : s) v /= sd;
    }
    const double amp = uniform(0.05, 0.2);
    for (long long i = 0; i < m; ++i) {
      const double env = std::pow(std::sin(kPi * i / static_cast<double>(m)), 2);
      x[start + i] += amp * env * s[i];
    }
  }
  AudioClip clip;
  clip.sample_rate = sample_rate;
  clip.channels.assign(1, std::vector<float>(x.begin(), x.end()));
  return clip;
}

double azimuth(const Pose& tx, const Pose& rx) {
  const std::array<double, 3> d{tx.position[0] - rx.position[0],
                                tx.position[1] - rx.position[1],
                                tx.position[2] - rx.position[2]};
  const auto b = rotate_inverse(rx.rotation, d);
  return std::atan2(-b[1], b[0]);
}

AudioClip binauralize(const AudioClip& mono, const PoseTrack& tx,
                      const PoseTrack& rx, const RoomSpec& room,
                      std::uint64_t seed) {
  room.validate();
  if (mono.num_channels() != 1) throw InputError("binauralize needs mono input");
  const std::size_t n = mono.length();
  const double sr = mono.sample_rate;
  for (const PoseTrack* t : {&tx, &rx}) {
    if (t->empty()) throw InputError("pose track is empty");
    t->validate();
    if (n > 0 && t->last_time() + 1.0 / kDefaultPoseRate < (n - 1) / sr - 1e-9) {
      throw InputError("poses end before the audio");
    }
  }
  for (float v : mono.channels[0]) {
    if (!std::isfinite(v)) throw InputError("mono input is not finite");
  }
  // Per-ear path lengths at the pose timestamps of tx.
  const std::size_t p = tx.size();
  std::vector<double> path[2];
  for (int ear = 0; ear < 2; ++ear) path[ear].resize(p);
  for (std::size_t i = 0; i < p; ++i) {
    const Pose& r = rx.hold(tx.times[i]);
    const Pose& s = tx.poses[i];
    const double dist = std::hypot(s.position[0] - r.position[0],
                                   s.position[1] - r.position[1],
                                   s.position[2] - r.position[2]);
    const double az = azimuth(s, r);
    path[0][i] = ear_path(dist, az, room.head_radius, +1.0);
    path[1][i] = ear_path(dist, az, room.head_radius, -1.0);
  }
  const std::vector<float>& x = mono.channels[0];
  AudioClip out;
  out.sample_rate = mono.sample_rate;
  out.channels.assign(2, std::vector<float>(n, 0.0f));
  std::mt19937_64 rng(mix_seed(seed, 0xa1b1));
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<double> direct(n);
  for (int ear = 0; ear < 2; ++ear) {
    std::size_t k = 0;
    for (std::size_t s = 0; s < n; ++s) {
      const double t = s / sr;
      while (k + 1 < p && tx.times[k + 1] <= t) ++k;
      double len = path[ear][k];
      if (k + 1 < p && t > tx.times[k]) {
        const double a = (t - tx.times[k]) / (tx.times[k + 1] - tx.times[k]);
        len = (1.0 - a) * path[ear][k] + a * path[ear][k + 1];
      }
      const double gain = 1.0 / std::max(len, room.min_distance);
      const double pos = static_cast<double>(s) - len / room.speed_of_sound * sr;
      const double i0 = std::floor(pos);
      const double frac = pos - i0;
      const auto j = static_cast<long long>(i0);
      const double v0 = j >= 0 ? x[j] : 0.0;
      const double v1 = j + 1 >= 0 && j + 1 < static_cast<long long>(n) ? x[j + 1] : 0.0;
      direct[s] = gain * ((1.0 - frac) * v0 + (frac > 0.0 ? frac * v1 : 0.0));
    }
    std::vector<double> y = direct;
    for (const auto& [delay, g] : room.taps) {
      const auto lag = static_cast<std::size_t>(std::llround(delay * sr)) +
                       (ear == 1 ? room.right_tap_offset : 0);
      for (std::size_t s = lag; s < n; ++s) y[s] += g * direct[s - lag];
    }
    for (std::size_t s = 0; s < n; ++s) {
      const double e = room.noise_std > 0.0 ? room.noise_std * noise(rng) : 0.0;
      out.channels[ear][s] = static_cast<float>(y[s] + e);
    }
  }
  return out;
}

SynthClip synth_clip(std::uint64_t seed, std::size_t length, const RoomSpec& room,
                     int sample_rate, double pose_rate) {
  SynthClip c;
  const double duration = static_cast<double>(length) / sample_rate;
  c.poses = synth_trajectory(duration + 1.0 / pose_rate, seed, pose_rate);
  c.mono = synth_source(length, seed, sample_rate);
  c.binaural = binauralize(c.mono, c.poses.tx, c.poses.rx, room, seed);
  return c;
}

std::vector<std::pair<std::string, int>> DatasetConfig::split_counts() const {
  const int train = static_cast<int>(std::lround(count * train_fraction));
  const int val = std::min(count - train,
                           static_cast<int>(std::lround(count * val_fraction)));
  return {{"train", train}, {"val", val}, {"test", count - train - val}};
}

void DatasetConfig::validate() const {
  if (count < 1) throw ConfigError("dataset count must be >= 1");
  if (train_fraction < 0.0 || val_fraction < 0.0 ||
      train_fraction + val_fraction > 1.0) {
    throw ConfigError("split fractions must be >= 0 and sum to at most 1");
  }
  if (clip_len < 16) throw ConfigError("clip length must be >= 16 samples");
  if (sample_rate <= 0 || !(pose_rate > 0.0)) {
    throw ConfigError("sample and pose rates must be positive");
  }
  room.validate();
}

std::vector<ClipRecord> Manifest::split(const std::string& name) const {
  std::vector<ClipRecord> out;
  for (const auto& c : clips) {
    if (c.split == name) out.push_back(c);
  }
  return out;
}

std::uint64_t clip_seed(std::uint64_t dataset_seed, const std::string& split,
                        int index) {
  std::uint64_t base = 0;
  if (split == "val") {
    base = 1ULL << 40;
  } else if (split == "test") {
    base = 2ULL << 40;
  } else if (split != "train") {
    throw ConfigError("unknown split '" + split + "'");
  }
  return mix_seed(dataset_seed, base + static_cast<std::uint64_t>(index));
}

json to_json(const Manifest& m) {
  const DatasetConfig& c = m.config;
  json clips = json::array();
  for (const auto& r : m.clips) {
    clips.push_back({{"id", r.id},
                     {"split", r.split},
                     {"index", r.index},
                     {"seed", r.seed},
                     {"mono", r.mono},
                     {"binaural", r.binaural},
                     {"poses", r.poses},
                     {"azimuth_deg", r.azimuth_deg},
                     {"distance_m", r.distance_m}});
  }
  return {{"format", "auralis-dataset"},
          {"version", 1},
          {"config",
           {{"count", c.count},
            {"train_fraction", c.train_fraction},
            {"val_fraction", c.val_fraction},
            {"clip_len", c.clip_len},
            {"sample_rate", c.sample_rate},
            {"pose_rate", c.pose_rate},
            {"seed", c.seed},
            {"room", to_json(c.room)}}},
          {"clips", clips}};
}

Manifest manifest_from_json(const json& j) {
  try {
    if (j.at("format") != "auralis-dataset" || j.at("version") != 1) {
      throw InputError("not a version 1 dataset manifest");
    }
    Manifest m;
    const json& c = j.at("config");
    m.config.count = c.at("count");
    m.config.train_fraction = c.at("train_fraction");
    m.config.val_fraction = c.at("val_fraction");
    m.config.clip_len = c.at("clip_len");
    m.config.sample_rate = c.at("sample_rate");
    m.config.pose_rate = c.at("pose_rate");
    m.config.seed = c.at("seed");
    m.config.room = room_from_json(c.at("room"));
    for (const json& r : j.at("clips")) {
      m.clips.push_back({r.at("id"), r.at("split"), r.at("index"), r.at("seed"),
                         r.at("mono"), r.at("binaural"), r.at("poses"),
                         r.at("azimuth_deg"), r.at("distance_m")});
    }
    return m;
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed manifest: ") + e.what());
  }
}

Manifest read_manifest(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw InputError("cannot open " + path.string());
  json j;
  try {
    f >> j;
  } catch (const json::exception& e) {
    throw InputError(path.string() + ": " + e.what());
  }
  return manifest_from_json(j);
}

Manifest make_dataset(const std::filesystem::path& dir, const DatasetConfig& cfg,
                      bool force) {
  namespace fs = std::filesystem;
  cfg.validate();
  const fs::path manifest_path = dir / "manifest.json";
  if (fs::exists(manifest_path) && !force) {
    throw InputError(dir.string() + " already holds a dataset (use --force)");
  }
  Manifest m;
  m.config = cfg;
  for (const auto& [split, count] : cfg.split_counts()) {
    if (count == 0) continue;
    fs::create_directories(dir / split);
    for (int i = 0; i < count; ++i) {
      ClipRecord r;
      r.split = split;
      r.index = i;
      r.seed = clip_seed(cfg.seed, split, i);
      char id[32];
      std::snprintf(id, sizeof id, "%s_%05d", split.c_str(), i);
      r.id = id;
      r.mono = split + "/" + r.id + "_mono.wav";
      r.binaural = split + "/" + r.id + "_binaural.wav";
      r.poses = split + "/" + r.id + "_poses.csv";
      const SynthClip c = synth_clip(r.seed, cfg.clip_len, cfg.room,
                                     cfg.sample_rate, cfg.pose_rate);
      const double mid = 0.5 * cfg.clip_len / cfg.sample_rate;
      const Pose& tx = c.poses.tx.hold(mid);
      const Pose& rx = c.poses.rx.hold(mid);
      r.azimuth_deg = azimuth(tx, rx) * 180.0 / kPi;
      r.distance_m = std::hypot(tx.position[0] - rx.position[0],
                                tx.position[1] - rx.position[1],
                                tx.position[2] - rx.position[2]);
      io::write_wav(dir / r.mono, c.mono);
      io::write_wav(dir / r.binaural, c.binaural);
      io::write_pose_csv(dir / r.poses, {c.poses.tx, c.poses.rx});
      m.clips.push_back(r);
    }
  }
  std::ofstream f(manifest_path, std::ios::trunc);
  if (!f) throw InputError("cannot write " + manifest_path.string());
  f << to_json(m).dump(2) << '\n';
  return m;
}

}  // namespace auralis::synthdata
