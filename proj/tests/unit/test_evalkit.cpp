// Copyright 2026 The Auralis Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>
#include <sstream>
#include <unistd.h>

#include "auralis/errors.hpp"
#include "auralis/evalkit/metrics.hpp"
#include "auralis/evalkit/profile.hpp"
#include "auralis/evalkit/report.hpp"
#include "auralis/io/wav.hpp"

using namespace auralis;
using namespace auralis::evalkit;

namespace {

AudioClip noise(int channels, std::size_t n, std::uint64_t seed, float sd = 0.1f) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> g(0.0f, sd);
  AudioClip c;
  c.channels.assign(channels, std::vector<float>(n));
  for (auto& ch : c.channels) {
    for (float& v : ch) v = g(rng);
  }
  return c;
}

AudioClip scaled(AudioClip c, float k) {
  for (auto& ch : c.channels) {
    for (float& v : ch) v *= k;
  }
  return c;
}

// First-order all-pass with half a sample of low-frequency delay.
AudioClip allpass(const AudioClip& in) {
  const double a = 1.0 / 3.0;
  AudioClip out = in;
  for (auto& ch : out.channels) {
    double x1 = 0.0, y1 = 0.0;
    for (float& v : ch) {
      const double x = v;
      const double y = a * x + x1 - a * y1;
      x1 = x;
      y1 = y;
      v = static_cast<float>(y);
    }
  }
  return out;
}

EvalOptions train_split() {
  EvalOptions o;
  o.split = "train";
  return o;
}

}  // namespace

TEST_CASE("wave_l2 identities") {
  const AudioClip a = noise(2, 4096, 1);
  CHECK(wave_l2(a, a) == 0.0);
  AudioClip b = a;
  for (auto& ch : b.channels) {
    for (float& v : ch) v += 0.001f;
  }
  CHECK(wave_l2(b, a) == doctest::Approx(1e-6).epsilon(1e-3));
  const AudioClip c = noise(2, 4096, 2);
  const double base = wave_l2(a, c);
  CHECK(wave_l2(scaled(a, 3), scaled(c, 3)) == doctest::Approx(9 * base).epsilon(1e-5));
  CHECK_THROWS_AS(wave_l2(a, noise(2, 4095, 1)), InputError);
  CHECK_THROWS_AS(wave_l2(a, noise(1, 4096, 1)), InputError);
}

TEST_CASE("mag_l2 ignores an all-pass phase change") {
  const AudioClip ref = noise(2, 16384, 3);
  const AudioClip shifted = allpass(ref);
  CHECK(mag_l2(ref, ref) == 0.0);
  double power = 0.0;
  const auto spec = dsp::stft(ref, dsp::StftConfig{});
  for (auto v : spec.values()) power += std::norm(v);
  power /= static_cast<double>(spec.values().size());
  const double m = mag_l2(shifted, ref);
  const double w = wave_l2(shifted, ref);
  CHECK(w > 1e-3);
  CHECK(m < 0.01 * power);
  CHECK(phase_err(shifted, ref) > 0.1);
}

TEST_CASE("mag_l2 of a doubled signal equals the mean power") {
  const AudioClip ref = noise(2, 4096, 4);
  const auto spec = dsp::stft(ref, dsp::StftConfig{});
  double power = 0.0;
  for (auto v : spec.values()) power += std::norm(v);
  power /= static_cast<double>(spec.values().size());
  CHECK(mag_l2(scaled(ref, 2), ref) == doctest::Approx(power).epsilon(1e-4));
}

TEST_CASE("phase_err rotation, symmetry-zero and random range") {
  const AudioClip ref = noise(2, 4096, 5);
  const auto spec = dsp::stft(ref, dsp::StftConfig{});
  dsp::Spectrogram rot = spec;
  for (auto& v : rot.values()) v *= dsp::cfloat(0.0f, 1.0f);
  CHECK(phase_err(spec, spec) == 0.0);
  CHECK(phase_err(rot, spec) == doctest::Approx(std::numbers::pi / 2).epsilon(1e-6));
  const AudioClip other = noise(2, 4096, 6);
  const double r = phase_err(other, ref);
  CHECK(r > 1.0);
  CHECK(r < 2.2);
  CHECK(phase_err(scaled(other, 5.0f), ref) == doctest::Approx(r).epsilon(1e-6));
  CHECK(phase_err(other, ref) <= std::numbers::pi);
}

TEST_CASE("metrics accept lengths that are not a hop multiple") {
  const AudioClip a = noise(2, 1000, 7);
  const AudioClip b = noise(2, 1000, 8);
  const Metrics m = compute_metrics(a, b);
  CHECK(m.wave_l2 > 0.0);
  CHECK(m.mag_l2 > 0.0);
  CHECK(m.phase_err > 0.0);
  const Metrics z = compute_metrics(a, a);
  CHECK(z.wave_l2 == 0.0);
  CHECK(z.mag_l2 == 0.0);
  CHECK(z.phase_err == 0.0);
}

TEST_CASE("itd_lag finds integer delays with the right sign") {
  const AudioClip src = noise(1, 8000, 9);
  for (int d : {0, 3, 17, 25}) {
    AudioClip b;
    b.channels.assign(2, std::vector<float>(8000, 0.0f));
    for (int i = 0; i < 8000; ++i) {
      b.channels[1][i] = src.channels[0][i];
      b.channels[0][i] = i >= d ? src.channels[0][i - d] : 0.0f;
    }
    CHECK(itd_lag(b) == d);
    std::swap(b.channels[0], b.channels[1]);
    CHECK(itd_lag(b) == -d);
  }
  CHECK(itd_lag(duplicate_mono(src)) == 0);
  CHECK_THROWS_AS(itd_lag(src), InputError);
}

TEST_CASE("dataset evaluation and the identity baseline") {
  const auto dir = std::filesystem::temp_directory_path() /
                   ("auralis_eval_" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  synthdata::DatasetConfig cfg;
  cfg.count = 10;
  cfg.clip_len = 16384;
  cfg.seed = 3;
  const auto manifest = synthdata::make_dataset(dir, cfg);

  const MetricReport base = evaluate_identity(dir, manifest);
  CHECK(base.clips.size() == manifest.split("test").size());
  CHECK(base.mean.wave_l2 > 0.0);
  CHECK(base.mean.mag_l2 > 0.0);
  CHECK(base.get("model") == "identity");

  const MetricReport oracle = evaluate(
      dir, manifest,
      [&dir](const synthdata::ClipRecord& c, const AudioClip&, const io::PosePair&) {
        return io::read_wav(dir / c.binaural);
      },
      train_split());
  CHECK(oracle.mean.wave_l2 == 0.0);
  CHECK(oracle.mean.mag_l2 == 0.0);
  CHECK(oracle.mean.phase_err == 0.0);
  CHECK(oracle.itd_sign_matches >= oracle.directional * 8 / 10);
  for (const auto& c : oracle.clips) CHECK(c.ref_lag == c.pred_lag);

  MetricReport tagged = oracle;
  tagged.set("nfe", "6");
  tagged.set("solver", "midpoint");
  tagged.set("nfe", "30");
  std::ostringstream csv;
  tagged.write_csv(csv);
  CHECK(csv.str().find("# nfe=30") != std::string::npos);
  CHECK(csv.str().find("mean,0,0,0") != std::string::npos);
  std::ostringstream sum;
  write_summary_csv(sum, {base, tagged});
  CHECK(sum.str().find("split,model,nfe,solver,clips") == 0);
  CHECK(!tagged.text().empty());
  EvalOptions dev;
  dev.split = "dev";
  CHECK_THROWS_AS(evaluate_identity(dir, manifest, dev), InputError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("profile report structure") {
  caunet::NetConfig net = caunet::NetConfig::toy();
  net.base_channels = 8;
  net.multipliers = {1, 2};
  net.num_resample = 1;
  net.embed_dim = 16;
  net.fourier_rows = 8;
  net.norm_groups = 4;
  caunet::CausalUNet model(net);
  streampipe::RenderConfig rc;
  ProfileOptions opts;
  opts.nfe = {4, 1, 2};
  opts.clip_len = 2048;
  opts.repetitions = 3;
  const RtfReport r = profile_rtf(model, rc, opts);
  REQUIRE(r.rows.size() == 3);
  CHECK(r.rows[0].nfe == 1);
  CHECK(r.rows[0].solver == "euler");
  CHECK(r.rows[1].solver == "midpoint");
  CHECK(r.rows[2].nfe == 4);
  for (const auto& row : r.rows) {
    CHECK(row.times_s.size() == 3);
    CHECK(row.median_s > 0.0);
    CHECK(row.rtf == doctest::Approx(row.median_s / (2048.0 / 48000.0)));
  }
  CHECK(r.clip_s == doctest::Approx(2048.0 / 48000.0));
  CHECK(r.row(2).nfe == 2);
  CHECK_THROWS_AS((void)r.row(6), InputError);
  opts.repetitions = 0;
  CHECK_THROWS_AS(profile_rtf(model, rc, opts), ConfigError);
}
