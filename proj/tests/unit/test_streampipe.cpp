// Copyright 2026 The Auralis Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "auralis/errors.hpp"
#include "auralis/streampipe/session.hpp"

using namespace auralis;
using namespace auralis::streampipe;

namespace {

caunet::NetConfig small_net() {
  caunet::NetConfig c = caunet::NetConfig::toy();
  c.base_channels = 8;
  c.multipliers = {1, 2};
  c.num_resample = 1;
  c.embed_dim = 16;
  c.fourier_rows = 8;
  c.norm_groups = 4;
  c.init_seed = 5;
  return c;
}

RenderConfig small_render(int chunk_len) {
  RenderConfig r;
  r.chunk_len = chunk_len;
  r.seed = 11;
  r.schedule = solvers::make_schedule(solvers::ScheduleKind::kEarlySkip, 2,
                                      solvers::SolverKind::kMidpoint);
  return r;
}

AudioClip noise_clip(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> d(0.0f, 0.1f);
  AudioClip c;
  c.channels.assign(1, std::vector<float>(n));
  for (float& v : c.channels[0]) v = d(rng);
  return c;
}

PoseTrack track(double duration, double phase) {
  PoseTrack t;
  for (int i = 0; i <= static_cast<int>(duration * kDefaultPoseRate) + 1; ++i) {
    const double s = i / kDefaultPoseRate;
    Pose p;
    p.position = {std::cos(s + phase), std::sin(2 * s), 1.2};
    p.rotation = quat_from_yaw(0.3 * s + phase);
    t.push_back(s, p);
  }
  return t;
}

void append(AudioClip& dst, const AudioClip& src) {
  if (dst.channels.empty()) dst.channels.resize(src.channels.size());
  for (std::size_t c = 0; c < src.channels.size(); ++c) {
    dst.channels[c].insert(dst.channels[c].end(), src.channels[c].begin(),
                           src.channels[c].end());
  }
}

AudioClip stream(caunet::CausalUNet& net, const AudioClip& mono,
                 const PoseTrack& tx, const PoseTrack& rx, RenderConfig cfg) {
  StreamSession s(net, cfg);
  AudioClip out;
  for (std::size_t i = 0; i < mono.length(); i += cfg.chunk_len) {
    AudioClip chunk;
    const std::size_t end = std::min(mono.length(), i + cfg.chunk_len);
    chunk.channels.assign(1, std::vector<float>(mono.channels[0].begin() + i,
                                                mono.channels[0].begin() + end));
    append(out, s.push(chunk, tx, rx));
  }
  append(out, s.finish());
  return out;
}

float max_diff(const AudioClip& a, const AudioClip& b, std::size_t from = 0,
               std::size_t to = SIZE_MAX) {
  REQUIRE(a.num_channels() == b.num_channels());
  REQUIRE(a.length() == b.length());
  float m = 0.0f;
  for (int c = 0; c < a.num_channels(); ++c) {
    for (std::size_t i = from; i < std::min(to, a.length()); ++i) {
      m = std::max(m, std::abs(a.channels[c][i] - b.channels[c][i]));
    }
  }
  return m;
}

}  // namespace

TEST_CASE("open and finish without input yields nothing") {
  caunet::CausalUNet net(small_net());
  StreamSession s(net, small_render(1024));
  const AudioClip out = s.finish();
  CHECK(out.length() == 0);
  CHECK(s.bank().size() == 0);
}

TEST_CASE("chunk length must fit the model frame blocks") {
  caunet::CausalUNet net(small_net());
  CHECK_THROWS_AS(StreamSession(net, small_render(128)), ConfigError);
  CHECK_NOTHROW(StreamSession(net, small_render(256)));
}

TEST_CASE("streaming equals offline for several chunkings") {
  caunet::CausalUNet net(small_net());
  const AudioClip mono = noise_clip(4096 + 300, 1);
  const PoseTrack tx = track(0.2, 0.0);
  const PoseTrack rx = track(0.2, 1.0);
  const AudioClip offline = render_offline(net, mono, tx, rx, small_render(1024));
  CHECK(offline.num_channels() == 2);
  CHECK(offline.length() == mono.length());
  for (int chunk : {256, 1024, 2048, 4096, 8192}) {
    CAPTURE(chunk);
    const AudioClip streamed = stream(net, mono, tx, rx, small_render(chunk));
    CHECK(max_diff(offline, streamed) <= 1e-5f);
  }
}

TEST_CASE("sessions with equal seeds agree") {
  caunet::CausalUNet net(small_net());
  const AudioClip mono = noise_clip(1024, 2);
  const PoseTrack tx = track(0.1, 0.0);
  StreamSession a(net, small_render(1024));
  StreamSession b(net, small_render(1024));
  const AudioClip oa = a.push(mono, tx, tx);
  const AudioClip ob = b.push(mono, tx, tx);
  CHECK(a.bank().hash() == b.bank().hash());
  CHECK(max_diff(oa, ob) == 0.0f);
  CHECK(a.bank().size() == 2);
}

TEST_CASE("bank size is constant over many chunks") {
  caunet::CausalUNet net(small_net());
  const PoseTrack tx = track(1.2, 0.0);
  StreamSession s(net, small_render(256));
  std::size_t values = 0;
  for (int i = 0; i < 200; ++i) {
    s.push(noise_clip(256, 10 + i), tx, tx);
    if (i == 0) values = s.bank().num_values();
    CHECK(s.bank().num_values() == values);
    CHECK(s.bank().size() == 2);
  }
}

TEST_CASE("silence through a zero-output model with no noise is silent") {
  caunet::CausalUNet net(small_net());
  net.params().at("head.conv.w").value.fill(0.0f);
  net.params().at("head.conv.b").value.fill(0.0f);
  RenderConfig cfg = small_render(1024);
  cfg.sigma = 0.0f;
  AudioClip mono;
  mono.channels.assign(1, std::vector<float>(2048, 0.0f));
  const PoseTrack tx = track(0.1, 0.0);
  const AudioClip out = stream(net, mono, tx, tx, cfg);
  CHECK(out.length() == 2048);
  for (const auto& ch : out.channels)
    for (float v : ch) CHECK(v == 0.0f);
}

TEST_CASE("rendering is causal up to the synthesis latency") {
  caunet::CausalUNet net(small_net());
  AudioClip mono = noise_clip(4096, 3);
  const PoseTrack tx = track(0.1, 0.0);
  const RenderConfig cfg = small_render(1024);
  const AudioClip a = render_offline(net, mono, tx, tx, cfg);
  const std::size_t s = 2560;
  for (std::size_t i = s; i < mono.length(); ++i) mono.channels[0][i] += 0.5f;
  const AudioClip b = render_offline(net, mono, tx, tx, cfg);
  CHECK(max_diff(a, b, 0, s - 384) == 0.0f);
  CHECK(max_diff(a, b, s - 384, s) > 0.0f);
}

TEST_CASE("disabling the bank only matches on the first chunk") {
  caunet::CausalUNet net(small_net());
  const AudioClip mono = noise_clip(4096, 4);
  const PoseTrack tx = track(0.1, 0.0);
  RenderConfig cfg = small_render(1024);
  const AudioClip with_bank = stream(net, mono, tx, tx, cfg);
  cfg.buffer_bank = false;
  const AudioClip without = stream(net, mono, tx, tx, cfg);
  CHECK(max_diff(with_bank, without, 0, 1024 - 384) <= 1e-6f);
  CHECK(max_diff(with_bank, without, 1024, 4096) > 1e-4f);
}

TEST_CASE("corrupting a bank entry only affects later output") {
  caunet::CausalUNet net(small_net());
  const AudioClip mono = noise_clip(2048, 5);
  const PoseTrack tx = track(0.1, 0.0);
  AudioClip first_chunk;
  first_chunk.channels.assign(
      1, std::vector<float>(mono.channels[0].begin(), mono.channels[0].begin() + 1024));
  AudioClip second_chunk;
  second_chunk.channels.assign(
      1, std::vector<float>(mono.channels[0].begin() + 1024, mono.channels[0].end()));
  StreamSession a(net, small_render(1024));
  StreamSession b(net, small_render(1024));
  const AudioClip a1 = a.push(first_chunk, tx, tx);
  const AudioClip b1 = b.push(first_chunk, tx, tx);
  for (auto& [name, t] : b.bank().entry(1).layers) t.fill(1.0f);
  const AudioClip a2 = a.push(second_chunk, tx, tx);
  const AudioClip b2 = b.push(second_chunk, tx, tx);
  CHECK(max_diff(a1, b1) == 0.0f);
  CHECK(max_diff(a2, b2) > 0.0f);
}

TEST_CASE("chunk contract violations are input errors") {
  caunet::CausalUNet net(small_net());
  const PoseTrack tx = track(0.2, 0.0);
  StreamSession s(net, small_render(1024));
  CHECK_THROWS_AS(s.push(noise_clip(2048, 1), tx, tx), InputError);
  s.push(noise_clip(500, 1), tx, tx);
  CHECK_THROWS_AS(s.push(noise_clip(1024, 1), tx, tx), InputError);
  AudioClip stereo;
  stereo.channels.assign(2, std::vector<float>(1024, 0.0f));
  StreamSession t(net, small_render(1024));
  CHECK_THROWS_AS(t.push(stereo, tx, tx), InputError);
}

TEST_CASE("poses must cover the audio") {
  caunet::CausalUNet net(small_net());
  const PoseTrack short_track = track(0.01, 0.0);
  StreamSession s(net, small_render(1024));
  CHECK_THROWS_AS(s.push(noise_clip(1024, 1), short_track, short_track),
                  InputError);
  CHECK_THROWS_AS(render_offline(net, noise_clip(4096, 1), short_track,
                                 short_track, small_render(1024)),
                  InputError);
}

TEST_CASE("a non-finite value poisons the session") {
  caunet::CausalUNet net(small_net());
  const PoseTrack tx = track(0.2, 0.0);
  StreamSession s(net, small_render(1024));
  AudioClip bad = noise_clip(1024, 1);
  bad.channels[0][100] = NAN;
  CHECK_THROWS_AS(s.push(bad, tx, tx), NumericError);
  CHECK(s.poisoned());
  CHECK_THROWS_AS(s.push(noise_clip(1024, 2), tx, tx), NumericError);
}

TEST_CASE("offline rendering is deterministic") {
  caunet::CausalUNet net(small_net());
  const AudioClip mono = noise_clip(1500, 6);
  const PoseTrack tx = track(0.1, 0.0);
  const AudioClip a = render_offline(net, mono, tx, tx, small_render(1024));
  const AudioClip b = render_offline(net, mono, tx, tx, small_render(1024));
  CHECK(max_diff(a, b) == 0.0f);
  RenderConfig other = small_render(1024);
  other.seed = 12;
  CHECK(max_diff(a, render_offline(net, mono, tx, tx, other)) > 0.0f);
}

TEST_CASE("independent chunks restart every chunk from scratch") {
  caunet::CausalUNet net(small_net());
  const AudioClip mono = noise_clip(3000, 8);
  const PoseTrack tx = track(0.1, 0.0);
  RenderConfig cfg = small_render(1024);
  const AudioClip got = render_independent(net, mono, tx, tx, cfg);
  REQUIRE(got.num_channels() == 2);
  REQUIRE(got.length() == mono.length());

  // The first chunk is an offline render of its samples alone.
  AudioClip head;
  head.channels.assign(1, std::vector<float>(mono.channels[0].begin(),
                                             mono.channels[0].begin() + 1024));
  RenderConfig first = cfg;
  first.seed = mix_seed(cfg.seed, 0);
  const AudioClip ref = render_offline(net, head, tx, tx, first);
  AudioClip got_head;
  for (int c = 0; c < 2; ++c) {
    got_head.channels.emplace_back(got.channels[c].begin(), got.channels[c].begin() + 1024);
  }
  CHECK(max_diff(got_head, ref) == 0.0f);
  CHECK(max_diff(got, render_streamed(net, mono, tx, tx, cfg), 1024, 3000) > 1e-4f);
}
