// Copyright 2026 The Auralis Authors
// SPDX-License-Identifier: Apache-2.0

// Acceptance gate. Prints one PASS/FAIL line per criterion and exits
// non-zero if any selected criterion fails.
//
//   acceptance [--only 1,2,...] [--work DIR] [--steps N] [--keep]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "auralis/caunet/unet.hpp"
#include "auralis/cfm/flow.hpp"
#include "auralis/cfm/trainer.hpp"
#include "auralis/cli/checkpoint.hpp"
#include "auralis/cli/commands.hpp"
#include "auralis/cli/pipeline.hpp"
#include "auralis/dsp/stft.hpp"
#include "auralis/errors.hpp"
#include "auralis/evalkit/metrics.hpp"
#include "auralis/evalkit/profile.hpp"
#include "auralis/evalkit/report.hpp"
#include "auralis/solvers/solvers.hpp"
#include "auralis/streampipe/session.hpp"
#include "auralis/synthdata/synth.hpp"
#include "../support/gradcheck.hpp"

namespace fs = std::filesystem;
using namespace auralis;
using numkern::Shape4;
using numkern::Tape;
using numkern::Tensor4;
using numkern::Var;
using testing::random_tensor;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  // Records a named check; failing checks are listed first in the detail.
  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "FAILED " << what << "; ";
    }
  }
};

struct Options {
  fs::path work = fs::temp_directory_path() / "auralis-acceptance";
  long long steps = 0;  // 0: toy run default
  bool keep = false;
};

std::string fmt(double v, int prec = 4) {
  std::ostringstream s;
  s.precision(prec);
  s << v;
  return s.str();
}

float max_diff_frames(const Tensor4& a, const Tensor4& b, int f0, int f1) {
  float m = 0.0f;
  for (int n = 0; n < a.n(); ++n)
    for (int c = 0; c < a.c(); ++c)
      for (int h = 0; h < a.h(); ++h)
        for (int f = f0; f < f1; ++f)
          m = std::max(m, std::abs(a.at(n, c, h, f) - b.at(n, c, h, f)));
  return m;
}

void perturb_from(Tensor4& x, int k, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> d(0.0f, 1.0f);
  for (int n = 0; n < x.n(); ++n)
    for (int c = 0; c < x.c(); ++c)
      for (int h = 0; h < x.h(); ++h)
        for (int f = k; f < x.w(); ++f) x.at(n, c, h, f) += d(rng);
}

AudioClip noise_clip(std::size_t n, std::uint64_t seed, float sd = 0.1f) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> d(0.0f, sd);
  AudioClip c;
  c.channels.assign(1, std::vector<float>(n));
  for (float& v : c.channels[0]) v = d(rng);
  return c;
}

PoseTrack moving_track(double duration, double phase) {
  PoseTrack t;
  for (int i = 0; i <= static_cast<int>(duration * kDefaultPoseRate) + 1; ++i) {
    const double s = i / kDefaultPoseRate;
    Pose p;
    p.position = {1.5 + std::cos(s + phase), 2.0 + std::sin(2 * s), 1.2};
    p.rotation = quat_from_yaw(0.3 * s + phase);
    t.push_back(s, p);
  }
  return t;
}

float max_abs_diff(const AudioClip& a, const AudioClip& b) {
  if (a.num_channels() != b.num_channels() || a.length() != b.length()) {
    return INFINITY;
  }
  float m = 0.0f;
  for (int c = 0; c < a.num_channels(); ++c)
    for (std::size_t i = 0; i < a.length(); ++i)
      m = std::max(m, std::abs(a.channels[c][i] - b.channels[c][i]));
  return m;
}

// ---------------------------------------------------------------------------
// 1. Causality of the default network.

Outcome causality() {
  Outcome o;
  caunet::NetConfig cfg = caunet::NetConfig::full();
  cfg.init_seed = 101;
  caunet::CausalUNet net(cfg);
  const int frames = 256;
  const Tensor4 phi = random_tensor({1, 4, cfg.freq_bins, frames}, 1, 1.0f);
  const Tensor4 cond = random_tensor({1, 4, cfg.freq_bins, frames}, 2, 1.0f);
  const Tensor4 poses = random_tensor({1, caunet::kFramePoseDims, 1, frames}, 3, 1.0f);
  const std::vector<float> t{0.37f};
  const Tensor4 y = net.predict(phi, &cond, t, poses);

  for (int k : {1, 17, 128, 255}) {
    Tensor4 p = phi, c = cond, q = poses;
    perturb_from(p, k, 10 + k);
    perturb_from(c, k, 20 + k);
    perturb_from(q, k, 30 + k);
    const Tensor4 y2 = net.predict(p, &c, t, q);
    const float past = max_diff_frames(y, y2, 0, k);
    const float now = max_diff_frames(y, y2, k, k + 1);
    o.check(past == 0.0f, "frames < " + std::to_string(k) + " unchanged");
    o.check(now > 0.0f, "frame " + std::to_string(k) + " responds");
    o.detail << "k=" << k << " past=" << past << " ";
  }

  for (int i : {16, 200}) {
    Tape tape;
    Var leaf = tape.leaf(phi);
    Var out = net.forward(tape, leaf, &cond, t, poses);
    Tensor4 probe(out->value().shape());
    for (int c = 0; c < probe.c(); ++c)
      for (int h = 0; h < probe.h(); ++h) probe.at(0, c, h, i) = 1.0f;
    tape.backward(out, probe);
    const Tensor4& g = leaf->grad();
    float future = 0.0f;
    float here = 0.0f;
    for (int c = 0; c < g.c(); ++c)
      for (int h = 0; h < g.h(); ++h) {
        for (int f = i + 1; f < frames; ++f)
          future = std::max(future, std::abs(g.at(0, c, h, f)));
        here = std::max(here, std::abs(g.at(0, c, h, i)));
      }
    o.check(future == 0.0f, "zero gradient to frames > " + std::to_string(i));
    o.check(here > 0.0f, "nonzero gradient at frame " + std::to_string(i));
    o.detail << "grad i=" << i << " future=" << future << " ";
  }
  return o;
}

// ---------------------------------------------------------------------------
// 2. Streaming equals offline; the buffer bank prevents boundary artifacts.

// Half-wave rectified spectral flux of every output frame, summed over
// channels.
std::vector<double> spectral_flux(const AudioClip& clip) {
  const dsp::StftConfig cfg;
  std::vector<double> flux;
  for (const auto& ch : clip.channels) {
    std::vector<float> x(ch);
    x.resize((x.size() / cfg.hop) * cfg.hop);
    const dsp::Spectrogram s = dsp::stft(x, cfg);
    flux.resize(s.frames(), 0.0);
    for (int f = 1; f < s.frames(); ++f) {
      double acc = 0.0;
      for (int k = 0; k < s.bins(); ++k) {
        acc += std::max(0.0f, std::abs(s.at(0, k, f)) - std::abs(s.at(0, k, f - 1)));
      }
      flux[f] += acc;
    }
  }
  return flux;
}

// Mean over chunk boundaries of the peak flux near each boundary, relative
// to the median flux of the clip.
double boundary_spike(const AudioClip& clip, int chunk_len, int hop) {
  std::vector<double> flux = spectral_flux(clip);
  std::vector<double> sorted(flux.begin() + 1, flux.end());
  std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
  const double median = std::max(sorted[sorted.size() / 2], 1e-12);
  double total = 0.0;
  int count = 0;
  for (int b = chunk_len; b + 8 * hop < static_cast<int>(clip.length()); b += chunk_len) {
    double peak = 0.0;
    for (int f = b / hop - 2; f <= b / hop + 6; ++f) {
      if (f >= 1 && f < static_cast<int>(flux.size())) peak = std::max(peak, flux[f]);
    }
    total += peak / median;
    ++count;
  }
  return count > 0 ? total / count : 0.0;
}

// Sustained harmonic tones with slow amplitude modulation.
AudioClip tonal_clip(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> f0(150.0, 400.0);
  const double base = f0(rng);
  AudioClip c;
  c.channels.assign(1, std::vector<float>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const double s = static_cast<double>(i) / kDefaultSampleRate;
    double v = 0.0;
    for (int h = 1; h <= 4; ++h) v += std::sin(2 * M_PI * base * h * s) / h;
    c.channels[0][i] = static_cast<float>(0.08 * v * (0.8 + 0.2 * std::sin(2 * M_PI * 1.5 * s)));
  }
  return c;
}

Outcome stream_equivalence() {
  Outcome o;
  caunet::NetConfig net_cfg = caunet::NetConfig::toy();
  net_cfg.init_seed = 202;
  caunet::CausalUNet net(net_cfg);
  const int block = dsp::StftConfig{}.hop * net_cfg.resample_factor();

  std::mt19937_64 rng(2024);
  float worst = 0.0f;
  for (int clip = 0; clip < 20; ++clip) {
    const std::size_t len = 4096 + rng() % 16384;
    const AudioClip mono = noise_clip(len, 500 + clip);
    const PoseTrack tx = moving_track(mono.duration_s() + 0.1, 0.1 * clip);
    const PoseTrack rx = moving_track(mono.duration_s() + 0.1, 1.0 + 0.2 * clip);
    streampipe::RenderConfig rc;
    rc.seed = 900 + clip;
    const AudioClip ref = streampipe::render_offline(net, mono, tx, rx, rc);
    for (int k = 0; k < 5; ++k) {
      rc.chunk_len = block * static_cast<int>(1 + rng() % 8);
      const AudioClip got = streampipe::render_streamed(net, mono, tx, rx, rc);
      worst = std::max(worst, max_abs_diff(got, ref));
    }
  }
  o.check(worst <= 1e-5f, "stream vs offline max abs <= 1e-5");
  o.detail << "20 clips x 5 chunkings max|diff|=" << worst << " ";

  // Boundary artifacts: the streaming pipeline against chunks rendered on
  // their own, and against streaming with layer histories reset per chunk.
  const AudioClip mono = tonal_clip(16 * block, 77);
  const PoseTrack tx = moving_track(mono.duration_s() + 0.1, 0.4);
  const PoseTrack rx = moving_track(mono.duration_s() + 0.1, 2.0);
  streampipe::RenderConfig rc;
  rc.seed = 5;
  rc.chunk_len = 2 * block;
  const int hop = dsp::StftConfig{}.hop;
  const double s_on =
      boundary_spike(streampipe::render_streamed(net, mono, tx, rx, rc), rc.chunk_len, hop);
  const double s_ind =
      boundary_spike(streampipe::render_independent(net, mono, tx, rx, rc), rc.chunk_len, hop);
  rc.buffer_bank = false;
  const double s_reset =
      boundary_spike(streampipe::render_streamed(net, mono, tx, rx, rc), rc.chunk_len, hop);
  const double ratio = s_ind / std::max(s_on, 1e-12);
  o.check(ratio >= 5.0, "independent-chunk boundary flux >= 5x streaming");
  o.detail << "boundary flux/median: streaming " << fmt(s_on) << ", independent chunks "
           << fmt(s_ind) << " (x" << fmt(ratio) << "), histories reset " << fmt(s_reset)
           << " (x" << fmt(s_reset / std::max(s_on, 1e-12)) << ")";
  return o;
}

// ---------------------------------------------------------------------------
// 3. STFT stack.

Outcome stft_stack() {
  Outcome o;
  const dsp::StftConfig cfg;
  const AudioClip x = noise_clip(32768, 3, 0.3f);
  const dsp::Spectrogram s = dsp::stft(x, cfg);
  o.check(s.bins() == 257 && s.frames() == 256, "257 bins x 256 frames");
  o.detail << "shape " << s.bins() << "x" << s.frames() << " ";

  const AudioClip y = dsp::istft(s, cfg);
  double e = 0.0, r = 0.0;
  for (std::size_t i = cfg.win_len; i + cfg.overlap() < x.length(); ++i) {
    const double d = y.channels[0][i] - x.channels[0][i];
    e += d * d;
    r += static_cast<double>(x.channels[0][i]) * x.channels[0][i];
  }
  const double rel = std::sqrt(e / r);
  o.check(y.length() == x.length() && rel <= 1e-6, "round trip <= 1e-6 rel rms");
  o.detail << "round trip " << fmt(rel, 3) << " ";

  std::mt19937_64 rng(33);
  float worst_a = 0.0f;
  float worst_s = 0.0f;
  for (int trial = 0; trial < 100; ++trial) {
    dsp::StftStream an(cfg, 1);
    dsp::IstftStream syn(cfg, 1);
    dsp::Spectrogram got;
    std::vector<float> out;
    std::size_t pos = 0;
    while (pos < x.length()) {
      const std::size_t hops = 1 + rng() % 48;
      const std::size_t end = std::min(x.length(), pos + hops * cfg.hop);
      AudioClip chunk;
      chunk.channels.assign(1, std::vector<float>(x.channels[0].begin() + pos,
                                                  x.channels[0].begin() + end));
      const dsp::Spectrogram part = an.push(chunk);
      const AudioClip back = syn.push(part);
      out.insert(out.end(), back.channels[0].begin(), back.channels[0].end());
      got.append_frames(part);
      pos = end;
    }
    const AudioClip tail = syn.flush();
    out.insert(out.end(), tail.channels[0].begin(), tail.channels[0].end());
    for (std::size_t i = 0; i < got.values().size(); ++i)
      worst_a = std::max(worst_a, std::abs(got.values()[i] - s.values()[i]));
    if (out.size() != y.length()) {
      worst_s = INFINITY;
    } else {
      for (std::size_t i = 0; i < out.size(); ++i)
        worst_s = std::max(worst_s, std::abs(out[i] - y.channels[0][i]));
    }
  }
  o.check(worst_a == 0.0f, "streamed frames equal offline");
  o.check(worst_s <= 1e-6f, "streamed synthesis equals offline");
  o.detail << "100 splits: analysis max|diff|=" << worst_a
           << ", synthesis max|diff|=" << worst_s;
  return o;
}

// ---------------------------------------------------------------------------
// 4. Flow matching identities.

Outcome flow_identities() {
  Outcome o;
  const Tensor4 y = random_tensor({1, 4, 9, 7}, 41, 1.0f);
  const Tensor4 z = random_tensor({1, 4, 9, 7}, 42, 1.0f);
  o.check(numkern::max_abs_diff(cfm::flow_interpolate(y, z, 0.0f), z) == 0.0f,
          "phi_0 == z");
  o.check(numkern::max_abs_diff(cfm::flow_interpolate(y, z, 1.0f), y) == 0.0f,
          "phi_1 == y");
  const double oracle_loss = cfm::cfm_loss(cfm::target_field(y, z), y, z).value;
  o.check(oracle_loss == 0.0, "oracle field loss == 0");

  // One million draws of phi_t given x = 0.3, y = 0.9 at sigma 0.5.
  const float xv = 0.3f, yv = 0.9f, sigma = 0.5f;
  const Tensor4 x({1, 4, 250, 1000}, xv);
  const Tensor4 yc({1, 4, 250, 1000}, yv);
  const Tensor4 noisy = cfm::sample_noise(x, cfm::NoiseSpec{sigma, 4242});
  double worst = 0.0;
  for (float t : {0.0f, 0.25f, 0.5f, 0.75f}) {
    const Tensor4 phi = cfm::flow_interpolate(yc, noisy, t);
    double s = 0.0, s2 = 0.0;
    for (float v : phi.values()) {
      s += v;
      s2 += static_cast<double>(v) * v;
    }
    const double n = static_cast<double>(phi.numel());
    const double mean = s / n;
    const double sd = std::sqrt(std::max(0.0, s2 / n - mean * mean));
    const double want_mean = t * yv + (1.0 - t) * xv;
    const double want_sd = (1.0 - t) * sigma;
    const double em = std::abs(mean - want_mean) / std::abs(want_mean);
    const double es = std::abs(sd - want_sd) / want_sd;
    worst = std::max({worst, em, es});
    o.check(em <= 0.02 && es <= 0.02, "moments at t=" + fmt(t));
    o.detail << "t=" << t << " mean " << fmt(mean) << "/" << fmt(want_mean)
             << " sd " << fmt(sd) << "/" << fmt(want_sd) << "; ";
  }
  o.detail << "worst rel " << fmt(worst, 3);
  return o;
}

// ---------------------------------------------------------------------------
// 5. Solver order, constant fields, NFE accounting.

double exp_error(solvers::SolverKind solver, int nfe) {
  const auto s = solvers::make_schedule(solvers::ScheduleKind::kUniform, nfe, solver);
  const auto run = solvers::integrate(
      [](const Tensor4& phi, double, int) { return phi; }, Tensor4({1, 1, 1, 1}, 1.0f), s);
  return std::abs(static_cast<double>(run.phi.values()[0]) - std::exp(1.0));
}

Outcome solver_order() {
  using solvers::ScheduleKind;
  using solvers::SolverKind;
  Outcome o;
  const double mid = std::log2(exp_error(SolverKind::kMidpoint, 16) /
                               exp_error(SolverKind::kMidpoint, 32));
  const double eul = std::log2(exp_error(SolverKind::kEuler, 16) /
                               exp_error(SolverKind::kEuler, 32));
  o.check(mid >= 1.8 && mid <= 2.2, "two-stage order in [1.8, 2.2]");
  o.check(eul >= 0.8 && eul <= 1.2, "euler order in [0.8, 1.2]");
  o.detail << "order two-stage " << fmt(mid) << ", euler " << fmt(eul) << "; ";

  int constant_cases = 0;
  int accounting_cases = 0;
  for (auto kind : {ScheduleKind::kUniform, ScheduleKind::kEarlySkip,
                    ScheduleKind::kLateSkip, ScheduleKind::kSway}) {
    for (auto solver : {SolverKind::kEuler, SolverKind::kMidpoint,
                        SolverKind::kHeun}) {
      for (int nfe : {1, 2, 4, 6, 8, 10}) {
        solvers::Schedule s;
        try {
          s = solvers::make_schedule(kind, nfe, solver, 0.4);
        } catch (const ConfigError&) {
          // Only unrealizable pairs may be refused.
          const bool odd_two_stage =
              solvers::evals_per_step(solver) == 2 && nfe % 2 != 0;
          const bool late_single = kind == ScheduleKind::kLateSkip &&
                                   nfe / solvers::evals_per_step(solver) < 2;
          o.check(odd_two_stage || late_single,
                  "schedule " + solvers::to_string(kind) + "/" +
                      solvers::to_string(solver) + " nfe " + std::to_string(nfe));
          continue;
        }
        std::vector<int> seen;
        const auto run = solvers::integrate(
            [&](const Tensor4& phi, double, int idx) {
              seen.push_back(idx);
              return Tensor4(phi.shape(), -1.5f);
            },
            Tensor4({1, 1, 1, 1}, 2.0f), s);
        const double want = 2.0 - 1.5 * (1.0 - s.grid.front());
        o.check(std::abs(run.phi.values()[0] - want) <= 1e-6,
                "constant field exact");
        bool ordered = static_cast<int>(seen.size()) == nfe &&
                       static_cast<int>(run.evaluations.size()) == nfe;
        for (int i = 0; ordered && i < nfe; ++i) ordered = seen[i] == i;
        o.check(ordered, "nfe accounting " + std::to_string(nfe));
        ++constant_cases;
        ++accounting_cases;
      }
    }
  }
  // Euler must realize every count on the default schedules.
  for (int nfe : {1, 2, 4, 6, 8, 10}) {
    const auto s = solvers::make_schedule(ScheduleKind::kEarlySkip, nfe, SolverKind::kEuler);
    o.check(s.macro_steps() == nfe, "euler early_skip steps");
  }
  o.detail << constant_cases << " constant-field runs exact, " << accounting_cases
           << " nfe counts exact";
  return o;
}

// ---------------------------------------------------------------------------
// 6. End-to-end toy training on synthetic binaural data.

struct ToyRun {
  int clips = 200;
  int clip_len = 32768;
  long long steps = 2000;
  float learning_rate = 1e-3f;
  int batch = 4;
  int crop_len = 8192;
  std::uint64_t seed = 0;
};

Outcome toy_training(const Options& opts) {
  Outcome o;
  ToyRun run;
  if (opts.steps > 0) run.steps = opts.steps;
  const fs::path dir = opts.work / "toy";
  fs::create_directories(dir);

  synthdata::DatasetConfig dc;
  dc.count = run.clips;
  dc.clip_len = run.clip_len;
  dc.seed = run.seed;
  const fs::path data = dir / "data";
  const synthdata::Manifest manifest = synthdata::make_dataset(data, dc, true);

  const dsp::StftConfig stft;
  const auto train = cli::load_examples(data, manifest, "train", stft);

  caunet::NetConfig net_cfg = caunet::NetConfig::toy();
  net_cfg.init_seed = run.seed;
  caunet::CausalUNet model(net_cfg);
  cfm::TrainConfig tc;
  tc.learning_rate = run.learning_rate;
  tc.batch_size = run.batch;
  tc.crop_len = run.crop_len;
  tc.steps = run.steps;
  tc.seed = run.seed;
  cfm::Trainer trainer(model, tc);
  std::vector<double> losses;
  const auto t0 = std::chrono::steady_clock::now();
  cli::run_training(trainer, train, stft.hop, run.steps, [&](long long step, double loss) {
    losses.push_back(loss);
    if ((step + 1) % 250 == 0) {
      const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      std::cerr << "  toy step " << step + 1 << " loss(avg100) "
                << cli::window_mean(losses, losses.size() - std::min<std::size_t>(100, losses.size()), 100)
                << " " << fmt(s, 4) << " s\n";
    }
  });

  evalkit::EvalOptions eo;
  const auto identity = evalkit::evaluate_identity(data, manifest, eo);
  streampipe::RenderConfig rc;
  rc.seed = run.seed;
  const auto report = evalkit::evaluate(data, manifest,
                                        cli::model_renderer(model, rc, true), eo);
  const double wave = report.mean.wave_l2 / identity.mean.wave_l2;
  const double mag = report.mean.mag_l2 / identity.mean.mag_l2;
  const double itd = report.itd_accuracy();
  o.check(wave <= 0.5, "wave_l2 <= 0.5x identity");
  o.check(mag <= 0.6, "mag_l2 <= 0.6x identity");
  o.check(itd >= 0.9, "itd sign >= 90%");
  o.detail << run.steps << " steps, loss " << fmt(cli::window_mean(losses, 0, 100))
           << " -> " << fmt(cli::window_mean(losses, losses.size() - 100, 100))
           << "; wave ratio " << fmt(wave) << ", mag ratio " << fmt(mag)
           << ", itd " << report.itd_sign_matches << "/" << report.directional;
  return o;
}

// ---------------------------------------------------------------------------
// 7. NFE / RTF structure and the evaluation sweep grid.

Outcome nfe_structure(const Options& opts) {
  Outcome o;
  caunet::NetConfig net_cfg = caunet::NetConfig::toy();
  caunet::CausalUNet model(net_cfg);
  streampipe::RenderConfig rc;
  evalkit::ProfileOptions po;
  po.repetitions = 3;
  const auto rtf = evalkit::profile_rtf(model, rc, po);
  const double ratio = rtf.row(6).median_s / rtf.row(1).median_s;
  o.check(rtf.monotone(), "profile monotone");
  o.check(ratio >= 4.2 && ratio <= 7.8, "time(6)/time(1) in [4.2, 7.8]");
  o.detail << "median s";
  for (const auto& r : rtf.rows) o.detail << " nfe" << r.nfe << "=" << fmt(r.median_s, 3);
  o.detail << "; ratio 6/1 " << fmt(ratio) << "; ";

  // Sweep through the command-line evaluator on a one-clip test split.
  const fs::path dir = opts.work / "sweep";
  fs::create_directories(dir);
  std::ostringstream out, err;
  int code = cli::run_cli({"datagen", "--out", (dir / "data").string(), "--count", "10",
                           "--clip-len", "8192", "--force"},
                          out, err);
  o.check(code == 0, "datagen");
  cli::RunConfig cfg;
  cfg.model = net_cfg;
  cli::save_checkpoint(dir / "model.ckpt", cfg, model.params(), nullptr);
  code = cli::run_cli({"eval", "--checkpoint", (dir / "model.ckpt").string(), "--data",
                       (dir / "data").string(), "--out-dir", (dir / "eval").string(),
                       "--nfe", "6,30,60"},
                      out, err);
  o.check(code == 0, "eval sweep");
  std::ifstream summary(dir / "eval" / "summary.csv");
  std::string line;
  std::getline(summary, line);
  std::set<std::string> nfes;
  while (std::getline(summary, line)) {
    std::vector<std::string> cols;
    std::stringstream ss(line);
    std::string c;
    while (std::getline(ss, c, ',')) cols.push_back(c);
    if (cols.size() > 3 && cols[1] != "identity") nfes.insert(cols[2]);
  }
  o.check(nfes == std::set<std::string>{"6", "30", "60"}, "sweep grid {6,30,60}");
  o.detail << "sweep nfe:";
  for (const auto& n : nfes) o.detail << " " << n;
  return o;
}

// ---------------------------------------------------------------------------
// 8. Schedules.

Outcome schedules() {
  using solvers::ScheduleKind;
  using solvers::SolverKind;
  Outcome o;
  const auto es = solvers::make_schedule(ScheduleKind::kEarlySkip, 6, SolverKind::kMidpoint);
  const std::vector<double> want{0.5, 2.0 / 3.0, 5.0 / 6.0, 1.0};
  bool grid_ok = es.grid.size() == want.size();
  for (std::size_t i = 0; grid_ok && i < want.size(); ++i)
    grid_ok = std::abs(es.grid[i] - want[i]) <= 1e-12;
  o.check(grid_ok, "early_skip nfe 6 grid");
  const auto run = solvers::integrate(
      [](const Tensor4& phi, double, int) { return Tensor4(phi.shape(), 1.0f); },
      Tensor4({1, 1, 1, 1}, 0.0f), es);
  o.check(run.evaluations.size() == 6 && run.phi.values()[0] == 0.5f,
          "early_skip completes");
  o.detail << "early_skip grid";
  for (double g : es.grid) o.detail << " " << fmt(g);
  o.detail << "; ";

  int grids = 0;
  for (auto solver : {SolverKind::kEuler, SolverKind::kMidpoint, SolverKind::kHeun}) {
    for (int nfe : {2, 4, 6, 8, 10}) {
      const auto uni = solvers::make_schedule(ScheduleKind::kUniform, nfe, solver);
      const auto sw0 = solvers::make_schedule(ScheduleKind::kSway, nfe, solver, 0.0);
      o.check(uni.grid == sw0.grid, "sway(0) == uniform");
      for (double s : {-1.0, -0.4, 0.0, 0.4, 1.0}) {
        const auto g = solvers::make_schedule(ScheduleKind::kSway, nfe, solver, s).grid;
        bool mono = g.front() == 0.0 && g.back() == 1.0;
        for (std::size_t i = 1; mono && i < g.size(); ++i) mono = g[i] > g[i - 1];
        o.check(mono, "sway monotone s=" + fmt(s));
        ++grids;
      }
      for (auto kind : {ScheduleKind::kUniform, ScheduleKind::kEarlySkip,
                        ScheduleKind::kLateSkip}) {
        const auto g = solvers::make_schedule(kind, nfe, solver).grid;
        bool mono = true;
        for (std::size_t i = 1; mono && i < g.size(); ++i) mono = g[i] > g[i - 1];
        o.check(mono, "monotone " + solvers::to_string(kind));
        ++grids;
      }
    }
  }
  o.detail << grids << " grids monotone, sway(0) == uniform";
  return o;
}

// ---------------------------------------------------------------------------
// 9. Finite-difference gradient checks on randomized shapes.

Outcome gradients() {
  Outcome o;
  const double tol = 1e-3;
  std::mt19937_64 rng(909);
  auto dim = [&](int lo, int hi) { return lo + static_cast<int>(rng() % (hi - lo + 1)); };
  double worst = 0.0;
  int checks = 0;
  auto record = [&](const std::string& name, const testing::GradCheck& r) {
    worst = std::max(worst, r.rel_error);
    ++checks;
    if (r.rel_error >= tol) o.check(false, name + " rel " + fmt(r.rel_error, 3));
  };

  for (int trial = 0; trial < 4; ++trial) {
    const std::uint64_t s = 100 * trial;
    const int n = dim(1, 2), ci = dim(1, 4), co = dim(1, 4), h = dim(3, 7), w = dim(3, 7);
    const int kh = dim(1, 3), kw = dim(1, 3), sh = dim(1, 2), sw = dim(1, 2);
    const numkern::Padding pad{dim(0, 2), dim(0, 1), dim(0, 2), dim(0, 1)};
    record("conv2d", testing::grad_check(
                         [&](Tape& t, const std::vector<Var>& v) {
                           return numkern::conv2d(t, v[0], v[1], v[2], {sh, sw}, pad);
                         },
                         {random_tensor({n, ci, h, w}, s + 1), random_tensor({co, ci, kh, kw}, s + 2),
                          random_tensor({1, 1, 1, co}, s + 3)},
                         s + 4));
    const int tk = dim(2, 4), ts = dim(1, 2);
    record("conv2d_transposed",
           testing::grad_check(
               [&](Tape& t, const std::vector<Var>& v) {
                 return numkern::conv2d_transposed(t, v[0], v[1], v[2], {ts, ts});
               },
               {random_tensor({n, ci, dim(2, 4), dim(2, 4)}, s + 5),
                random_tensor({ci, co, tk, tk}, s + 6), random_tensor({1, 1, 1, co}, s + 7)},
               s + 8));
    const int groups = dim(1, 3), gc = groups * dim(1, 3);
    record("frame_group_norm",
           testing::grad_check(
               [&](Tape& t, const std::vector<Var>& v) {
                 return numkern::frame_group_norm(t, v[0], v[1], v[2], groups, 1e-5f);
               },
               {random_tensor({n, gc, h, w}, s + 9), random_tensor({1, 1, 1, gc}, s + 10),
                random_tensor({1, 1, 1, gc}, s + 11)},
               s + 12));
    record("silu", testing::grad_check(
                       [](Tape& t, const std::vector<Var>& v) { return numkern::silu(t, v[0]); },
                       {random_tensor({n, ci, h, w}, s + 13, 2.0f)}, s + 14));
    const Tensor4 hist = random_tensor({n, ci + co, h, dim(1, 3)}, s + 15);
    const int fp = dim(1, 3), tp = dim(1, 3);
    record("structural ops",
           testing::grad_check(
               [&](Tape& t, const std::vector<Var>& v) {
                 Var a = numkern::add_broadcast(t, v[0], v[1]);
                 a = numkern::add_broadcast(t, a, v[2]);
                 a = numkern::concat_channels(t, a, v[3]);
                 a = numkern::prepend_time(t, hist, a);
                 a = numkern::pad_freq(t, a, fp);
                 a = numkern::pad_time(t, a, tp);
                 a = numkern::crop(t, a, 1, h + fp - 2, 1, w + tp);
                 return numkern::add(t, a, a);
               },
               {random_tensor({n, ci, h, w}, s + 16), random_tensor({n, ci, 1, 1}, s + 17),
                random_tensor({n, ci, 1, w}, s + 18), random_tensor({n, co, h, w}, s + 19)},
               s + 20));
  }

  // The loss gradient and a whole small network.
  {
    const Tensor4 y = random_tensor({2, 4, 5, 6}, 71);
    const Tensor4 z = random_tensor({2, 4, 5, 6}, 72);
    Tensor4 pred = random_tensor({2, 4, 5, 6}, 73);
    const cfm::Loss l = cfm::cfm_loss(pred, y, z);
    double diff2 = 0.0, ref2 = 0.0;
    const float eps = 1e-3f;
    for (std::size_t i = 0; i < pred.numel(); ++i) {
      const float orig = pred.values()[i];
      pred.values()[i] = orig + eps;
      const double lp = cfm::cfm_loss(pred, y, z).value;
      pred.values()[i] = orig - eps;
      const double lm = cfm::cfm_loss(pred, y, z).value;
      pred.values()[i] = orig;
      const double num = (lp - lm) / (2.0 * eps);
      diff2 += (num - l.grad.values()[i]) * (num - l.grad.values()[i]);
      ref2 += num * num;
    }
    testing::GradCheck r;
    r.rel_error = std::sqrt(diff2 / ref2);
    record("cfm_loss", r);
  }
  {
    caunet::NetConfig c = caunet::NetConfig::toy();
    c.base_channels = 4;
    c.multipliers = {1, 2};
    c.num_resample = 1;
    c.embed_dim = 8;
    c.fourier_rows = 4;
    c.norm_groups = 2;
    c.freq_bins = 6;
    c.init_seed = 12;
    caunet::CausalUNet net(c);
    const Tensor4 cond = random_tensor({1, 4, 6, 4}, 81);
    const Tensor4 poses = random_tensor({1, caunet::kFramePoseDims, 1, 4}, 82);
    const std::vector<float> t{0.6f};
    record("network", testing::grad_check(
                          [&](Tape& tape, const std::vector<Var>& v) {
                            return net.forward(tape, v[0], &cond, t, poses);
                          },
                          {random_tensor({1, 4, 6, 4}, 83)}, 84, 1e-2));
  }
  o.detail << checks << " checks, worst relative error " << fmt(worst, 3);
  return o;
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"auralis acceptance gate"};
  std::vector<int> only;
  Options opts;
  std::string work = opts.work.string();
  app.add_option("--only", only, "criteria to run (default: all)")->delimiter(',');
  app.add_option("--work", work, "scratch directory");
  app.add_option("--steps", opts.steps, "override toy training steps");
  app.add_flag("--keep", opts.keep, "keep the scratch directory");
  CLI11_PARSE(app, argc, argv);
  opts.work = work;

  const std::vector<Criterion> all{
      {1, "causality", causality},
      {2, "stream equals offline", stream_equivalence},
      {3, "stft stack", stft_stack},
      {4, "flow identities", flow_identities},
      {5, "solver order", solver_order},
      {6, "toy training", [&] { return toy_training(opts); }},
      {7, "nfe/rtf structure", [&] { return nfe_structure(opts); }},
      {8, "schedules", schedules},
      {9, "gradients", gradients},
  };

  fs::create_directories(opts.work);
  int failed = 0;
  for (const auto& c : all) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.check(false, std::string("exception: ") + e.what());
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %d %s [%s] %s (%.1f s)\n", c.id, o.pass ? "PASS" : "FAIL",
                c.name, o.detail.str().c_str(), s);
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  if (!opts.keep) fs::remove_all(opts.work);
  return failed == 0 ? 0 : 1;
}
