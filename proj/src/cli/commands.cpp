// Copyright 2026 The Auralis Authors
// SPDX-License-Identifier: Apache-2.0

#include "auralis/cli/commands.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>

#include "auralis/cli/checkpoint.hpp"
#include "auralis/cli/pipeline.hpp"
#include "auralis/cli/run_config.hpp"
#include "auralis/errors.hpp"
#include "auralis/evalkit/profile.hpp"
#include "auralis/io/pose_csv.hpp"
#include "auralis/io/wav.hpp"

namespace auralis::cli {
namespace {

namespace fs = std::filesystem;

std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

// Solver flags shared by render, eval and profile.
struct SolverFlags {
  std::optional<int> nfe;
  std::optional<std::string> kind;
  std::optional<std::string> schedule;
  std::optional<double> sway;
  std::optional<std::uint64_t> seed;

  void add(CLI::App* app, bool with_nfe = true) {
    if (with_nfe) app->add_option("--nfe", nfe, "Function evaluations");
    app->add_option("--solver", kind, "euler | midpoint | heun");
    app->add_option("--schedule", schedule, "uniform | early_skip | late_skip | sway");
    app->add_option("--sway", sway, "Sway coefficient in [-1, 1]");
    app->add_option("--seed", seed, "Noise seed");
  }
  void apply(RunConfig& cfg) const {
    if (nfe) cfg.solver.nfe = *nfe;
    if (kind) cfg.solver.kind = *kind;
    if (schedule) cfg.solver.schedule = *schedule;
    if (sway) cfg.solver.sway_coefficient = *sway;
    if (seed) cfg.solver.seed = *seed;
  }
};

RunConfig config_or_default(const std::string& path) {
  return path.empty() ? run_config_from_json(nlohmann::json::object())
                      : load_run_config(path);
}

// The checkpoint's config, checked against --config when one is given.
RunConfig checkpoint_config(const Checkpoint& ck, const std::string& config_path) {
  if (config_path.empty()) return ck.config;
  RunConfig cfg = load_run_config(config_path);
  require_same_model(ck.config, cfg.model);
  return cfg;
}

// ---------------------------------------------------------------------------

struct DatagenArgs {
  std::string config;
  std::string out;
  int count = 100;
  std::uint64_t seed = 0;
  int clip_len = 32768;
  bool force = false;
};

int cmd_datagen(const DatagenArgs& a, std::ostream& out) {
  const RunConfig cfg = config_or_default(a.config);
  synthdata::DatasetConfig d;
  d.count = a.count;
  d.seed = a.seed;
  d.clip_len = a.clip_len;
  const fs::path dir = a.out.empty() ? fs::path(cfg.io.dataset_dir) : fs::path(a.out);
  const auto m = synthdata::make_dataset(dir, d, a.force);
  out << "wrote " << m.clips.size() << " clips to " << dir.string() << " (";
  for (const auto& [split, n] : d.split_counts()) out << split << ' ' << n << (split == "test" ? "" : ", ");
  out << ")\nchecksum " << hex64(dataset_checksum(dir, m)) << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct TrainArgs {
  std::string config;
  std::string data;
  std::string out;
  std::string resume;
  std::string log;
  std::optional<long long> steps;
  std::optional<std::uint64_t> seed;
  std::optional<float> lr;
  bool quiet = false;
};

int cmd_train(const TrainArgs& a, std::ostream& out) {
  std::optional<Checkpoint> ck;
  RunConfig cfg;
  if (!a.resume.empty()) {
    ck = load_checkpoint(a.resume);
    cfg = checkpoint_config(*ck, a.config);
  } else {
    cfg = config_or_default(a.config);
  }
  if (a.steps) cfg.train.steps = *a.steps;
  if (a.seed) cfg.train.seed = *a.seed;
  if (a.lr) cfg.train.lr = *a.lr;
  cfg.validate();

  const fs::path data = a.data.empty() ? fs::path(cfg.io.dataset_dir) : fs::path(a.data);
  const fs::path ckpt = a.out.empty() ? fs::path(cfg.io.checkpoint) : fs::path(a.out);
  const auto manifest = synthdata::read_manifest(data / "manifest.json");
  const auto examples = load_examples(data, manifest, "train", cfg.stft);

  caunet::CausalUNet model = ck ? caunet::CausalUNet(cfg.model, ck->params)
                                : caunet::CausalUNet(cfg.model);
  cfm::Trainer trainer(model, cfg.train_config());
  if (ck && ck->has_optimizer) trainer.optimizer().restore(ck->optimizer_steps, ck->moments);
  const long long start = trainer.steps_taken();
  if (start > cfg.train.steps) {
    throw ConfigError("checkpoint is already past train.steps (" +
                      std::to_string(start) + " > " +
                      std::to_string(cfg.train.steps) + ")");
  }

  fs::path log_path = a.log.empty() ? fs::path(ckpt.string() + ".loss.csv") : fs::path(a.log);
  std::ofstream log(log_path, start > 0 ? std::ios::app : std::ios::trunc);
  if (!log) throw InputError("cannot write " + log_path.string());
  if (start == 0) log << "step,loss\n";
  log << std::setprecision(9);

  out << "training " << cfg.model.preset << " model ("
      << model.params().num_values(true) << " parameters) on "
      << examples.size() << " clips, steps " << start << ".." << cfg.train.steps
      << '\n';
  std::vector<double> losses;
  const auto t0 = std::chrono::steady_clock::now();
  run_training(trainer, examples, cfg.stft.hop, cfg.train.steps,
               [&](long long step, double loss) {
                 losses.push_back(loss);
                 log << step << ',' << loss << '\n';
                 const long long done = step + 1;
                 if (!a.quiet && (done % cfg.train.log_every == 0 || done == cfg.train.steps)) {
                   const auto n = static_cast<std::size_t>(cfg.train.log_every);
                   const std::size_t from = losses.size() > n ? losses.size() - n : 0;
                   const double secs = std::chrono::duration<double>(
                       std::chrono::steady_clock::now() - t0).count();
                   out << "step " << done << "  loss " << std::fixed << std::setprecision(4)
                       << window_mean(losses, from, n) << "  " << std::setprecision(1)
                       << secs << " s" << std::defaultfloat << std::setprecision(6) << std::endl;
                 }
                 if (cfg.train.checkpoint_every > 0 && done % cfg.train.checkpoint_every == 0 &&
                     done != cfg.train.steps) {
                   save_checkpoint(ckpt, cfg, model.params(), &trainer.optimizer());
                 }
               });
  nlohmann::json meta = {{"steps", trainer.steps_taken()}};
  const auto w = static_cast<std::size_t>(cfg.train.average_window);
  if (start == 0 && losses.size() >= 2 * w) {
    const double first = window_mean(losses, 0, w);
    const double last = window_mean(losses, losses.size() - w, w);
    meta["initial_average"] = first;
    meta["final_average"] = last;
    out << "moving average loss " << first << " -> " << last << " (ratio "
        << last / first << ")\n";
  }
  save_checkpoint(ckpt, cfg, model.params(), &trainer.optimizer(), meta);
  out << "saved " << ckpt.string() << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct RenderArgs {
  std::string config;
  std::string checkpoint;
  std::string mono;
  std::string poses;
  std::string out;
  bool offline = false;
  std::optional<int> chunk;
  SolverFlags solver;
};

int cmd_render(const RenderArgs& a, std::ostream& out) {
  const Checkpoint ck = load_checkpoint(a.checkpoint);
  RunConfig cfg = checkpoint_config(ck, a.config);
  a.solver.apply(cfg);
  if (a.chunk) cfg.io.chunk_len = *a.chunk;
  cfg.validate();
  caunet::CausalUNet model(cfg.model, ck.params);
  const AudioClip mono = io::read_wav(a.mono);
  if (mono.num_channels() != 1) throw InputError(a.mono + " is not mono");
  const io::PosePair poses = io::read_pose_csv(a.poses);
  const auto rc = cfg.render_config();
  const auto t0 = std::chrono::steady_clock::now();
  const AudioClip bin = a.offline
      ? streampipe::render_offline(model, mono, poses.tx, poses.rx, rc)
      : streampipe::render_streamed(model, mono, poses.tx, poses.rx, rc);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  io::write_wav(a.out, bin);
  out << "rendered " << bin.length() << " samples (" << (a.offline ? "offline" : "stream")
      << ", nfe " << rc.schedule.nfe << ") in " << secs << " s, rtf "
      << secs / mono.duration_s() << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct EvalArgs {
  std::string config;
  std::string checkpoint;
  std::string data;
  std::string split = "test";
  std::string out_dir;
  std::string pred;
  std::string ref;
  std::vector<int> nfe;
  bool stream = false;
  int max_clips = -1;
  SolverFlags solver;
};

int cmd_eval(const EvalArgs& a, std::ostream& out) {
  if (!a.pred.empty() || !a.ref.empty()) {
    if (a.pred.empty() || a.ref.empty()) throw ConfigError("--pred and --ref go together");
    const RunConfig cfg = config_or_default(a.config);
    const auto m = evalkit::compute_metrics(io::read_wav(a.pred), io::read_wav(a.ref), cfg.stft);
    out << std::setprecision(9) << "wave_l2 " << m.wave_l2 << "\nmag_l2 " << m.mag_l2
        << "\nphase_err " << m.phase_err << '\n';
    return kExitOk;
  }
  std::optional<Checkpoint> ck;
  RunConfig cfg;
  if (!a.checkpoint.empty()) {
    ck = load_checkpoint(a.checkpoint);
    cfg = checkpoint_config(*ck, a.config);
  } else {
    cfg = config_or_default(a.config);
  }
  a.solver.apply(cfg);
  cfg.validate();
  const fs::path data = a.data.empty() ? fs::path(cfg.io.dataset_dir) : fs::path(a.data);
  const fs::path out_dir = a.out_dir.empty() ? fs::path(cfg.io.out_dir) : fs::path(a.out_dir);
  fs::create_directories(out_dir);
  const auto manifest = synthdata::read_manifest(data / "manifest.json");
  evalkit::EvalOptions opts;
  opts.split = a.split;
  opts.stft = cfg.stft;
  opts.max_clips = a.max_clips;

  std::vector<evalkit::MetricReport> reports;
  auto emit = [&](evalkit::MetricReport r, const std::string& stem) {
    std::ofstream f(out_dir / (stem + ".csv"));
    if (!f) throw InputError("cannot write to " + out_dir.string());
    r.write_csv(f);
    out << r.text() << '\n';
    reports.push_back(std::move(r));
  };
  emit(evalkit::evaluate_identity(data, manifest, opts), "eval_identity");
  if (ck) {
    caunet::CausalUNet model(cfg.model, ck->params);
    const std::vector<int> nfes = a.nfe.empty() ? std::vector<int>{cfg.solver.nfe} : a.nfe;
    for (int n : nfes) {
      RunConfig c = cfg;
      c.solver.nfe = n;
      const auto rc = c.render_config();
      auto r = evalkit::evaluate(data, manifest, model_renderer(model, rc, a.stream), opts);
      r.set("model", cfg.model.preset);
      r.set("nfe", std::to_string(n));
      r.set("solver", c.solver.kind);
      r.set("schedule", c.solver.schedule);
      r.set("sway_coefficient", std::to_string(c.solver.sway_coefficient));
      r.set("seed", std::to_string(c.solver.seed));
      r.set("mode", a.stream ? "stream" : "offline");
      emit(std::move(r), "eval_nfe" + std::to_string(n));
    }
  }
  std::ofstream summary(out_dir / "summary.csv");
  evalkit::write_summary_csv(summary, reports);
  evalkit::write_summary_csv(out, reports);
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct ProfileArgs {
  std::string config;
  std::string checkpoint;
  std::string preset;
  std::string out;
  std::vector<int> nfe{1, 2, 4, 6, 8, 10};
  int clip_len = 32768;
  int reps = 5;
  int warmup = 1;
  SolverFlags solver;
};

int cmd_profile(const ProfileArgs& a, std::ostream& out) {
  std::optional<Checkpoint> ck;
  RunConfig cfg;
  if (!a.checkpoint.empty()) {
    ck = load_checkpoint(a.checkpoint);
    cfg = checkpoint_config(*ck, a.config);
  } else {
    cfg = config_or_default(a.config);
    if (!a.preset.empty()) {
      cfg = run_config_from_json({{"model", {{"preset", a.preset}}}});
    }
  }
  a.solver.apply(cfg);
  cfg.validate();
  caunet::CausalUNet model = ck ? caunet::CausalUNet(cfg.model, ck->params)
                                : caunet::CausalUNet(cfg.model);
  evalkit::ProfileOptions opts;
  opts.nfe = a.nfe;
  opts.clip_len = a.clip_len;
  opts.repetitions = a.reps;
  opts.warmup = a.warmup;
  const auto report = evalkit::profile_rtf(model, cfg.render_config(), opts);
  out << report.text();
  if (!a.out.empty()) {
    std::ofstream f(a.out);
    if (!f) throw InputError("cannot write " + a.out);
    report.write_csv(f);
  }
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Streaming binaural rendering with conditional flow matching", "auralis"};
  app.require_subcommand(1);

  DatagenArgs dg;
  auto* datagen = app.add_subcommand("datagen", "Generate a synthetic paired dataset");
  datagen->add_option("--config", dg.config, "Run config (JSON)");
  datagen->add_option("--out", dg.out, "Dataset directory");
  datagen->add_option("--count", dg.count, "Number of clips");
  datagen->add_option("--seed", dg.seed, "Dataset seed");
  datagen->add_option("--clip-len", dg.clip_len, "Samples per clip");
  datagen->add_flag("--force", dg.force, "Overwrite an existing dataset");

  TrainArgs tr;
  auto* train = app.add_subcommand("train", "Train a model on a dataset's train split");
  train->add_option("--config", tr.config, "Run config (JSON)");
  train->add_option("--data", tr.data, "Dataset directory");
  train->add_option("--out", tr.out, "Checkpoint to write");
  train->add_option("--resume", tr.resume, "Checkpoint to continue from");
  train->add_option("--log", tr.log, "Loss log CSV");
  train->add_option("--steps", tr.steps, "Total optimizer steps");
  train->add_option("--seed", tr.seed, "Training seed");
  train->add_option("--lr", tr.lr, "Learning rate");
  train->add_flag("--quiet", tr.quiet, "No progress lines");

  RenderArgs rd;
  auto* render = app.add_subcommand("render", "Render a mono recording to binaural");
  render->add_option("--config", rd.config, "Run config (JSON)");
  render->add_option("--checkpoint", rd.checkpoint, "Model checkpoint")->required();
  render->add_option("--mono", rd.mono, "Mono WAV")->required();
  render->add_option("--poses", rd.poses, "Pose CSV")->required();
  render->add_option("--out", rd.out, "Binaural WAV to write")->required();
  auto* offline = render->add_flag("--offline", rd.offline, "Single offline pass");
  render->add_flag("--stream", "Chunked streaming (default)")->excludes(offline);
  render->add_option("--chunk", rd.chunk, "Samples per streamed chunk");
  rd.solver.add(render);

  EvalArgs ev;
  auto* eval = app.add_subcommand("eval", "Score renders against references");
  eval->add_option("--config", ev.config, "Run config (JSON)");
  eval->add_option("--checkpoint", ev.checkpoint, "Model checkpoint; identity only if absent");
  eval->add_option("--data", ev.data, "Dataset directory");
  eval->add_option("--split", ev.split, "Dataset split");
  eval->add_option("--out-dir", ev.out_dir, "Report directory");
  eval->add_option("--pred", ev.pred, "Predicted WAV (pair mode)");
  eval->add_option("--ref", ev.ref, "Reference WAV (pair mode)");
  eval->add_option("--nfe", ev.nfe, "NFE values, comma separated")->delimiter(',');
  eval->add_flag("--stream", ev.stream, "Render in streaming chunks");
  eval->add_option("--max-clips", ev.max_clips, "Clip limit");
  ev.solver.add(eval, false);

  ProfileArgs pf;
  auto* profile = app.add_subcommand("profile", "Time rendering against NFE");
  profile->add_option("--config", pf.config, "Run config (JSON)");
  profile->add_option("--checkpoint", pf.checkpoint, "Model checkpoint");
  profile->add_option("--preset", pf.preset, "Random-weight model preset");
  profile->add_option("--out", pf.out, "Report CSV");
  profile->add_option("--nfe", pf.nfe, "NFE values, comma separated")->delimiter(',');
  profile->add_option("--clip-len", pf.clip_len, "Samples per profiled clip");
  profile->add_option("--reps", pf.reps, "Timed repetitions");
  profile->add_option("--warmup", pf.warmup, "Discarded warmup runs");
  pf.solver.add(profile, false);

  std::vector<std::string> argv_store{"auralis"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : argv_store) argv.push_back(s.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    if (*datagen) return cmd_datagen(dg, out);
    if (*train) return cmd_train(tr, out);
    if (*render) return cmd_render(rd, out);
    if (*eval) return cmd_eval(ev, out);
    if (*profile) return cmd_profile(pf, out);
  } catch (const InputError& e) {
    err << "input error: " << e.what() << '\n';
    return kExitInput;
  } catch (const fs::filesystem_error& e) {
    err << "input error: " << e.what() << '\n';
    return kExitInput;
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << '\n';
    return kExitRuntime;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitConfig;
}

}  // namespace auralis::cli
