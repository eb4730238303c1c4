// Copyright 2026 The Auralis Authors
// SPDX-License-Identifier: Apache-2.0

#include "auralis/cli/run_config.hpp"

#include <fstream>

#include "auralis/errors.hpp"

namespace auralis::cli {
namespace {

using nlohmann::json;

void require_object(const json& j, const std::string& section) {
  if (!j.is_object()) throw ConfigError(section + " must be an object");
}

[[noreturn]] void unknown(const std::string& section, const std::string& key) {
  throw ConfigError(section + ": unknown key '" + key + "'");
}

void read_stft(const json& j, dsp::StftConfig& s) {
  require_object(j, "stft");
  for (const auto& [k, v] : j.items()) {
    if (k == "win") s.win_len = v.get<int>();
    else if (k == "hop") s.hop = v.get<int>();
    else unknown("stft", k);
  }
}

void read_flow(const json& j, FlowSection& f) {
  require_object(j, "flow");
  for (const auto& [k, v] : j.items()) {
    if (k == "sigma") f.sigma = v.get<float>();
    else if (k == "simplified_fm") f.simplified_fm = v.get<bool>();
    else unknown("flow", k);
  }
}

void read_solver(const json& j, SolverSection& s) {
  require_object(j, "solver");
  for (const auto& [k, v] : j.items()) {
    if (k == "kind") s.kind = v.get<std::string>();
    else if (k == "nfe") s.nfe = v.get<int>();
    else if (k == "schedule") s.schedule = v.get<std::string>();
    else if (k == "sway_coefficient") s.sway_coefficient = v.get<double>();
    else if (k == "seed") s.seed = v.get<std::uint64_t>();
    else unknown("solver", k);
  }
}

void read_train(const json& j, TrainSection& t) {
  require_object(j, "train");
  for (const auto& [k, v] : j.items()) {
    if (k == "lr") t.lr = v.get<float>();
    else if (k == "wd") t.wd = v.get<float>();
    else if (k == "batch") t.batch = v.get<int>();
    else if (k == "steps") t.steps = v.get<long long>();
    else if (k == "seed") t.seed = v.get<std::uint64_t>();
    else if (k == "crop_len") t.crop_len = v.get<int>();
    else if (k == "log_every") t.log_every = v.get<int>();
    else if (k == "average_window") t.average_window = v.get<int>();
    else if (k == "checkpoint_every") t.checkpoint_every = v.get<long long>();
    else unknown("train", k);
  }
}

void read_io(const json& j, IoSection& io) {
  require_object(j, "io");
  for (const auto& [k, v] : j.items()) {
    if (k == "dataset_dir") io.dataset_dir = v.get<std::string>();
    else if (k == "checkpoint") io.checkpoint = v.get<std::string>();
    else if (k == "out_dir") io.out_dir = v.get<std::string>();
    else if (k == "chunk_len") io.chunk_len = v.get<int>();
    else unknown("io", k);
  }
}

}  // namespace

void RunConfig::validate() const {
  stft.validate();
  model.validate();
  if (model.freq_bins != stft.bins()) {
    throw ConfigError("model.freq_bins (" + std::to_string(model.freq_bins) +
                      ") must equal the stft bin count (" +
                      std::to_string(stft.bins()) + ")");
  }
  const cfm::TrainConfig tc = train_config();
  tc.validate(stft.hop);
  if (model.in_channels != model.out_channels + tc.condition_channels()) {
    throw ConfigError("model.in_channels must be " +
                      std::to_string(model.out_channels + tc.condition_channels()) +
                      (flow.simplified_fm ? " with simplified_fm" : ""));
  }
  if (train.log_every < 1 || train.average_window < 1 || train.checkpoint_every < 0) {
    throw ConfigError("train.log_every and train.average_window must be >= 1");
  }
  render_config().validate(model);
}

solvers::Schedule RunConfig::schedule() const {
  return solvers::make_schedule(solvers::parse_schedule(solver.schedule), solver.nfe,
                                solvers::parse_solver(solver.kind),
                                solver.sway_coefficient);
}

cfm::TrainConfig RunConfig::train_config() const {
  cfm::TrainConfig t;
  t.learning_rate = train.lr;
  t.weight_decay = train.wd;
  t.batch_size = train.batch;
  t.steps = train.steps;
  t.crop_len = train.crop_len;
  t.seed = train.seed;
  t.sigma = flow.sigma;
  t.simplified_fm = flow.simplified_fm;
  return t;
}

streampipe::RenderConfig RunConfig::render_config() const {
  streampipe::RenderConfig r;
  r.stft = stft;
  r.schedule = schedule();
  r.sigma = train_config().effective_sigma();
  r.seed = solver.seed;
  r.chunk_len = io.chunk_len;
  return r;
}

json to_json(const RunConfig& c) {
  return {{"stft", {{"win", c.stft.win_len}, {"hop", c.stft.hop}}},
          {"model", caunet::to_json(c.model)},
          {"flow", {{"sigma", c.flow.sigma}, {"simplified_fm", c.flow.simplified_fm}}},
          {"solver",
           {{"kind", c.solver.kind},
            {"nfe", c.solver.nfe},
            {"schedule", c.solver.schedule},
            {"sway_coefficient", c.solver.sway_coefficient},
            {"seed", c.solver.seed}}},
          {"train",
           {{"lr", c.train.lr},
            {"wd", c.train.wd},
            {"batch", c.train.batch},
            {"steps", c.train.steps},
            {"seed", c.train.seed},
            {"crop_len", c.train.crop_len},
            {"log_every", c.train.log_every},
            {"average_window", c.train.average_window},
            {"checkpoint_every", c.train.checkpoint_every}}},
          {"io",
           {{"dataset_dir", c.io.dataset_dir},
            {"checkpoint", c.io.checkpoint},
            {"out_dir", c.io.out_dir},
            {"chunk_len", c.io.chunk_len}}}};
}

RunConfig run_config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  RunConfig c;
  try {
    for (const auto& [k, v] : j.items()) {
      if (k == "stft") read_stft(v, c.stft);
      else if (k == "flow") read_flow(v, c.flow);
      else if (k == "solver") read_solver(v, c.solver);
      else if (k == "train") read_train(v, c.train);
      else if (k == "io") read_io(v, c.io);
      else if (k != "model") unknown("config", k);
    }
    if (j.contains("model")) {
      const json& m = j.at("model");
      c.model = caunet::net_config_from_json(m);
      // Conveniences for keys left unset.
      if (!m.contains("freq_bins")) c.model.freq_bins = c.stft.bins();
      if (!m.contains("in_channels")) {
        c.model.in_channels = c.model.out_channels + c.train_config().condition_channels();
      }
    } else {
      c.model.freq_bins = c.stft.bins();
      c.model.in_channels = c.model.out_channels + c.train_config().condition_channels();
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw InputError("cannot open config " + path.string());
  json j;
  try {
    f >> j;
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return run_config_from_json(j);
}

}  // namespace auralis::cli
