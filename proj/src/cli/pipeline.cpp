// Copyright 2026 The Auralis Authors
// SPDX-License-Identifier: Apache-2.0

#include "auralis/cli/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>

#include "auralis/errors.hpp"
#include "auralis/io/pose_csv.hpp"
#include "auralis/io/wav.hpp"

namespace auralis::cli {

std::vector<cfm::Example> load_examples(const std::filesystem::path& dataset_dir,
                                        const synthdata::Manifest& manifest,
                                        const std::string& split,
                                        const dsp::StftConfig& stft) {
  std::vector<cfm::Example> out;
  for (const auto& rec : manifest.split(split)) {
    const AudioClip mono = io::read_wav(dataset_dir / rec.mono);
    const AudioClip bin = io::read_wav(dataset_dir / rec.binaural);
    const io::PosePair poses = io::read_pose_csv(dataset_dir / rec.poses);
    out.push_back(cfm::make_example(mono, bin, poses.tx, poses.rx, stft));
  }
  if (out.empty()) throw InputError("dataset has no '" + split + "' clips");
  return out;
}

double window_mean(std::span<const double> losses, std::size_t begin,
                   std::size_t count) {
  if (begin >= losses.size()) return 0.0;
  const std::size_t end = std::min(losses.size(), begin + count);
  double s = 0.0;
  for (std::size_t i = begin; i < end; ++i) s += losses[i];
  return s / static_cast<double>(end - begin);
}

void run_training(cfm::Trainer& trainer, std::span<const cfm::Example> data,
                  int hop, long long total_steps,
                  const std::function<void(long long, double)>& on_step) {
  while (trainer.steps_taken() < total_steps) {
    const long long step = trainer.steps_taken();
    const cfm::Batch batch = cfm::sample_batch(data, trainer.config(), hop, step);
    const double loss = trainer.step(batch);
    if (on_step) on_step(step, loss);
  }
}

evalkit::Renderer model_renderer(caunet::CausalUNet& model,
                                 const streampipe::RenderConfig& cfg, bool stream) {
  return [&model, cfg, stream](const synthdata::ClipRecord&, const AudioClip& mono,
                               const io::PosePair& poses) {
    return stream ? streampipe::render_streamed(model, mono, poses.tx, poses.rx, cfg)
                  : streampipe::render_offline(model, mono, poses.tx, poses.rx, cfg);
  };
}

std::uint64_t dataset_checksum(const std::filesystem::path& dataset_dir,
                               const synthdata::Manifest& manifest) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&h](const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    if (!f) throw InputError("cannot read " + p.string());
    for (std::istreambuf_iterator<char> it(f), end; it != end; ++it) {
      h ^= static_cast<unsigned char>(*it);
      h *= 0x100000001b3ULL;
    }
  };
  feed(dataset_dir / "manifest.json");
  for (const auto& c : manifest.clips) {
    feed(dataset_dir / c.mono);
    feed(dataset_dir / c.binaural);
    feed(dataset_dir / c.poses);
  }
  return h;
}

}  // namespace auralis::cli
