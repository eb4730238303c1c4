// Copyright 2026 The Auralis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "auralis/caunet/unet.hpp"
#include "auralis/cfm/trainer.hpp"
#include "auralis/evalkit/report.hpp"
#include "auralis/streampipe/session.hpp"
#include "auralis/synthdata/synth.hpp"

namespace auralis::cli {

// Reads every clip of `split` and converts it to a training example.
std::vector<cfm::Example> load_examples(const std::filesystem::path& dataset_dir,
                                        const synthdata::Manifest& manifest,
                                        const std::string& split,
                                        const dsp::StftConfig& stft);

// Mean of losses[begin, begin + count), clamped to the available range.
double window_mean(std::span<const double> losses, std::size_t begin,
                   std::size_t count);

// Steps the trainer until it has taken `total_steps` steps, drawing the batch
// for each step from its index. `on_step` sees (step index, loss).
void run_training(cfm::Trainer& trainer, std::span<const cfm::Example> data,
                  int hop, long long total_steps,
                  const std::function<void(long long, double)>& on_step = {});

// Renders clips with the model, streamed in chunks or in one offline pass.
evalkit::Renderer model_renderer(caunet::CausalUNet& model,
                                 const streampipe::RenderConfig& cfg, bool stream);

// FNV-1a over the manifest and every file it lists, in manifest order.
std::uint64_t dataset_checksum(const std::filesystem::path& dataset_dir,
                               const synthdata::Manifest& manifest);

}  // namespace auralis::cli
