// Copyright 2026 The Auralis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>

#include "auralis/audio.hpp"

namespace auralis::io {

// Reads RIFF/WAVE with PCM 16/24/32-bit or IEEE float32 samples (format 1, 3
// or WAVE_FORMAT_EXTENSIBLE wrapping either). Throws InputError on anything
// else or on truncated data.
AudioClip read_wav(const std::filesystem::path& path);

// Writes IEEE float32, the canonical interchange format.
void write_wav(const std::filesystem::path& path, const AudioClip& clip);

}  // namespace auralis::io
