// Copyright 2026 The Auralis Authors
// SPDX-License-Identifier: Apache-2.0

#include "auralis/io/wav.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "auralis/errors.hpp"

namespace auralis::io {
namespace {

static_assert(std::endian::native == std::endian::little,
              "WAV I/O assumes a little-endian host");

constexpr std::uint16_t kPcm = 1;
constexpr std::uint16_t kFloat = 3;
constexpr std::uint16_t kExtensible = 0xFFFE;

template <typename T>
T read_le(const unsigned char* p) {
  T v;
  std::memcpy(&v, p, sizeof v);
  return v;
}

template <typename T>
void put_le(std::vector<unsigned char>& out, T v) {
  unsigned char b[sizeof v];
  std::memcpy(b, &v, sizeof v);
  out.insert(out.end(), b, b + sizeof v);
}

}  // namespace

AudioClip read_wav(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot open " + path.string());
  const std::vector<unsigned char> buf((std::istreambuf_iterator<char>(f)),
                                       std::istreambuf_iterator<char>());
  const std::string where = path.string() + ": ";
  if (buf.size() < 12 || std::memcmp(buf.data(), "RIFF", 4) != 0 ||
      std::memcmp(buf.data() + 8, "WAVE", 4) != 0) {
    throw InputError(where + "not a RIFF/WAVE file");
  }
  std::uint16_t format = 0;
  std::uint16_t channels = 0;
  std::uint32_t rate = 0;
  std::uint16_t bits = 0;
  const unsigned char* data = nullptr;
  std::size_t data_len = 0;
  std::size_t pos = 12;
  while (pos + 8 <= buf.size()) {
    const unsigned char* chunk = buf.data() + pos;
    const auto len = read_le<std::uint32_t>(chunk + 4);
    if (pos + 8 + len > buf.size()) throw InputError(where + "truncated chunk");
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (len < 16) throw InputError(where + "short fmt chunk");
      format = read_le<std::uint16_t>(chunk + 8);
      channels = read_le<std::uint16_t>(chunk + 10);
      rate = read_le<std::uint32_t>(chunk + 12);
      bits = read_le<std::uint16_t>(chunk + 22);
      if (format == kExtensible) {
        if (len < 26) throw InputError(where + "short extensible fmt chunk");
        format = read_le<std::uint16_t>(chunk + 32);
      }
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = chunk + 8;
      data_len = len;
    }
    pos += 8 + len + (len & 1u);
  }
  if (channels == 0 || rate == 0) throw InputError(where + "missing fmt chunk");
  if (data == nullptr) throw InputError(where + "missing data chunk");
  const bool pcm = format == kPcm && (bits == 16 || bits == 24 || bits == 32);
  const bool flt = format == kFloat && bits == 32;
  if (!pcm && !flt) {
    throw InputError(where + "unsupported sample format " +
                     std::to_string(format) + "/" + std::to_string(bits) +
                     " bits");
  }
  const std::size_t width = bits / 8;
  const std::size_t frames = data_len / (width * channels);
  AudioClip clip;
  clip.sample_rate = static_cast<int>(rate);
  clip.channels.assign(channels, std::vector<float>(frames));
  for (std::size_t i = 0; i < frames; ++i) {
    for (std::size_t c = 0; c < channels; ++c) {
      const unsigned char* s = data + (i * channels + c) * width;
      float v = 0.0f;
      if (flt) {
        v = read_le<float>(s);
      } else if (bits == 16) {
        v = static_cast<float>(read_le<std::int16_t>(s)) / 32768.0f;
      } else if (bits == 24) {
        const std::int32_t raw =
            static_cast<std::int32_t>(static_cast<std::uint32_t>(s[0]) << 8 |
                                      static_cast<std::uint32_t>(s[1]) << 16 |
                                      static_cast<std::uint32_t>(s[2]) << 24) >>
            8;
        v = static_cast<float>(raw) / 8388608.0f;
      } else {
        v = static_cast<float>(static_cast<double>(read_le<std::int32_t>(s)) /
                               2147483648.0);
      }
      clip.channels[c][i] = v;
    }
  }
  return clip;
}

void write_wav(const std::filesystem::path& path, const AudioClip& clip) {
  if (clip.channels.empty()) throw InputError("cannot write a clip without channels");
  const auto channels = static_cast<std::uint16_t>(clip.num_channels());
  const std::size_t frames = clip.length();
  for (const auto& ch : clip.channels) {
    if (ch.size() != frames) throw InputError("channel lengths differ");
  }
  const auto data_len = static_cast<std::uint32_t>(frames * channels * 4);
  std::vector<unsigned char> out;
  out.reserve(44 + data_len);
  out.insert(out.end(), {'R', 'I', 'F', 'F'});
  put_le<std::uint32_t>(out, 36 + data_len);
  out.insert(out.end(), {'W', 'A', 'V', 'E', 'f', 'm', 't', ' '});
  put_le<std::uint32_t>(out, 16);
  put_le<std::uint16_t>(out, kFloat);
  put_le<std::uint16_t>(out, channels);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(clip.sample_rate));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(clip.sample_rate) * channels * 4);
  put_le<std::uint16_t>(out, static_cast<std::uint16_t>(channels * 4));
  put_le<std::uint16_t>(out, 32);
  out.insert(out.end(), {'d', 'a', 't', 'a'});
  put_le<std::uint32_t>(out, data_len);
  for (std::size_t i = 0; i < frames; ++i) {
    for (const auto& ch : clip.channels) put_le<float>(out, ch[i]);
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw InputError("cannot write " + path.string());
  f.write(reinterpret_cast<const char*>(out.data()),
          static_cast<std::streamsize>(out.size()));
  if (!f) throw InputError("write failed for " + path.string());
}

}  // namespace auralis::io
