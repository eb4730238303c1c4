// Copyright 2026 The Auralis Authors
// SPDX-License-Identifier: Apache-2.0

#include "auralis/cli/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "auralis/errors.hpp"

namespace auralis::cli {

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

namespace {

constexpr char kMagic[8] = {'A', 'U', 'R', 'A', 'L', 'C', 'K', 'P'};

class Writer {
 public:
  explicit Writer(std::ofstream& out) : out_(out) {}
  template <typename T>
  void pod(T v) {
    out_.write(reinterpret_cast<const char*>(&v), sizeof v);
  }
  void bytes(const void* p, std::size_t n) {
    out_.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
  }
  void array(const std::string& name, std::uint8_t kind, bool trainable,
             const numkern::Tensor4& t) {
    pod(static_cast<std::uint32_t>(name.size()));
    bytes(name.data(), name.size());
    pod(kind);
    pod(static_cast<std::uint8_t>(trainable ? 1 : 0));
    const auto& s = t.shape();
    for (int d : {s.n, s.c, s.h, s.w}) pod(static_cast<std::int32_t>(d));
    bytes(t.data(), t.numel() * sizeof(float));
  }

 private:
  std::ofstream& out_;
};

class Reader {
 public:
  Reader(std::ifstream& in, std::string path) : in_(in), path_(std::move(path)) {}
  template <typename T>
  T pod() {
    T v{};
    bytes(&v, sizeof v);
    return v;
  }
  void bytes(void* p, std::size_t n) {
    in_.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n) {
      throw InputError(path_ + ": checkpoint is truncated");
    }
  }
  std::string string(std::size_t n, std::size_t limit) {
    if (n > limit) throw InputError(path_ + ": corrupt checkpoint record");
    std::string s(n, '\0');
    bytes(s.data(), n);
    return s;
  }

 private:
  std::ifstream& in_;
  std::string path_;
};

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const RunConfig& cfg,
                     const numkern::ParamStore& params, const cfm::Adam* adam,
                     const nlohmann::json& meta) {
  nlohmann::json header = {{"config", to_json(cfg)},
                           {"optimizer", adam != nullptr},
                           {"optimizer_steps", adam != nullptr ? adam->steps() : 0},
                           {"meta", meta}};
  const std::string text = header.dump();
  std::uint32_t count = static_cast<std::uint32_t>(params.size());
  if (adam != nullptr) count += 2 * static_cast<std::uint32_t>(adam->moments().size());

  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw InputError("cannot write " + tmp.string());
    Writer w(f);
    w.bytes(kMagic, sizeof kMagic);
    w.pod(kCheckpointVersion);
    w.pod(static_cast<std::uint64_t>(text.size()));
    w.bytes(text.data(), text.size());
    w.pod(count);
    for (const auto& [name, p] : params) w.array(name, 0, p.trainable, p.value);
    if (adam != nullptr) {
      for (const auto& [name, m] : adam->moments()) {
        w.array(name, 1, true, m.m);
        w.array(name, 2, true, m.v);
      }
    }
    f.flush();
    if (!f) throw InputError("failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot open checkpoint " + path.string());
  Reader r(f, path.string());
  char magic[8];
  r.bytes(magic, sizeof magic);
  if (std::memcmp(magic, kMagic, sizeof magic) != 0) {
    throw InputError(path.string() + " is not a checkpoint");
  }
  const auto version = r.pod<std::uint32_t>();
  if (version != kCheckpointVersion) {
    throw InputError(path.string() + ": checkpoint format version " +
                     std::to_string(version) + " is not supported (expected " +
                     std::to_string(kCheckpointVersion) + ")");
  }
  const auto header_len = r.pod<std::uint64_t>();
  const std::string text = r.string(header_len, 1u << 26);
  Checkpoint ck;
  try {
    const auto header = nlohmann::json::parse(text);
    ck.config = run_config_from_json(header.at("config"));
    ck.has_optimizer = header.at("optimizer").get<bool>();
    ck.optimizer_steps = header.at("optimizer_steps").get<long long>();
    ck.meta = header.at("meta");
  } catch (const nlohmann::json::exception& e) {
    throw InputError(path.string() + ": bad checkpoint header: " + e.what());
  }
  const auto count = r.pod<std::uint32_t>();
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::string name = r.string(r.pod<std::uint32_t>(), 4096);
    const auto kind = r.pod<std::uint8_t>();
    const auto trainable = r.pod<std::uint8_t>();
    std::int32_t dims[4];
    for (auto& d : dims) {
      d = r.pod<std::int32_t>();
      if (d < 1 || d > (1 << 24)) throw InputError(path.string() + ": bad array shape");
    }
    numkern::Tensor4 t({dims[0], dims[1], dims[2], dims[3]});
    r.bytes(t.data(), t.numel() * sizeof(float));
    if (kind == 0) {
      if (ck.params.contains(name)) throw InputError(path.string() + ": duplicate " + name);
      ck.params.add(name, std::move(t), trainable != 0);
    } else if (kind == 1) {
      ck.moments[name].m = std::move(t);
    } else if (kind == 2) {
      ck.moments[name].v = std::move(t);
    } else {
      throw InputError(path.string() + ": unknown array kind");
    }
  }
  if (f.peek() != std::ifstream::traits_type::eof()) {
    throw InputError(path.string() + ": trailing bytes after the last array");
  }
  return ck;
}

void require_same_model(const RunConfig& ckpt, const caunet::NetConfig& requested) {
  if (caunet::to_json(ckpt.model) != caunet::to_json(requested)) {
    throw ConfigError("checkpoint holds a '" + ckpt.model.preset +
                      "' network that differs from the configured '" +
                      requested.preset + "' network");
  }
}

}  // namespace auralis::cli
