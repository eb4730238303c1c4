// Copyright 2026 The Auralis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace auralis {

// Bad user data: malformed audio, short pose tracks, wrong chunk sizes.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Inconsistent shapes, configs or checkpoints.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-finite values or divergence detected while running.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// API called out of order (e.g. backward before any forward).
class UsageError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace auralis
