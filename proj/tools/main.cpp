// Copyright 2026 The Auralis Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "auralis/cli/commands.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return auralis::cli::run_cli(args, std::cout, std::cerr);
}
