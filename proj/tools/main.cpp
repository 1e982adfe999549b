// Copyright 2026 The mfavis Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "cli/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return mfavis::cli::run_cli(args, std::cout, std::cerr);
}
