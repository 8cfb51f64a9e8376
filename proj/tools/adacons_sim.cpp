// Copyright 2026 The adacons-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>
#include <string>
#include <vector>

#include "adacons/cli.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  return adacons::cli::run_cli(args, std::cout, std::cerr);
}
