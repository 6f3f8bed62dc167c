// Copyright 2026 The dpattn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// dpattn <command> --config <path> [--out <dir>]

#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "dpattn/cli.h"

int main(int argc, char** argv) {
  CLI::App app{"Differentially private attention via Gaussian sampling"};
  app.require_subcommand(1);
  std::string config_path;
  std::string out_dir = ".";
  for (const std::string_view name : dpattn::cli::kCommands) {
    CLI::App* sub = app.add_subcommand(std::string(name));
    sub->add_option("--config", config_path, "JSON config file")->required();
    sub->add_option("--out", out_dir, "Output directory (default: .)");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : dpattn::cli::kExitInputError;
  }
  const std::string command = app.get_subcommands().front()->get_name();
  return dpattn::cli::RunCommand(command, config_path, out_dir, std::cerr);
}
