// Copyright 2026 The qreadout Authors
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

#ifndef QREADOUT_CLI_H
#define QREADOUT_CLI_H

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

#include "qreadout/config.h"

namespace qreadout {

/// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitNumeric = 2;

/// Command-line flags that override config values.
struct CliOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> m;
  std::optional<int> threads;
  std::optional<double> tol;
  std::optional<std::string> out;
  std::optional<OutputFormat> format;
};

void apply_overrides(RunConfig& config, const CliOverrides& overrides);

// Each runner writes its result to `out` and warnings to `diag`. Manifests
// of CSV runs go next to --out as <out>.manifest.json, or to `diag` when
// writing to standard output.
int run_chernoff(const RunConfig& config, std::ostream& out, std::ostream& diag);
int run_errors(const RunConfig& config, std::ostream& out, std::ostream& diag);
int run_advantage(const RunConfig& config, std::ostream& out, std::ostream& diag);
int run_simulate(const RunConfig& config, std::ostream& out, std::ostream& diag);
int run_collapse(const RunConfig& config, std::ostream& out, std::ostream& diag);

/// Dispatches on config.subcommand and maps exceptions to exit codes.
int run(const RunConfig& config, std::ostream& out, std::ostream& diag);

/// Full command line handling: parse, load config, run, write --out.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& diag);

}  // namespace qreadout

#endif  // QREADOUT_CLI_H
