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

#ifndef QREADOUT_CONFIG_H
#define QREADOUT_CONFIG_H

#include <cstdint>
#include <filesystem>
#include <istream>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qreadout/distributions.h"

namespace qreadout {

/// Config problems, reported with the offending line when known.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, int line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

struct IniEntry {
  std::string key;
  std::string value;
  int line = 0;
};

struct IniSection {
  std::string name;
  int line = 0;
  std::vector<IniEntry> entries;
};

/// `[section]` headers followed by `key = value` lines. `#` and `;` start
/// comments. Keys may appear once per section.
std::vector<IniSection> parse_ini(std::istream& in);

enum class Subcommand { kChernoff, kErrors, kAdvantage, kSimulate, kCollapse };

std::string to_string(Subcommand cmd);
Subcommand subcommand_from_string(const std::string& name);

struct PairConfig {
  std::string label;
  OutcomePair pair;
  std::optional<double> p_relax;
  std::optional<double> p_excite;
  int line = 0;
};

struct ChernoffSettings {
  double tol = 1e-10;
};

struct ErrorsSettings {
  std::vector<double> n_values;
  std::optional<double> C;
  std::optional<double> alpha;
  std::optional<double> s_star;
  bool upper_bound = false;
};

struct AdvantageSettings {
  bool grid = false;
  double eps_g_min = 1e-4;
  double eps_g_max = 0.3;
  int eps_g_count = 20;
  double eta_min = 1e-4;
  double eta_max = 0.3;
  int eta_count = 20;
};

struct SimulateSettings {
  std::uint64_t m = 1000000;
  std::uint64_t seed = 1;
  std::vector<int> n_values;
  double p_relax = 0.0;
  double p_excite = 0.0;
  int threads = 0;
};

struct CollapseSettings {
  std::uint64_t m = 1000000;
  std::uint64_t seed = 1;
  std::vector<int> n_values;
  std::vector<double> c_over_p = {std::numeric_limits<double>::infinity()};
  double cn_min = 0.5;
  double cn_max = 3.0;
  double rel_tol = 0.15;
  int threads = 0;
};

enum class OutputFormat { kCsv, kJson };

/// Everything one CLI invocation needs.
struct RunConfig {
  Subcommand subcommand = Subcommand::kChernoff;
  std::vector<PairConfig> pairs;
  ChernoffSettings chernoff;
  ErrorsSettings errors;
  AdvantageSettings advantage;
  SimulateSettings simulate;
  CollapseSettings collapse;
  std::optional<std::string> out_path;
  std::optional<OutputFormat> format;
};

/// Builds a RunConfig from parsed sections. Unknown sections or keys are
/// rejected. Relative histogram paths resolve against `base_dir`.
RunConfig build_run_config(Subcommand cmd, const std::vector<IniSection>& sections,
                           const std::filesystem::path& base_dir = {});
RunConfig load_run_config(Subcommand cmd, const std::filesystem::path& path);

/// Two-column CSV (bin_center, count); a non-numeric first row is a header.
Histogram load_histogram_csv(const std::filesystem::path& path);

/// "1..12", "1..11:2", "1, 2, 5" or a mix separated by commas.
std::vector<double> parse_number_list(const std::string& text);

}  // namespace qreadout

#endif  // QREADOUT_CONFIG_H
