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

#ifndef QREADOUT_REPORT_H
#define QREADOUT_REPORT_H

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qreadout/chernoff.h"
#include "qreadout/error_model.h"
#include "qreadout/hmm.h"

namespace qreadout {

using Json = nlohmann::ordered_json;

/// Rounds to 12 significant digits.
double round12(double x);
/// "%.12g", with inf / -inf / nan spelled out.
std::string format12(double x);

/// Finite values are rounded to 12 digits, NaN becomes null and infinities
/// the strings "inf" / "-inf".
Json json_number(double x);
double number_from_json(const Json& j);

Json to_json(const ChernoffSummary& s);
ChernoffSummary chernoff_summary_from_json(const Json& j);

Json to_json(const ErrorCurve& c);
ErrorCurve error_curve_from_json(const Json& j);

Json to_json(const AdvantageReport& r);
AdvantageReport advantage_report_from_json(const Json& j);

Json to_json(const std::vector<AdvantageCell>& grid);
std::vector<AdvantageCell> advantage_grid_from_json(const Json& j);

Json to_json(const McEstimate& e);
McEstimate mc_estimate_from_json(const Json& j);

Json to_json(const CollapseResult& r);
CollapseResult collapse_result_from_json(const Json& j);

struct RunManifest {
  std::string subcommand;
  std::uint64_t seed = 0;
  std::uint64_t m = 0;
  int threads = 0;
  std::vector<std::string> spec_hashes;
  double wall_time_s = 0.0;
};

Json to_json(const RunManifest& m);

/// FNV-1a over the pair description, flip rates and horizon, as 16 hex digits.
std::string spec_hash(const HmmSpec& spec);

// CSV layouts. Headers are part of the interface:
//   chernoff:  C,s_star,alpha,k2,bhattacharyya,s_tolerance,quadrature_error,degenerate
//   errors:    N,gaussian_ansatz,saddle_point,saddle_plus,saddle_minus,fallback[,chernoff_bound]
//   advantage: C,C_b,advantage,eps_plus,eps_minus,s_star_b
//   grid:      eps_g,eta,r,C,C_b,advantage
//   simulate:  a0,N,e,delta_e
//   collapse:  label,C,c_over_p,N,CN,ln_e,delta_ln_e
void write_chernoff_csv(std::ostream& out, const ChernoffSummary& s);
void write_errors_csv(std::ostream& out, const ErrorCurve& ansatz, const ErrorCurve& saddle,
                      const ErrorCurve* upper_bound);
void write_advantage_csv(std::ostream& out, const AdvantageReport& r);
void write_grid_csv(std::ostream& out, const std::vector<AdvantageCell>& grid);
void write_simulate_csv(std::ostream& out, const McEstimate& e);
void write_collapse_csv(std::ostream& out, const CollapseResult& r);

}  // namespace qreadout

#endif  // QREADOUT_REPORT_H
