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

#ifndef QREADOUT_ERROR_MODEL_H
#define QREADOUT_ERROR_MODEL_H

#include <optional>
#include <string>
#include <vector>

#include "qreadout/chernoff.h"
#include "qreadout/distributions.h"

namespace qreadout {

enum class CurveMethod { kGaussianAnsatz, kSaddlePoint, kChernoffUpperBound, kMonteCarlo };

std::string to_string(CurveMethod method);
CurveMethod curve_method_from_string(const std::string& name);

/// Cumulative error rates tabulated over repetition counts. N may be real
/// for smooth overlays.
struct ErrorCurve {
  CurveMethod method = CurveMethod::kGaussianAnsatz;
  std::vector<double> n_values;
  std::vector<double> e_avg;
  std::vector<double> e_plus;
  std::vector<double> e_minus;
  /// Per-point standard errors; empty for analytic curves.
  std::vector<double> uncertainties;
  /// Points where alpha C N < 0.1 and the Chernoff upper bound was used.
  std::vector<bool> fallback;
};

/// e_N = e+,N = e-,N = erfc(sqrt(C N)) / 2.
ErrorCurve gaussian_ansatz(double C, const std::vector<double>& n_values);

/// Leading saddle-point corrections using alpha and s*. Points with
/// alpha C N < 0.1 fall back to exp(-C N) / 2 and are flagged.
ErrorCurve saddle_point(const ChernoffSummary& summary, const std::vector<double>& n_values);

/// e_N = exp(-C N) / 2 for both preparations.
ErrorCurve chernoff_upper_bound(double C, const std::vector<double>& n_values);

struct BinaryChernoff {
  double C_b = 0.0;
  double s_star = 0.5;
  /// Inputs had eps+ + eps- > 1 and were relabelled.
  bool reflected = false;
};

/// Closed-form Chernoff information of hard-decoded outcomes with
/// conditional flip probabilities eps+ and eps-. Throws std::domain_error
/// when either probability is exactly 0 or 1.
BinaryChernoff binary_chernoff(double eps_plus, double eps_minus);

struct AdvantageReport {
  double C = 0.0;
  /// +infinity when both hard-decoding errors vanish.
  double C_b = 0.0;
  /// C / C_b: the factor by which hard decoding multiplies the number of
  /// repetitions needed for a target error. NaN when C_b is infinite.
  double advantage = 0.0;
  double eps_plus = 0.0;
  double eps_minus = 0.0;
  double s_star_b = 0.5;
  bool binary_perfect = false;
};

AdvantageReport advantage(const OutcomePair& pair);

/// Chernoff information of Gaussian noise with conversion errors, from the
/// one-dimensional integral over the standard normal.
double conversion_chernoff(double r, double eta);

/// r such that erfc(sqrt(r / 2)) / 2 = eps_g, by bisection.
double snr_from_gaussian_error(double eps_g);

/// erfc(sqrt(r / 2)) / 2.
double gaussian_error(double r);

struct AdvantageCell {
  double eps_g = 0.0;
  double eta = 0.0;
  double r = 0.0;
  double C = 0.0;
  double C_b = 0.0;
  double advantage = 0.0;
};

/// Advantage over an (eps_G, eta) grid, row-major with eps_G outermost.
/// Cells are evaluated in parallel; the output order is fixed by index.
std::vector<AdvantageCell> advantage_grid(const std::vector<double>& eps_g_values,
                                          const std::vector<double>& eta_values, int threads = 0);

/// Serial reference for advantage_grid.
std::vector<AdvantageCell> advantage_grid_serial(const std::vector<double>& eps_g_values,
                                                 const std::vector<double>& eta_values);

/// count values spaced evenly in log between lo and hi inclusive.
std::vector<double> log_spaced(double lo, double hi, int count);

}  // namespace qreadout

#endif  // QREADOUT_ERROR_MODEL_H
