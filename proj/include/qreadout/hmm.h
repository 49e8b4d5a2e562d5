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

#ifndef QREADOUT_HMM_H
#define QREADOUT_HMM_H

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qreadout/chernoff.h"
#include "qreadout/distributions.h"
#include "qreadout/random.h"

namespace qreadout {

/// Raised when the forward recurrence meets an outcome with zero
/// likelihood under both eigenvalues.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two-state hidden Markov model of repeated readout with classical
/// transitions between repetitions.
struct HmmSpec {
  OutcomePair pair;
  /// Probability per repetition of +1 -> -1.
  double p_relax = 0.0;
  /// Probability per repetition of -1 -> +1.
  double p_excite = 0.0;
  int n_max = 1;

  void validate() const;
  /// P(a_{k+1} = to | a_k = from).
  double transition(Eigenvalue from, Eigenvalue to) const;
  /// True when p_relax >= min(C, 1), i.e. outside the single-shot regime.
  bool outside_single_shot_regime(double C) const;
};

struct Trajectory {
  std::vector<Eigenvalue> states;
  std::vector<Outcome> outcomes;
};

/// Draws O_k from P_{a_k}, then a_{k+1} from the transition row, for
/// k = 0 .. n_max - 1. One uniform is consumed per transition.
Trajectory sample_path(const HmmSpec& spec, Eigenvalue a0, Rng& rng);
std::vector<Outcome> sample_trajectory(const HmmSpec& spec, Eigenvalue a0, Rng& rng);

/// Normalised forward recurrence for ln P_{a0}(O_1..O_k). Emission
/// densities are rescaled by their maximum before use, so arbitrary
/// continuous densities neither overflow nor underflow.
class ForwardFilter {
 public:
  ForwardFilter(const HmmSpec& spec, Eigenvalue a0);

  /// Advances with the emission log-densities ln P+(O_k), ln P-(O_k).
  void step(double log_plus, double log_minus);
  void step(Outcome o) {
    step(spec_->pair.log_density(Eigenvalue::kPlus, o), spec_->pair.log_density(Eigenvalue::kMinus, o));
  }

  double log_likelihood() const { return log_likelihood_; }
  /// Normalised occupations of (+1, -1) for the next repetition.
  const std::array<double, 2>& occupation() const { return occupation_; }
  int steps() const { return steps_; }

 private:
  const HmmSpec* spec_;
  std::array<double, 2> occupation_;
  double log_likelihood_ = 0.0;
  int steps_ = 0;
};

double forward_loglik(const HmmSpec& spec, std::span<const Outcome> outcomes, Eigenvalue a0);

struct Decision {
  Eigenvalue assignment = Eigenvalue::kPlus;
  /// l_N = ln P_{+1}(O) - ln P_{-1}(O).
  double l_n = 0.0;
  /// l_N was exactly zero and the assignment came from a coin flip.
  bool tie = false;
};

/// Assigns the initial eigenvalue by the sign of l_N; ties use `tie_rng`.
Decision decode(const HmmSpec& spec, std::span<const Outcome> outcomes, Rng& tie_rng);

/// Monte Carlo estimate at one repetition count.
struct McPoint {
  int n = 0;
  std::uint64_t errors_plus = 0;
  std::uint64_t errors_minus = 0;
  double e_plus = 0.0;
  double e_minus = 0.0;
  double e_avg = 0.0;
  double delta_plus = 0.0;
  double delta_minus = 0.0;
  double delta_avg = 0.0;
  /// One-sided 95% upper bound 3/m, reported when no errors were seen.
  double bound_plus = 0.0;
  double bound_minus = 0.0;
};

struct McEstimate {
  std::uint64_t m = 0;
  std::uint64_t seed = 0;
  std::vector<McPoint> points;
};

/// Estimates e+,N and e-,N from m trajectories per initial eigenvalue.
/// Trajectory i of preparation a0 uses the substream (seed, a0, i), so the
/// result does not depend on the thread count. threads <= 0 uses the
/// OpenMP default.
McEstimate monte_carlo(const HmmSpec& spec, std::uint64_t m, const std::vector<int>& n_values, std::uint64_t seed,
                       int threads = 0);

/// Single-threaded reference for monte_carlo; bit-identical output.
McEstimate monte_carlo_serial(const HmmSpec& spec, std::uint64_t m, const std::vector<int>& n_values,
                              std::uint64_t seed);

/// Builds an McEstimate from raw error counts.
McPoint make_point(int n, std::uint64_t errors_plus, std::uint64_t errors_minus, std::uint64_t m);

struct CollapseInput {
  std::string label;
  HmmSpec spec;
  ChernoffSummary summary;
};

struct CollapseRow {
  std::string label;
  double C = 0.0;
  /// C / p; +infinity for QND readout.
  double c_over_p = 0.0;
  int n = 0;
  double cn = 0.0;
  double ln_e = 0.0;
  /// delta_e / e, the standard error of ln e.
  double delta_ln_e = 0.0;
};

struct CollapseComparison {
  std::string first;
  std::string second;
  double cn = 0.0;
  double deviation = 0.0;
  double allowed = 0.0;
};

struct CollapseResult {
  std::vector<CollapseRow> rows;
  std::vector<CollapseComparison> comparisons;
  double max_deviation = 0.0;
  /// Largest deviation / allowed ratio.
  double worst_ratio = 0.0;
  bool collapsed = true;
};

/// Runs each spec, tabulates (CN, C/p, ln e_N), and compares every pair of
/// curves sharing C/p (within 1%) at matched CN in [cn_min, cn_max]. Curves
/// are matched by linear interpolation of ln e in CN. A comparison passes
/// when |delta ln e| <= max(rel_tol |ln e|, 3 combined standard errors).
CollapseResult universality_collapse(const std::vector<CollapseInput>& inputs, std::uint64_t m,
                                     const std::vector<int>& n_values, std::uint64_t seed, double cn_min,
                                     double cn_max, double rel_tol = 0.15, int threads = 0);

}  // namespace qreadout

#endif  // QREADOUT_HMM_H
