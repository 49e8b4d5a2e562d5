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

#ifndef QREADOUT_CHERNOFF_H
#define QREADOUT_CHERNOFF_H

#include <limits>
#include <vector>

#include "qreadout/distributions.h"
#include "qreadout/quadrature.h"

namespace qreadout {

/// K-(s) = ln of the integral of P+^s P-^(1-s). By the reflection
/// identity this also gives K+(-s') at s' = 1 - s.
struct CgfEvaluation {
  double s = 0.0;
  double k_minus = 0.0;
  double rel_error = 0.0;
};

/// Universal descriptors of a readout. alpha is NaN when undefined
/// (degenerate pair or optimum on the boundary of [0, 1]).
struct ChernoffSummary {
  double C = 0.0;
  double s_star = 0.5;
  double alpha = std::numeric_limits<double>::quiet_NaN();
  /// Second cumulant of lambda under the effective distribution, K-''(s*).
  double k2 = 0.0;
  double bhattacharyya = 0.0;
  /// Width of the final bracket on s*.
  double s_tolerance = 0.0;
  /// Worst relative quadrature error of the final evaluation.
  double quadrature_error = 0.0;
  /// C below 1e-12: the two distributions are indistinguishable.
  bool degenerate = false;
  /// The infimum sits at s = 0 or s = 1.
  bool boundary_optimum = false;
};

CgfEvaluation cgf(const OutcomePair& pair, double s, const QuadratureOptions& opts = {});

/// Minimises K-(s) over [0, 1] and evaluates the cumulants at the optimum.
ChernoffSummary chernoff_information(const OutcomePair& pair, double tol = 1e-10);

/// P_eff(O) proportional to P+(O)^s P-(O)^(1-s).
class TiltedDensity {
 public:
  TiltedDensity(OutcomePair pair, double s, double log_normalizer)
      : pair_(std::move(pair)), s_(s), log_normalizer_(log_normalizer) {}

  double s() const { return s_; }
  /// K-(s); the log of the normalising integral.
  double log_normalizer() const { return log_normalizer_; }
  double log_density(Outcome o) const;
  /// Expectation of lambda under this density. Zero at the saddle point.
  double mean_lambda() const;
  const OutcomePair& pair() const { return pair_; }

 private:
  OutcomePair pair_;
  double s_;
  double log_normalizer_;
};

TiltedDensity effective_distribution(const OutcomePair& pair, double s_star);

/// Central cumulants {k2, k3, k4} (up to max_order in {2, 3, 4}) of lambda
/// under the effective distribution, computed from direct moment integrals.
std::vector<double> cumulants_under_eff(const OutcomePair& pair, double s_star, int max_order);

/// Leading-order expansion in the relative difference
/// y = (P+ - P-) / Pbar, Pbar = (P+ + P-) / 2.
struct SmallCExpansion {
  double C = 0.0;
  double alpha = 1.0;
  double s_star = 0.5;
  double y2 = 0.0;
  double y3 = 0.0;
  double y4 = 0.0;
  /// Set when the expanded C exceeds 0.1.
  bool unreliable = false;
};

SmallCExpansion small_c_expansion(const OutcomePair& pair);

}  // namespace qreadout

#endif  // QREADOUT_CHERNOFF_H
