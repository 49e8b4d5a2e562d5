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

#ifndef QREADOUT_DISTRIBUTIONS_H
#define QREADOUT_DISTRIBUTIONS_H

#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qreadout/random.h"

namespace qreadout {

enum class Support { kContinuous, kDiscreteInteger, kBinary };

/// Eigenvalue a = +1 or a = -1 of the measured binary observable.
enum class Eigenvalue : int { kPlus = 1, kMinus = -1 };

constexpr Eigenvalue flip(Eigenvalue a) {
  return a == Eigenvalue::kPlus ? Eigenvalue::kMinus : Eigenvalue::kPlus;
}
constexpr int sign_of(Eigenvalue a) { return static_cast<int>(a); }

/// A single-repetition outcome. Counts are stored as integral doubles and
/// binary outcomes as +1 / -1.
using Outcome = double;

/// A point of an enumerable support. Sums over the support are
/// sum_i weight_i * f(point_i); the weight is 1 for probability mass
/// functions and the bin width for piecewise-constant densities.
struct Atom {
  double point = 0.0;
  double weight = 1.0;
};

struct GaussianComponent {
  double weight = 1.0;
  double mean = 0.0;
  double sigma = 1.0;
};

struct Histogram {
  std::vector<double> centers;
  std::vector<double> counts;
};

struct SingleRepetitionErrors {
  double eps_plus = 0.0;
  double eps_minus = 0.0;
  double eps = 0.0;
};

namespace detail {
class PairModel;
}

/// Conditional outcome distributions P+(O) and P-(O) for the two
/// eigenvalues. Immutable and cheap to copy; safe to share across threads.
class OutcomePair {
 public:
  /// Means +1 / -1, variance 1/r.
  static OutcomePair gaussian(double r);
  /// Photon counts with means mu_plus / mu_minus.
  static OutcomePair poissonian(double mu_plus, double mu_minus);
  /// Locations +1 / -1, common scale gamma.
  static OutcomePair cauchy(double gamma);
  /// Gaussian(r) where a fraction eta of the shots lands on the wrong mean.
  static OutcomePair gaussian_with_conversion(double r, double eta);
  /// Two outcomes: P+(-) = eps_plus, P-(+) = eps_minus.
  static OutcomePair binary(double eps_plus, double eps_minus);
  /// Piecewise-constant densities from two histograms over the same bins.
  /// Empty bins get `floor` times the total count; |lambda| is clamped to
  /// `lambda_max`.
  static OutcomePair empirical(const Histogram& plus, const Histogram& minus, double floor = 1e-8,
                               double lambda_max = 30.0);
  /// Arbitrary finite Gaussian mixtures for each eigenvalue.
  static OutcomePair gaussian_mixture(std::vector<GaussianComponent> plus,
                                      std::vector<GaussianComponent> minus);

  Support support() const;
  std::string family() const;
  /// Canonical one-line description of the family and parameters.
  std::string describe() const;

  bool in_support(Outcome o) const;
  /// ln P_a(o). Throws std::domain_error outside the support.
  double log_density(Eigenvalue a, Outcome o) const;
  /// lambda(o) = ln P+(o) - ln P-(o), clamped for empirical pairs.
  double log_likelihood_ratio(Outcome o) const;
  Outcome sample(Eigenvalue a, Rng& rng) const;

  /// True when integrals over outcomes reduce to finite sums over atoms().
  bool enumerable() const;
  std::span<const Atom> atoms() const;
  /// Outcome values near which continuous integrands have structure.
  std::span<const double> breakpoints() const;
  /// Width used to compactify the real line, o = scale * tan(theta).
  double scale() const;

  /// The pair with P+ and P- exchanged.
  OutcomePair swapped() const;
  bool is_swapped() const { return swapped_; }

 private:
  OutcomePair(std::shared_ptr<const detail::PairModel> model, bool swapped)
      : model_(std::move(model)), swapped_(swapped) {}

  Eigenvalue resolve(Eigenvalue a) const { return swapped_ ? flip(a) : a; }

  std::shared_ptr<const detail::PairModel> model_;
  bool swapped_ = false;
};

/// Conditional single-repetition error rates of the likelihood-ratio rule,
/// with the lambda = 0 mass split evenly between the two assignments.
SingleRepetitionErrors single_repetition_errors(const OutcomePair& pair);

}  // namespace qreadout

#endif  // QREADOUT_DISTRIBUTIONS_H
