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

// Independent reference computations used by the test suites. Nothing here
// calls the library's quadrature or optimiser.

#ifndef QREADOUT_TESTS_ORACLES_H
#define QREADOUT_TESTS_ORACLES_H

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "qreadout/distributions.h"
#include "qreadout/hmm.h"

namespace qreadout::oracle {

inline double half_erfc(double x) { return 0.5 * std::erfc(x); }

inline double normal_cdf(double x, double mean, double sigma) {
  return 0.5 * std::erfc(-(x - mean) / (sigma * std::numbers::sqrt2));
}

inline double cauchy_cdf(double x, double loc, double gamma) {
  return 0.5 + std::atan((x - loc) / gamma) / std::numbers::pi;
}

/// Boost adaptive Gauss-Kronrod over the real line, split at `cuts`.
inline double integrate_line(const std::function<double(double)>& f, std::vector<double> cuts) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  std::sort(cuts.begin(), cuts.end());
  const double inf = std::numeric_limits<double>::infinity();
  double total = GK::integrate(f, -inf, cuts.front(), 12, 1e-12);
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) total += GK::integrate(f, cuts[i], cuts[i + 1], 12, 1e-12);
  total += GK::integrate(f, cuts.back(), inf, 12, 1e-12);
  return total;
}

inline double integrate_interval(const std::function<double(double)>& f, double a, double b) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 12, 1e-12);
}

/// Asymptotic Kolmogorov-Smirnov p-value (Stephens' small-sample correction).
inline double ks_pvalue(std::vector<double> sample, const std::function<double(double)>& cdf) {
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double F = cdf(sample[i]);
    d = std::max({d, (i + 1) / n - F, F - i / n});
  }
  const double sq = std::sqrt(n);
  const double lambda = (sq + 0.12 + 0.11 / sq) * d;
  double p = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = 2.0 * ((k % 2) ? 1.0 : -1.0) * std::exp(-2.0 * k * k * lambda * lambda);
    p += term;
    if (std::abs(term) < 1e-16) break;
  }
  return std::clamp(p, 0.0, 1.0);
}

/// Pearson chi-square p-value; bins with expected count below 5 are pooled.
inline double chi_square_pvalue(const std::vector<double>& observed, const std::vector<double>& expected) {
  double stat = 0.0;
  double pooled_o = 0.0, pooled_e = 0.0;
  int bins = 0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    if (expected[i] < 5.0) {
      pooled_o += observed[i];
      pooled_e += expected[i];
      continue;
    }
    stat += (observed[i] - expected[i]) * (observed[i] - expected[i]) / expected[i];
    ++bins;
  }
  if (pooled_e > 0.0) {
    stat += (pooled_o - pooled_e) * (pooled_o - pooled_e) / pooled_e;
    ++bins;
  }
  if (bins < 2) return 1.0;
  boost::math::chi_squared dist(bins - 1);
  return boost::math::cdf(boost::math::complement(dist, stat));
}

inline double log_binomial(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

/// P(more than half of N independent flips with probability eps are wrong).
/// Ties (even N) count half.
inline double majority_vote_error(int n, double eps) {
  double e = 0.0;
  for (int k = 0; k <= n; ++k) {
    const double p = std::exp(log_binomial(n, k) + k * std::log(eps) + (n - k) * std::log1p(-eps));
    if (2 * k > n) e += p;
    if (2 * k == n) e += 0.5 * p;
  }
  return e;
}

/// ln P_{a0}(O) by summing over all 2^N hidden eigenvalue paths.
inline double brute_force_loglik(const HmmSpec& spec, const std::vector<Outcome>& outcomes, Eigenvalue a0) {
  const std::size_t n = outcomes.size();
  if (n == 0) return 0.0;
  double total = 0.0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << (n - 1)); ++mask) {
    // Bit k-1 of mask: the state at repetition k (k >= 1) is flipped w.r.t. +1.
    Eigenvalue prev = a0;
    double p = std::exp(spec.pair.log_density(a0, outcomes[0]));
    for (std::size_t k = 1; k < n; ++k) {
      const Eigenvalue cur = (mask >> (k - 1)) & 1 ? Eigenvalue::kMinus : Eigenvalue::kPlus;
      p *= spec.transition(prev, cur) * std::exp(spec.pair.log_density(cur, outcomes[k]));
      prev = cur;
    }
    total += p;
  }
  return std::log(total);
}

/// Chernoff information of two coins by dense grid search on s plus golden
/// refinement; used to cross-check the closed form.
inline double binary_chernoff_by_search(double eps_plus, double eps_minus) {
  auto k = [&](double s) {
    return std::log(std::pow(1 - eps_plus, s) * std::pow(eps_minus, 1 - s) +
                    std::pow(eps_plus, s) * std::pow(1 - eps_minus, 1 - s));
  };
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 200; ++it) {
    const double a = lo + (hi - lo) / 3, b = hi - (hi - lo) / 3;
    if (k(a) < k(b)) hi = b; else lo = a;
  }
  return -k(0.5 * (lo + hi));
}

}  // namespace qreadout::oracle

#endif  // QREADOUT_TESTS_ORACLES_H
