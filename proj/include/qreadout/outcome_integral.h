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

#ifndef QREADOUT_OUTCOME_INTEGRAL_H
#define QREADOUT_OUTCOME_INTEGRAL_H

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

#include "qreadout/distributions.h"
#include "qreadout/quadrature.h"

namespace qreadout {

/// Result of integrating a log-weight e^{g(O)} over the outcome space,
/// together with normalised expectations of K observables under it.
template <std::size_t K>
struct OutcomeIntegral {
  double log_mass = -std::numeric_limits<double>::infinity();
  std::array<double, K> mean{};
  double rel_error = 0.0;
};

namespace detail {

inline constexpr double kHalfPi = 0.5 * std::numbers::pi;

/// Default panel edges in theta for a continuous pair: the compactified
/// breakpoints plus the two ends of the line.
inline std::vector<double> theta_edges(const OutcomePair& pair) {
  std::vector<double> edges = {-kHalfPi, kHalfPi};
  const double w = pair.scale();
  for (double b : pair.breakpoints()) edges.push_back(std::atan(b / w));
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return edges;
}

inline double safe_product(double weight, double value) { return weight == 0.0 ? 0.0 : weight * value; }

}  // namespace detail

/// Computes ln of the integral (or sum, for enumerable supports) of
/// exp(g(ln P+, ln P-)) over outcomes and the expectations of h(o, ln P+,
/// ln P-) under the normalised weight. Continuous supports are mapped to
/// theta in (-pi/2, pi/2) via o = w tan(theta) and integrated adaptively;
/// the exponent is shifted by its probed maximum before exponentiation.
///
/// `edges` restricts a continuous integral to a theta range (sorted panel
/// edges); empty means the whole line.
template <std::size_t K, class G, class H>
OutcomeIntegral<K> integrate_outcomes(const OutcomePair& pair, G&& g, H&& h,
                                      const QuadratureOptions& opts = {},
                                      std::span<const double> edges = {}) {
  OutcomeIntegral<K> out;
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();

  if (pair.enumerable()) {
    const auto atoms = pair.atoms();
    std::vector<double> exponents(atoms.size(), kNegInf);
    double shift = kNegInf;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      const double o = atoms[i].point;
      exponents[i] = g(pair.log_density(Eigenvalue::kPlus, o), pair.log_density(Eigenvalue::kMinus, o)) +
                     std::log(atoms[i].weight);
      shift = std::max(shift, exponents[i]);
    }
    if (shift == kNegInf) return out;
    double mass = 0.0;
    std::array<double, K> moments{};
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      const double w = std::exp(exponents[i] - shift);
      if (w == 0.0) continue;
      const double o = atoms[i].point;
      const auto obs = h(o, pair.log_density(Eigenvalue::kPlus, o), pair.log_density(Eigenvalue::kMinus, o));
      mass += w;
      for (std::size_t j = 0; j < K; ++j) moments[j] += w * obs[j];
    }
    out.log_mass = shift + std::log(mass);
    for (std::size_t j = 0; j < K; ++j) out.mean[j] = moments[j] / mass;
    return out;
  }

  const double w = pair.scale();
  const std::vector<double> default_edges = edges.empty() ? detail::theta_edges(pair) : std::vector<double>{};
  const std::span<const double> panel_edges = edges.empty() ? std::span<const double>(default_edges) : edges;

  auto exponent_at = [&](double theta, double& o, double& lp, double& lm) {
    o = w * std::tan(theta);
    lp = pair.log_density(Eigenvalue::kPlus, o);
    lm = pair.log_density(Eigenvalue::kMinus, o);
    const double c = std::cos(theta);
    return g(lp, lm) + std::log(w) - 2.0 * std::log(c);
  };

  // Probe the exponent to pick the shift.
  double shift = kNegInf;
  constexpr int kProbesPerPanel = 64;
  for (std::size_t p = 0; p + 1 < panel_edges.size(); ++p) {
    const double a = panel_edges[p];
    const double b = panel_edges[p + 1];
    for (int i = 0; i <= kProbesPerPanel; ++i) {
      double theta = a + (b - a) * i / kProbesPerPanel;
      theta = std::clamp(theta, -detail::kHalfPi + 1e-15, detail::kHalfPi - 1e-15);
      double o, lp, lm;
      const double e = exponent_at(theta, o, lp, lm);
      if (std::isfinite(e)) shift = std::max(shift, e);
    }
  }
  if (shift == kNegInf) return out;

  auto integrand = [&](double theta) {
    std::array<double, K + 1> values{};
    double o, lp, lm;
    const double e = exponent_at(theta, o, lp, lm);
    const double weight = std::isnan(e) ? 0.0 : std::exp(e - shift);
    values[0] = weight;
    if (weight != 0.0) {
      const auto obs = h(o, lp, lm);
      for (std::size_t j = 0; j < K; ++j) values[j + 1] = detail::safe_product(weight, obs[j]);
    }
    return values;
  };
  const auto result = integrate_adaptive<K + 1>(integrand, panel_edges, opts);
  if (result.value[0] <= 0.0) return out;
  out.log_mass = shift + std::log(result.value[0]);
  for (std::size_t j = 0; j < K; ++j) out.mean[j] = result.value[j + 1] / result.value[0];
  out.rel_error = result.relative_error();
  return out;
}

}  // namespace qreadout

#endif  // QREADOUT_OUTCOME_INTEGRAL_H
