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

#ifndef QREADOUT_QUADRATURE_H
#define QREADOUT_QUADRATURE_H

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <queue>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace qreadout {

/// Raised when adaptive quadrature cannot reach the failure tolerance.
class IntegrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct QuadratureOptions {
  /// Target relative error; refinement stops once every component meets it.
  double rel_tol = 1e-12;
  /// Achieved relative error above this raises IntegrationError.
  double fail_tol = 1e-9;
  /// Absolute floor below which errors are ignored.
  double abs_floor = 1e-300;
  int max_intervals = 4000;
};

template <std::size_t K>
struct QuadratureResult {
  std::array<double, K> value{};
  std::array<double, K> error{};
  /// Integral of |f|, used to scale relative errors.
  std::array<double, K> magnitude{};
  int evaluations = 0;

  /// Worst relative error over the components.
  double relative_error() const {
    double worst = 0.0;
    for (std::size_t j = 0; j < K; ++j) {
      if (magnitude[j] > 0.0) worst = std::max(worst, error[j] / magnitude[j]);
    }
    return worst;
  }
};

namespace detail {

// 15-point Kronrod nodes (positive half) and weights with the embedded
// 7-point Gauss weights. Node 7 is the centre.
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <std::size_t K>
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  std::array<double, K> value{};
  std::array<double, K> error{};
  std::array<double, K> magnitude{};
  double priority = 0.0;

  bool operator<(const Interval& other) const { return priority < other.priority; }
};

template <std::size_t K, class F>
Interval<K> kronrod15(F& f, double lo, double hi) {
  Interval<K> out;
  out.lo = lo;
  out.hi = hi;
  const double centre = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  std::array<double, K> gauss{};

  auto accumulate = [&](const std::array<double, K>& fx, double wk, double wg) {
    for (std::size_t j = 0; j < K; ++j) {
      out.value[j] += wk * fx[j];
      out.magnitude[j] += wk * std::abs(fx[j]);
      gauss[j] += wg * fx[j];
    }
  };

  accumulate(f(centre), kKronrodWeights[7], kGaussWeights[3]);
  for (std::size_t i = 0; i < 7; ++i) {
    const double dx = half * kKronrodNodes[i];
    const double wg = (i % 2 == 1) ? kGaussWeights[i / 2] : 0.0;
    accumulate(f(centre - dx), kKronrodWeights[i], wg);
    accumulate(f(centre + dx), kKronrodWeights[i], wg);
  }
  for (std::size_t j = 0; j < K; ++j) {
    out.value[j] *= half;
    out.magnitude[j] *= std::abs(half);
    out.error[j] = std::abs(out.value[j] - half * gauss[j]);
  }
  return out;
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod integration of a vector-valued integrand
/// over the panels delimited by `edges` (sorted, at least two entries).
/// The interval with the largest scaled error is bisected until every
/// component satisfies the relative tolerance.
template <std::size_t K, class F>
QuadratureResult<K> integrate_adaptive(F&& f, std::span<const double> edges,
                                       const QuadratureOptions& opts = {}) {
  if (edges.size() < 2) throw std::invalid_argument("integrate_adaptive: need at least two edges");

  std::priority_queue<detail::Interval<K>> work;
  QuadratureResult<K> total;

  auto push = [&](detail::Interval<K> iv) {
    for (std::size_t j = 0; j < K; ++j) {
      total.value[j] += iv.value[j];
      total.error[j] += iv.error[j];
      total.magnitude[j] += iv.magnitude[j];
    }
    total.evaluations += 15;
    work.push(std::move(iv));
  };
  auto pop = [&]() {
    detail::Interval<K> iv = work.top();
    work.pop();
    for (std::size_t j = 0; j < K; ++j) {
      total.value[j] -= iv.value[j];
      total.error[j] -= iv.error[j];
      total.magnitude[j] -= iv.magnitude[j];
    }
    return iv;
  };
  auto converged = [&]() {
    for (std::size_t j = 0; j < K; ++j) {
      if (total.error[j] > std::max(opts.rel_tol * total.magnitude[j], opts.abs_floor)) return false;
    }
    return true;
  };
  // Priority is the error relative to the tolerance budget of its component.
  auto prioritise = [&](detail::Interval<K>& iv) {
    double p = 0.0;
    for (std::size_t j = 0; j < K; ++j) {
      const double budget = std::max(opts.rel_tol * total.magnitude[j], opts.abs_floor);
      p = std::max(p, iv.error[j] / budget);
    }
    iv.priority = p;
  };

  std::vector<detail::Interval<K>> initial;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    if (!(edges[i + 1] > edges[i])) continue;
    initial.push_back(detail::kronrod15<K>(f, edges[i], edges[i + 1]));
  }
  for (auto& iv : initial) {
    for (std::size_t j = 0; j < K; ++j) total.magnitude[j] += iv.magnitude[j];
  }
  for (auto& iv : initial) prioritise(iv);
  total.magnitude = {};
  for (auto& iv : initial) push(std::move(iv));

  int intervals = static_cast<int>(work.size());
  while (!work.empty() && !converged() && intervals < opts.max_intervals) {
    detail::Interval<K> worst = pop();
    const double mid = 0.5 * (worst.lo + worst.hi);
    if (!(mid > worst.lo && mid < worst.hi)) {
      // Interval exhausted at machine resolution; keep its estimate.
      worst.priority = 0.0;
      push(std::move(worst));
      break;
    }
    auto left = detail::kronrod15<K>(f, worst.lo, mid);
    auto right = detail::kronrod15<K>(f, mid, worst.hi);
    prioritise(left);
    prioritise(right);
    push(std::move(left));
    push(std::move(right));
    ++intervals;
  }

  // Re-sum from scratch to drop the cancellation noise of the running totals.
  total.value = {};
  total.error = {};
  total.magnitude = {};
  while (!work.empty()) {
    const auto& iv = work.top();
    for (std::size_t j = 0; j < K; ++j) {
      total.value[j] += iv.value[j];
      total.error[j] += iv.error[j];
      total.magnitude[j] += iv.magnitude[j];
    }
    work.pop();
  }
  for (std::size_t j = 0; j < K; ++j) {
    if (total.error[j] > std::max(opts.fail_tol * total.magnitude[j], opts.abs_floor)) {
      throw IntegrationError("adaptive quadrature did not converge: relative error " +
                             std::to_string(total.error[j] / total.magnitude[j]));
    }
  }
  return total;
}

}  // namespace qreadout

#endif  // QREADOUT_QUADRATURE_H
