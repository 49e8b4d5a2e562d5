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

#include "qreadout/hmm.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include <omp.h>

namespace qreadout {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kInf = std::numeric_limits<double>::infinity();

std::uint64_t stream_of(Eigenvalue a0) { return a0 == Eigenvalue::kPlus ? 0 : 1; }

Eigenvalue next_state(const HmmSpec& spec, Eigenvalue a, double u) {
  if (a == Eigenvalue::kPlus) return u < spec.p_relax ? Eigenvalue::kMinus : Eigenvalue::kPlus;
  return u < spec.p_excite ? Eigenvalue::kPlus : Eigenvalue::kMinus;
}

bool tie_coin(std::uint64_t seed, Eigenvalue a0, std::uint64_t index, int n) {
  Rng coin = Rng::substream(mix_key(seed, 2 + stream_of(a0), index), 0, static_cast<std::uint64_t>(n));
  return coin.uniform() < 0.5;
}

std::vector<int> sorted_counts(const HmmSpec& spec, const std::vector<int>& n_values) {
  if (n_values.empty()) throw std::invalid_argument("monte carlo needs at least one repetition count");
  std::vector<int> out = n_values;
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  if (out.front() < 1) throw std::invalid_argument("repetition counts must be positive");
  if (out.back() > spec.n_max) throw std::invalid_argument("repetition count exceeds the spec's n_max");
  return out;
}

// Simulates trajectories [begin, end) for one preparation and adds the
// decoding errors at each requested N into `errors`.
void simulate_block(const HmmSpec& spec, Eigenvalue a0, std::uint64_t begin, std::uint64_t end, std::uint64_t seed,
                    const std::vector<int>& counts, std::vector<std::uint64_t>& errors) {
  const int n_max = counts.back();
  for (std::uint64_t i = begin; i < end; ++i) {
    Rng rng = Rng::substream(seed, stream_of(a0), i);
    ForwardFilter plus(spec, Eigenvalue::kPlus);
    ForwardFilter minus(spec, Eigenvalue::kMinus);
    Eigenvalue a = a0;
    std::size_t next = 0;
    for (int k = 1; k <= n_max; ++k) {
      const Outcome o = spec.pair.sample(a, rng);
      const double lp = spec.pair.log_density(Eigenvalue::kPlus, o);
      const double lm = spec.pair.log_density(Eigenvalue::kMinus, o);
      plus.step(lp, lm);
      minus.step(lp, lm);
      a = next_state(spec, a, rng.uniform());
      if (k != counts[next]) continue;
      const double l = plus.log_likelihood() - minus.log_likelihood();
      Eigenvalue assigned;
      if (l > 0.0) {
        assigned = Eigenvalue::kPlus;
      } else if (l < 0.0) {
        assigned = Eigenvalue::kMinus;
      } else {
        assigned = tie_coin(seed, a0, i, k) ? Eigenvalue::kPlus : Eigenvalue::kMinus;
      }
      if (assigned != a0) ++errors[next];
      ++next;
    }
  }
}

McEstimate assemble(std::uint64_t m, std::uint64_t seed, const std::vector<int>& counts,
                    const std::vector<std::uint64_t>& errors_plus, const std::vector<std::uint64_t>& errors_minus) {
  McEstimate out;
  out.m = m;
  out.seed = seed;
  for (std::size_t j = 0; j < counts.size(); ++j) {
    out.points.push_back(make_point(counts[j], errors_plus[j], errors_minus[j], m));
  }
  return out;
}

}  // namespace

void HmmSpec::validate() const {
  if (!(p_relax >= 0.0 && p_relax <= 1.0)) throw std::invalid_argument("p_relax must lie in [0, 1]");
  if (!(p_excite >= 0.0 && p_excite <= 1.0)) throw std::invalid_argument("p_excite must lie in [0, 1]");
  if (n_max < 0) throw std::invalid_argument("n_max must be nonnegative");
}

double HmmSpec::transition(Eigenvalue from, Eigenvalue to) const {
  const double leave = from == Eigenvalue::kPlus ? p_relax : p_excite;
  return from == to ? 1.0 - leave : leave;
}

bool HmmSpec::outside_single_shot_regime(double C) const { return p_relax >= std::min(C, 1.0); }

Trajectory sample_path(const HmmSpec& spec, Eigenvalue a0, Rng& rng) {
  spec.validate();
  Trajectory out;
  out.states.reserve(static_cast<std::size_t>(spec.n_max));
  out.outcomes.reserve(static_cast<std::size_t>(spec.n_max));
  Eigenvalue a = a0;
  for (int k = 0; k < spec.n_max; ++k) {
    out.states.push_back(a);
    out.outcomes.push_back(spec.pair.sample(a, rng));
    a = next_state(spec, a, rng.uniform());
  }
  return out;
}

std::vector<Outcome> sample_trajectory(const HmmSpec& spec, Eigenvalue a0, Rng& rng) {
  return sample_path(spec, a0, rng).outcomes;
}

ForwardFilter::ForwardFilter(const HmmSpec& spec, Eigenvalue a0)
    : spec_(&spec),
      occupation_(a0 == Eigenvalue::kPlus ? std::array<double, 2>{1.0, 0.0} : std::array<double, 2>{0.0, 1.0}) {}

void ForwardFilter::step(double log_plus, double log_minus) {
  ++steps_;
  if (log_likelihood_ == kNegInf) return;
  const double shift = std::max(log_plus, log_minus);
  if (shift == kNegInf) throw NumericError("outcome has zero likelihood under both eigenvalues");
  // Emission-weighted occupations, V_k p_k with emissions divided by e^shift.
  const double w_plus = occupation_[0] * std::exp(log_plus - shift);
  const double w_minus = occupation_[1] * std::exp(log_minus - shift);
  const double norm = w_plus + w_minus;
  if (norm == 0.0) {
    log_likelihood_ = kNegInf;
    return;
  }
  const double next_plus = w_plus * (1.0 - spec_->p_relax) + w_minus * spec_->p_excite;
  const double next_minus = w_plus * spec_->p_relax + w_minus * (1.0 - spec_->p_excite);
  occupation_ = {next_plus / norm, next_minus / norm};
  log_likelihood_ += std::log(norm) + shift;
}

double forward_loglik(const HmmSpec& spec, std::span<const Outcome> outcomes, Eigenvalue a0) {
  ForwardFilter filter(spec, a0);
  for (Outcome o : outcomes) filter.step(o);
  return filter.log_likelihood();
}

Decision decode(const HmmSpec& spec, std::span<const Outcome> outcomes, Rng& tie_rng) {
  Decision d;
  const double plus = forward_loglik(spec, outcomes, Eigenvalue::kPlus);
  const double minus = forward_loglik(spec, outcomes, Eigenvalue::kMinus);
  if (plus == kNegInf && minus == kNegInf) throw NumericError("string has zero likelihood under both eigenvalues");
  d.l_n = plus - minus;
  if (d.l_n > 0.0) {
    d.assignment = Eigenvalue::kPlus;
  } else if (d.l_n < 0.0) {
    d.assignment = Eigenvalue::kMinus;
  } else {
    d.tie = true;
    d.assignment = tie_rng.uniform() < 0.5 ? Eigenvalue::kPlus : Eigenvalue::kMinus;
  }
  return d;
}

McPoint make_point(int n, std::uint64_t errors_plus, std::uint64_t errors_minus, std::uint64_t m) {
  McPoint p;
  p.n = n;
  p.errors_plus = errors_plus;
  p.errors_minus = errors_minus;
  const double md = static_cast<double>(m);
  p.e_plus = static_cast<double>(errors_plus) / md;
  p.e_minus = static_cast<double>(errors_minus) / md;
  p.e_avg = 0.5 * (p.e_plus + p.e_minus);
  p.delta_plus = std::sqrt(p.e_plus * (1.0 - p.e_plus) / md);
  p.delta_minus = std::sqrt(p.e_minus * (1.0 - p.e_minus) / md);
  p.delta_avg = 0.5 * std::sqrt(p.delta_plus * p.delta_plus + p.delta_minus * p.delta_minus);
  if (errors_plus == 0) p.bound_plus = 3.0 / md;
  if (errors_minus == 0) p.bound_minus = 3.0 / md;
  return p;
}

McEstimate monte_carlo_serial(const HmmSpec& spec, std::uint64_t m, const std::vector<int>& n_values,
                              std::uint64_t seed) {
  spec.validate();
  if (m < 1) throw std::invalid_argument("monte carlo needs m >= 1");
  const std::vector<int> counts = sorted_counts(spec, n_values);
  std::vector<std::uint64_t> errors_plus(counts.size(), 0);
  std::vector<std::uint64_t> errors_minus(counts.size(), 0);
  simulate_block(spec, Eigenvalue::kPlus, 0, m, seed, counts, errors_plus);
  simulate_block(spec, Eigenvalue::kMinus, 0, m, seed, counts, errors_minus);
  return assemble(m, seed, counts, errors_plus, errors_minus);
}

McEstimate monte_carlo(const HmmSpec& spec, std::uint64_t m, const std::vector<int>& n_values, std::uint64_t seed,
                       int threads) {
  spec.validate();
  if (m < 1) throw std::invalid_argument("monte carlo needs m >= 1");
  const std::vector<int> counts = sorted_counts(spec, n_values);
  std::vector<std::uint64_t> errors_plus(counts.size(), 0);
  std::vector<std::uint64_t> errors_minus(counts.size(), 0);

  constexpr std::uint64_t kBlock = 1024;
  const std::int64_t blocks = static_cast<std::int64_t>((m + kBlock - 1) / kBlock);
  const int team = threads > 0 ? threads : omp_get_max_threads();
  std::exception_ptr failure;

#pragma omp parallel num_threads(team)
  {
    std::vector<std::uint64_t> local_plus(counts.size(), 0);
    std::vector<std::uint64_t> local_minus(counts.size(), 0);
#pragma omp for schedule(dynamic)
    for (std::int64_t b = 0; b < 2 * blocks; ++b) {
      const bool is_plus = b < blocks;
      const std::uint64_t block = static_cast<std::uint64_t>(is_plus ? b : b - blocks);
      const std::uint64_t begin = block * kBlock;
      const std::uint64_t end = std::min(m, begin + kBlock);
      try {
        simulate_block(spec, is_plus ? Eigenvalue::kPlus : Eigenvalue::kMinus, begin, end, seed, counts,
                       is_plus ? local_plus : local_minus);
      } catch (...) {
#pragma omp critical(qreadout_mc_failure)
        if (!failure) failure = std::current_exception();
      }
    }
    // Integer sums commute, so the reduction order does not matter.
#pragma omp critical(qreadout_mc_reduce)
    for (std::size_t j = 0; j < counts.size(); ++j) {
      errors_plus[j] += local_plus[j];
      errors_minus[j] += local_minus[j];
    }
  }
  if (failure) std::rethrow_exception(failure);
  return assemble(m, seed, counts, errors_plus, errors_minus);
}

namespace {

double interpolate(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
  auto it = std::lower_bound(xs.begin(), xs.end(), x);
  if (it == xs.end()) return std::numeric_limits<double>::quiet_NaN();
  const std::size_t hi = static_cast<std::size_t>(it - xs.begin());
  if (xs[hi] == x) return ys[hi];
  if (hi == 0) return std::numeric_limits<double>::quiet_NaN();
  const double t = (x - xs[hi - 1]) / (xs[hi] - xs[hi - 1]);
  return ys[hi - 1] + t * (ys[hi] - ys[hi - 1]);
}

bool same_ratio(double a, double b) {
  if (std::isinf(a) || std::isinf(b)) return std::isinf(a) && std::isinf(b);
  return std::abs(a - b) <= 0.01 * std::max(std::abs(a), std::abs(b));
}

}  // namespace

CollapseResult universality_collapse(const std::vector<CollapseInput>& inputs, std::uint64_t m,
                                     const std::vector<int>& n_values, std::uint64_t seed, double cn_min,
                                     double cn_max, double rel_tol, int threads) {
  CollapseResult result;
  struct Curve {
    std::string label;
    double c_over_p;
    std::vector<double> cn;
    std::vector<double> ln_e;
    std::vector<double> delta;
  };
  std::vector<Curve> curves;

  for (std::size_t idx = 0; idx < inputs.size(); ++idx) {
    const CollapseInput& in = inputs[idx];
    const double C = in.summary.C;
    const double p = in.spec.p_relax > 0.0 ? in.spec.p_relax : in.spec.p_excite;
    const double c_over_p = p > 0.0 ? C / p : kInf;
    const McEstimate est = monte_carlo(in.spec, m, n_values, mix_key(seed, 0x636f6c6c, idx), threads);
    Curve curve{in.label, c_over_p, {}, {}, {}};
    for (const McPoint& pt : est.points) {
      CollapseRow row;
      row.label = in.label;
      row.C = C;
      row.c_over_p = c_over_p;
      row.n = pt.n;
      row.cn = C * pt.n;
      row.ln_e = pt.e_avg > 0.0 ? std::log(pt.e_avg) : kNegInf;
      row.delta_ln_e = pt.e_avg > 0.0 ? pt.delta_avg / pt.e_avg : kInf;
      result.rows.push_back(row);
      if (pt.e_avg > 0.0) {
        curve.cn.push_back(row.cn);
        curve.ln_e.push_back(row.ln_e);
        curve.delta.push_back(row.delta_ln_e);
      }
    }
    curves.push_back(std::move(curve));
  }

  for (std::size_t i = 0; i < curves.size(); ++i) {
    for (std::size_t j = 0; j < curves.size(); ++j) {
      if (i == j || !same_ratio(curves[i].c_over_p, curves[j].c_over_p)) continue;
      const Curve& a = curves[i];
      const Curve& b = curves[j];
      for (std::size_t k = 0; k < a.cn.size(); ++k) {
        const double x = a.cn[k];
        if (x < cn_min - 1e-12 || x > cn_max + 1e-12) continue;
        const double other = interpolate(b.cn, b.ln_e, x);
        if (std::isnan(other)) continue;
        const double other_delta = interpolate(b.cn, b.delta, x);
        CollapseComparison cmp;
        cmp.first = a.label;
        cmp.second = b.label;
        cmp.cn = x;
        cmp.deviation = std::abs(a.ln_e[k] - other);
        cmp.allowed = std::max(rel_tol * std::abs(a.ln_e[k]),
                               3.0 * std::sqrt(a.delta[k] * a.delta[k] + other_delta * other_delta));
        result.max_deviation = std::max(result.max_deviation, cmp.deviation);
        result.worst_ratio = std::max(result.worst_ratio, cmp.deviation / cmp.allowed);
        if (cmp.deviation > cmp.allowed) result.collapsed = false;
        result.comparisons.push_back(cmp);
      }
    }
  }
  return result;
}

}  // namespace qreadout
