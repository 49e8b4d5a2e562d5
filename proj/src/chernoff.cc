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

#include "qreadout/chernoff.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include "qreadout/outcome_integral.h"

namespace qreadout {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kDegenerateC = 1e-12;

// Exponent s ln P+ + (1 - s) ln P-. At s = 0 and 1 this is the one-sided
// limit, so outcomes outside either support never contribute.
double tilt(double s, double lp, double lm) {
  if (lp == kNegInf || lm == kNegInf) return kNegInf;
  if (s == 0.0) return lm;
  if (s == 1.0) return lp;
  return s * lp + (1.0 - s) * lm;
}

double lambda_of(double lp, double lm) {
  if (lp == kNegInf && lm == kNegInf) return 0.0;
  return lp - lm;
}

void check_s(double s) {
  if (!(s >= 0.0 && s <= 1.0)) throw std::domain_error("tilt parameter s must lie in [0, 1]");
}

template <std::size_t K>
OutcomeIntegral<K> lambda_powers(const OutcomePair& pair, double s, const QuadratureOptions& opts) {
  return integrate_outcomes<K>(
      pair, [s](double lp, double lm) { return tilt(s, lp, lm); },
      [](double, double lp, double lm) {
        std::array<double, K> out{};
        const double lam = lambda_of(lp, lm);
        double power = 1.0;
        for (std::size_t j = 0; j < K; ++j) {
          power *= lam;
          out[j] = power;
        }
        return out;
      },
      opts);
}

}  // namespace

CgfEvaluation cgf(const OutcomePair& pair, double s, const QuadratureOptions& opts) {
  check_s(s);
  const auto res = integrate_outcomes<0>(
      pair, [s](double lp, double lm) { return tilt(s, lp, lm); },
      [](double, double, double) { return std::array<double, 0>{}; }, opts);
  return {s, res.log_mass, res.rel_error};
}

double TiltedDensity::log_density(Outcome o) const {
  return tilt(s_, pair_.log_density(Eigenvalue::kPlus, o), pair_.log_density(Eigenvalue::kMinus, o)) -
         log_normalizer_;
}

double TiltedDensity::mean_lambda() const { return lambda_powers<1>(pair_, s_, {}).mean[0]; }

TiltedDensity effective_distribution(const OutcomePair& pair, double s_star) {
  if (!(s_star > 0.0 && s_star < 1.0)) throw std::domain_error("effective distribution needs 0 < s* < 1");
  return TiltedDensity(pair, s_star, cgf(pair, s_star).k_minus);
}

std::vector<double> cumulants_under_eff(const OutcomePair& pair, double s_star, int max_order) {
  if (max_order < 2 || max_order > 4) throw std::invalid_argument("cumulant order must be 2, 3 or 4");
  check_s(s_star);
  const auto raw = lambda_powers<4>(pair, s_star, {});
  const double m1 = raw.mean[0];
  const double c2 = raw.mean[1] - m1 * m1;
  const double c3 = raw.mean[2] - 3.0 * m1 * raw.mean[1] + 2.0 * m1 * m1 * m1;
  const double c4 = raw.mean[3] - 4.0 * m1 * raw.mean[2] + 6.0 * m1 * m1 * raw.mean[1] - 3.0 * m1 * m1 * m1 * m1;
  std::vector<double> out = {c2};
  if (max_order >= 3) out.push_back(c3);
  if (max_order >= 4) out.push_back(c4 - 3.0 * c2 * c2);
  return out;
}

ChernoffSummary chernoff_information(const OutcomePair& pair, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("chernoff tolerance must be positive");
  ChernoffSummary out;
  out.bhattacharyya = std::max(0.0, -cgf(pair, 0.5).k_minus);

  // Golden-section / parabolic search on the convex K-(s).
  std::uintmax_t iterations = 200;
  const auto [s_brent, k_brent] = boost::math::tools::brent_find_minima(
      [&](double s) { return cgf(pair, s).k_minus; }, 0.0, 1.0, 40, iterations);

  if (k_brent == kNegInf) {
    // Disjoint supports: a single repetition already decides.
    out.C = std::numeric_limits<double>::infinity();
    out.s_star = 0.5;
    out.alpha = kNaN;
    return out;
  }
  if (-k_brent < kDegenerateC) {
    out.degenerate = true;
    out.C = std::max(0.0, -k_brent);
    out.s_star = 0.5;
    out.s_tolerance = 0.5;
    return out;
  }

  // Polish on the saddle-point equation E_eff[lambda] = 0, which is
  // monotone in s because K- is convex.
  auto slope = [&](double s) { return lambda_powers<1>(pair, s, {}).mean[0]; };
  const double at_brent = slope(s_brent);
  double s_star = s_brent;
  double bracket = 0.0;
  if (at_brent != 0.0) {
    const double direction = at_brent > 0.0 ? -1.0 : 1.0;
    double step = 1e-7;
    double near = s_brent;
    double far = s_brent;
    double slope_far = at_brent;
    bool bracketed = false;
    while (true) {
      far = std::clamp(s_brent + direction * step, 0.0, 1.0);
      slope_far = slope(far);
      if ((slope_far > 0.0) != (at_brent > 0.0) || slope_far == 0.0) {
        bracketed = true;
        break;
      }
      near = far;
      if (far == 0.0 || far == 1.0) break;
      step *= 8.0;
    }
    if (!bracketed) {
      out.boundary_optimum = true;
      s_star = far;
    } else if (slope_far == 0.0) {
      s_star = far;
    } else {
      double lo = std::min(near, far);
      double hi = std::max(near, far);
      std::uintmax_t root_iterations = 100;
      auto width_ok = [tol](double a, double b) { return std::abs(b - a) < tol; };
      const auto root = boost::math::tools::toms748_solve(slope, lo, hi, width_ok, root_iterations);
      s_star = 0.5 * (root.first + root.second);
      bracket = root.second - root.first;
    }
  }

  const auto final_moments = lambda_powers<2>(pair, s_star, {});
  const double m1 = final_moments.mean[0];
  out.s_star = s_star;
  out.s_tolerance = bracket;
  out.C = -final_moments.log_mass;
  out.k2 = final_moments.mean[1] - m1 * m1;
  out.quadrature_error = final_moments.rel_error;
  if (out.C < kDegenerateC) {
    out.degenerate = true;
    out.C = std::max(out.C, 0.0);
    out.alpha = kNaN;
    return out;
  }
  if (s_star <= 0.0 || s_star >= 1.0) out.boundary_optimum = true;
  const double q = s_star * (1.0 - s_star);
  out.alpha = out.boundary_optimum ? kNaN : 2.0 * q * q * out.k2 / out.C;
  return out;
}

SmallCExpansion small_c_expansion(const OutcomePair& pair) {
  // Pbar weight: ln((P+ + P-) / 2).
  auto log_average = [](double lp, double lm) {
    if (lp == kNegInf && lm == kNegInf) return kNegInf;
    const double hi = std::max(lp, lm);
    return hi + std::log1p(std::exp(-std::abs(lp - lm))) - std::log(2.0);
  };
  auto y_powers = [](double, double lp, double lm) {
    const double y = 2.0 * std::tanh(0.5 * lambda_of(lp, lm));
    return std::array<double, 3>{y * y, y * y * y, y * y * y * y};
  };
  const auto res = integrate_outcomes<3>(pair, log_average, y_powers);

  SmallCExpansion out;
  out.y2 = res.mean[0];
  out.y3 = res.mean[1];
  out.y4 = res.mean[2];
  if (out.y2 <= 0.0) return out;
  out.C = out.y2 / 8.0;
  out.s_star = 0.5 + out.y3 / (24.0 * out.y2);
  out.alpha = 1.0 + out.y2 / 16.0 + out.y3 * out.y3 / (48.0 * out.y2 * out.y2) - out.y4 / (48.0 * out.y2);
  out.unreliable = out.C > 0.1;
  return out;
}

}  // namespace qreadout
