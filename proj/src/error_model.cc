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

#include "qreadout/error_model.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <omp.h>

#include "qreadout/quadrature.h"

namespace qreadout {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_n(double n) {
  if (!(n > 0.0) || !std::isfinite(n)) throw std::domain_error("repetition count N must be positive");
}

double log_add_exp(double a, double b) {
  const double hi = std::max(a, b);
  if (hi == -kInf) return -kInf;
  return hi + std::log1p(std::exp(-std::abs(a - b)));
}

}  // namespace

std::string to_string(CurveMethod method) {
  switch (method) {
    case CurveMethod::kGaussianAnsatz:
      return "gaussian-ansatz";
    case CurveMethod::kSaddlePoint:
      return "saddle-point";
    case CurveMethod::kChernoffUpperBound:
      return "chernoff-upper-bound";
    case CurveMethod::kMonteCarlo:
      return "monte-carlo";
  }
  return "unknown";
}

CurveMethod curve_method_from_string(const std::string& name) {
  for (auto m : {CurveMethod::kGaussianAnsatz, CurveMethod::kSaddlePoint, CurveMethod::kChernoffUpperBound,
                 CurveMethod::kMonteCarlo}) {
    if (to_string(m) == name) return m;
  }
  throw std::invalid_argument("unknown curve method '" + name + "'");
}

ErrorCurve gaussian_ansatz(double C, const std::vector<double>& n_values) {
  if (!(C >= 0.0)) throw std::domain_error("gaussian ansatz needs C >= 0");
  ErrorCurve curve;
  curve.method = CurveMethod::kGaussianAnsatz;
  curve.n_values = n_values;
  for (double n : n_values) {
    if (!(n >= 0.0)) throw std::domain_error("repetition count N must be nonnegative");
    const double e = 0.5 * std::erfc(std::sqrt(C * n));
    curve.e_avg.push_back(e);
    curve.e_plus.push_back(e);
    curve.e_minus.push_back(e);
    curve.fallback.push_back(false);
  }
  return curve;
}

ErrorCurve chernoff_upper_bound(double C, const std::vector<double>& n_values) {
  if (!(C >= 0.0)) throw std::domain_error("chernoff bound needs C >= 0");
  ErrorCurve curve;
  curve.method = CurveMethod::kChernoffUpperBound;
  curve.n_values = n_values;
  for (double n : n_values) {
    if (!(n >= 0.0)) throw std::domain_error("repetition count N must be nonnegative");
    const double e = 0.5 * std::exp(-C * n);
    curve.e_avg.push_back(e);
    curve.e_plus.push_back(e);
    curve.e_minus.push_back(e);
    curve.fallback.push_back(false);
  }
  return curve;
}

ErrorCurve saddle_point(const ChernoffSummary& summary, const std::vector<double>& n_values) {
  const double C = summary.C;
  const double alpha = summary.alpha;
  const double s = summary.s_star;
  if (!(alpha > 0.0)) throw std::domain_error("saddle-point curve needs alpha > 0");
  if (!(s > 0.0 && s < 1.0)) throw std::domain_error("saddle-point curve needs 0 < s* < 1");
  if (!(C >= 0.0)) throw std::domain_error("saddle-point curve needs C >= 0");

  ErrorCurve curve;
  curve.method = CurveMethod::kSaddlePoint;
  curve.n_values = n_values;
  for (double n : n_values) {
    check_n(n);
    const double x = C * n;
    if (alpha * x < 0.1) {
      const double bound = 0.5 * std::exp(-x);
      curve.e_avg.push_back(bound);
      curve.e_plus.push_back(bound);
      curve.e_minus.push_back(bound);
      curve.fallback.push_back(true);
      continue;
    }
    const double tail = std::exp(-x);
    const double e = 0.5 * std::erfc(std::sqrt(x)) +
                     (1.0 / std::sqrt(alpha) - 1.0) / std::sqrt(4.0 * std::numbers::pi * x) * tail;
    const double skew = (2.0 * s - 1.0) / std::sqrt(4.0 * std::numbers::pi * alpha * x) * tail;
    curve.e_avg.push_back(e);
    curve.e_plus.push_back(e + skew);
    curve.e_minus.push_back(e - skew);
    curve.fallback.push_back(false);
  }
  return curve;
}

BinaryChernoff binary_chernoff(double eps_plus, double eps_minus) {
  auto valid = [](double e) { return e > 0.0 && e < 1.0; };
  if (!valid(eps_plus) || !valid(eps_minus)) {
    throw std::domain_error("binary Chernoff information needs 0 < eps < 1");
  }
  BinaryChernoff out;
  if (eps_plus + eps_minus > 1.0) {
    // Relabelling the two binary outcomes leaves C_b unchanged.
    eps_plus = 1.0 - eps_plus;
    eps_minus = 1.0 - eps_minus;
    out.reflected = true;
  }
  if (std::abs(eps_plus + eps_minus - 1.0) < 1e-15) return out;

  const double log_a = std::log1p(-eps_plus);  // ln P+(+)
  const double log_b = std::log(eps_minus);    // ln P-(+)
  const double log_c = std::log(eps_plus);     // ln P+(-)
  const double log_d = std::log1p(-eps_minus); // ln P-(-)

  const double numerator = (log_d - log_b) + std::log(log_d - log_c) - std::log(log_a - log_b);
  const double denominator = (log_a - log_b) + (log_d - log_c);
  const double s = std::clamp(numerator / denominator, 0.0, 1.0);
  out.s_star = s;
  out.C_b = -log_add_exp(s * log_a + (1.0 - s) * log_b, s * log_c + (1.0 - s) * log_d);
  return out;
}

AdvantageReport advantage(const OutcomePair& pair) {
  AdvantageReport report;
  const ChernoffSummary summary = chernoff_information(pair);
  if (summary.degenerate) throw std::domain_error("advantage is undefined for indistinguishable distributions");
  const SingleRepetitionErrors errors = single_repetition_errors(pair);
  report.C = summary.C;
  report.eps_plus = errors.eps_plus;
  report.eps_minus = errors.eps_minus;

  if (errors.eps_plus == 0.0 && errors.eps_minus == 0.0) {
    report.C_b = kInf;
    report.advantage = kNaN;
    report.binary_perfect = true;
    return report;
  }
  if (errors.eps_plus == 0.0 || errors.eps_minus == 0.0) {
    // One-sided limit of the binary CGF: K(s) is linear in s, so the
    // infimum sits on the boundary.
    const double other = errors.eps_plus == 0.0 ? errors.eps_minus : errors.eps_plus;
    report.C_b = -std::log(other);
    report.s_star_b = errors.eps_plus == 0.0 ? 0.0 : 1.0;
  } else {
    const BinaryChernoff b = binary_chernoff(errors.eps_plus, errors.eps_minus);
    report.C_b = b.C_b;
    report.s_star_b = b.s_star;
  }
  report.advantage = report.C / report.C_b;
  return report;
}

double gaussian_error(double r) { return 0.5 * std::erfc(std::sqrt(0.5 * r)); }

double snr_from_gaussian_error(double eps_g) {
  if (!(eps_g > 0.0 && eps_g < 0.5)) throw std::domain_error("Gaussian error rate must lie in (0, 1/2)");
  // eps_g = erfc(u) / 2 is decreasing in u = sqrt(r / 2).
  double lo = 0.0;
  double hi = 40.0;
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (0.5 * std::erfc(mid) > eps_g) {
      lo = mid;
    } else {
      hi = mid;
    }
    const double r_lo = 2.0 * lo * lo;
    const double r_hi = 2.0 * hi * hi;
    if (r_hi - r_lo <= 1e-12 * r_hi) break;
  }
  const double u = 0.5 * (lo + hi);
  return 2.0 * u * u;
}

double conversion_chernoff(double r, double eta) {
  if (!(r > 0.0) || !std::isfinite(r)) throw std::domain_error("conversion_chernoff needs r > 0");
  if (!(eta >= 0.0 && eta <= 0.5)) throw std::domain_error("conversion_chernoff needs 0 <= eta <= 1/2");
  const double c = 4.0 * eta * (1.0 - eta);
  if (c == 0.0) return 0.5 * r;

  const double root_r = std::sqrt(r);
  // ln(1 + c sinh^2 z) written without overflow for large |z|.
  auto log_factor = [c](double z) {
    const double a = std::abs(z);
    return 2.0 * a + std::log(0.25 * c * (1.0 + std::exp(-4.0 * a)) + (1.0 - 0.5 * c) * std::exp(-2.0 * a));
  };
  auto exponent = [&](double x) { return -0.5 * x * x + 0.5 * log_factor(root_r * x); };

  // The integrand is even; integrate x in [0, inf) via x = w tan(theta).
  const double w = std::max(1.0, root_r);
  std::vector<double> edges = {0.0, 0.5 * std::numbers::pi};
  for (double b : {root_r - 8.0, root_r - 4.0, root_r - 2.0, root_r - 1.0, root_r, root_r + 1.0, root_r + 2.0,
                   root_r + 4.0, root_r + 8.0, 1.0, 2.0, 4.0, 8.0}) {
    if (b > 0.0) edges.push_back(std::atan(b / w));
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  double shift = -kInf;
  for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
    for (int i = 0; i <= 64; ++i) {
      const double theta = std::min(edges[p] + (edges[p + 1] - edges[p]) * i / 64.0, 0.5 * std::numbers::pi - 1e-12);
      const double x = w * std::tan(theta);
      shift = std::max(shift, exponent(x) + std::log(w) - 2.0 * std::log(std::cos(theta)));
    }
  }
  auto integrand = [&](double theta) {
    const double x = w * std::tan(theta);
    const double e = exponent(x) + std::log(w) - 2.0 * std::log(std::cos(theta)) - shift;
    return std::array<double, 1>{std::isnan(e) ? 0.0 : std::exp(e)};
  };
  const auto result = integrate_adaptive<1>(integrand, edges);
  // ln of the full-line integral including the 1/sqrt(2 pi) normalisation.
  const double log_integral = shift + std::log(2.0 * result.value[0]) - 0.5 * std::log(2.0 * std::numbers::pi);
  double C = 0.5 * r - log_integral;
  if (C < 0.0 && C > -1e-12) C = 0.0;
  return C;
}

namespace {

AdvantageCell advantage_cell(double eps_g, double eta) {
  AdvantageCell cell;
  cell.eps_g = eps_g;
  cell.eta = eta;
  cell.r = snr_from_gaussian_error(eps_g);
  cell.C = conversion_chernoff(cell.r, eta);
  const double eps_eta = (1.0 - eta) * eps_g + eta * (1.0 - eps_g);
  cell.C_b = binary_chernoff(eps_eta, eps_eta).C_b;
  cell.advantage = cell.C / cell.C_b;
  return cell;
}

void check_grid_ranges(const std::vector<double>& eps_g_values, const std::vector<double>& eta_values) {
  for (double e : eps_g_values) {
    if (!(e > 0.0 && e < 0.5)) throw std::domain_error("eps_G grid values must lie in (0, 1/2)");
  }
  for (double e : eta_values) {
    if (!(e >= 0.0 && e < 0.5)) throw std::domain_error("eta grid values must lie in [0, 1/2)");
  }
}

}  // namespace

std::vector<AdvantageCell> advantage_grid_serial(const std::vector<double>& eps_g_values,
                                                 const std::vector<double>& eta_values) {
  check_grid_ranges(eps_g_values, eta_values);
  std::vector<AdvantageCell> cells;
  cells.reserve(eps_g_values.size() * eta_values.size());
  for (double eps_g : eps_g_values) {
    for (double eta : eta_values) cells.push_back(advantage_cell(eps_g, eta));
  }
  return cells;
}

std::vector<AdvantageCell> advantage_grid(const std::vector<double>& eps_g_values,
                                          const std::vector<double>& eta_values, int threads) {
  check_grid_ranges(eps_g_values, eta_values);
  const std::ptrdiff_t rows = static_cast<std::ptrdiff_t>(eps_g_values.size());
  const std::ptrdiff_t cols = static_cast<std::ptrdiff_t>(eta_values.size());
  std::vector<AdvantageCell> cells(static_cast<std::size_t>(rows * cols));
  const int team = threads > 0 ? threads : omp_get_max_threads();

  // Exceptions must not escape the parallel region; keep the first one.
  std::exception_ptr failure;
#pragma omp parallel for num_threads(team) schedule(dynamic)
  for (std::ptrdiff_t idx = 0; idx < rows * cols; ++idx) {
    try {
      cells[static_cast<std::size_t>(idx)] = advantage_cell(eps_g_values[static_cast<std::size_t>(idx / cols)],
                                                            eta_values[static_cast<std::size_t>(idx % cols)]);
    } catch (...) {
#pragma omp critical(qreadout_grid_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return cells;
}

std::vector<double> log_spaced(double lo, double hi, int count) {
  if (!(lo > 0.0 && hi > 0.0) || count < 1) throw std::invalid_argument("log_spaced needs positive bounds");
  if (count == 1) return {lo};
  std::vector<double> out(static_cast<std::size_t>(count));
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (int i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = std::exp(a + (b - a) * i / (count - 1));
  out.front() = lo;
  out.back() = hi;
  return out;
}

}  // namespace qreadout
