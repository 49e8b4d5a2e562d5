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

#include "qreadout/distributions.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include "qreadout/outcome_integral.h"

namespace qreadout {
namespace detail {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kLogSqrt2Pi = 0.91893853320467274178;  // ln sqrt(2 pi)

double log_add_exp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(-std::abs(a - b)));
}

double gaussian_log_pdf(double o, double mean, double sigma) {
  const double z = (o - mean) / sigma;
  return -0.5 * z * z - std::log(sigma) - kLogSqrt2Pi;
}

std::string format_number(double x) {
  std::ostringstream os;
  os.precision(12);
  os << x;
  return os.str();
}

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

}  // namespace

/// Family-specific behaviour behind OutcomePair. `a` is always the
/// unswapped eigenvalue.
class PairModel {
 public:
  virtual ~PairModel() = default;
  virtual std::string family() const = 0;
  virtual std::string parameters() const = 0;
  virtual Support support() const = 0;
  virtual bool in_support(Outcome o) const = 0;
  virtual double log_density(Eigenvalue a, Outcome o) const = 0;
  virtual Outcome sample(Eigenvalue a, Rng& rng) const = 0;
  virtual double lambda_clamp() const { return std::numeric_limits<double>::infinity(); }
  virtual double scale() const { return 1.0; }

  std::span<const Atom> atoms() const { return atoms_; }
  std::span<const double> breakpoints() const { return breakpoints_; }

 protected:
  std::vector<Atom> atoms_;
  std::vector<double> breakpoints_;
};

namespace {

void add_gaussian_breakpoints(std::vector<double>& out, double mean, double sigma) {
  for (double k : {-8.0, -4.0, -2.0, -1.0, 0.0, 1.0, 2.0, 4.0, 8.0}) out.push_back(mean + k * sigma);
}

void finalize_breakpoints(std::vector<double>& out) {
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
}

class MixtureModel : public PairModel {
 public:
  MixtureModel(std::string family, std::string params, std::vector<GaussianComponent> plus,
               std::vector<GaussianComponent> minus)
      : family_(std::move(family)), params_(std::move(params)), plus_(std::move(plus)), minus_(std::move(minus)) {
    require(!plus_.empty() && !minus_.empty(), "gaussian mixture needs at least one component per eigenvalue");
    normalize(plus_);
    normalize(minus_);
    double width = 0.0;
    for (const auto* comps : {&plus_, &minus_}) {
      for (const auto& c : *comps) {
        add_gaussian_breakpoints(breakpoints_, c.mean, c.sigma);
        width = std::max({width, c.sigma, std::abs(c.mean)});
      }
    }
    breakpoints_.push_back(0.0);
    finalize_breakpoints(breakpoints_);
    scale_ = std::max(width, 1e-3);
  }

  std::string family() const override { return family_; }
  std::string parameters() const override { return params_; }
  Support support() const override { return Support::kContinuous; }
  bool in_support(Outcome o) const override { return std::isfinite(o); }
  double scale() const override { return scale_; }

  double log_density(Eigenvalue a, Outcome o) const override {
    if (!in_support(o)) throw std::domain_error("outcome is not a finite real number");
    const auto& comps = a == Eigenvalue::kPlus ? plus_ : minus_;
    double acc = kNegInf;
    for (const auto& c : comps) {
      if (c.weight == 0.0) continue;
      acc = log_add_exp(acc, std::log(c.weight) + gaussian_log_pdf(o, c.mean, c.sigma));
    }
    return acc;
  }

  Outcome sample(Eigenvalue a, Rng& rng) const override {
    const auto& comps = a == Eigenvalue::kPlus ? plus_ : minus_;
    std::size_t pick = 0;
    if (comps.size() > 1) {
      double u = rng.uniform();
      for (pick = 0; pick + 1 < comps.size(); ++pick) {
        if (u < comps[pick].weight) break;
        u -= comps[pick].weight;
      }
    }
    std::normal_distribution<double> normal(comps[pick].mean, comps[pick].sigma);
    return normal(rng);
  }

 private:
  static void normalize(std::vector<GaussianComponent>& comps) {
    double total = 0.0;
    for (const auto& c : comps) {
      require(c.weight >= 0.0 && std::isfinite(c.weight), "mixture weights must be nonnegative");
      require(c.sigma > 0.0 && std::isfinite(c.sigma), "mixture widths must be positive");
      require(std::isfinite(c.mean), "mixture means must be finite");
      total += c.weight;
    }
    require(total > 0.0, "mixture weights must not all vanish");
    for (auto& c : comps) c.weight /= total;
  }

  std::string family_;
  std::string params_;
  std::vector<GaussianComponent> plus_;
  std::vector<GaussianComponent> minus_;
  double scale_ = 1.0;
};

// Kept separate from MixtureModel so that eta = 0 reproduces the plain
// Gaussian log-density bit for bit.
class ConversionModel : public PairModel {
 public:
  ConversionModel(double r, double eta) : r_(r), eta_(eta), sigma_(1.0 / std::sqrt(r)) {
    add_gaussian_breakpoints(breakpoints_, 1.0, sigma_);
    add_gaussian_breakpoints(breakpoints_, -1.0, sigma_);
    breakpoints_.push_back(0.0);
    finalize_breakpoints(breakpoints_);
  }

  std::string family() const override { return eta_ == 0.0 ? "gaussian" : "gaussian_conversion"; }
  std::string parameters() const override {
    return eta_ == 0.0 ? "r=" + format_number(r_) : "r=" + format_number(r_) + " eta=" + format_number(eta_);
  }
  Support support() const override { return Support::kContinuous; }
  bool in_support(Outcome o) const override { return std::isfinite(o); }
  double scale() const override { return std::max(1.0, sigma_); }

  double log_density(Eigenvalue a, Outcome o) const override {
    if (!in_support(o)) throw std::domain_error("outcome is not a finite real number");
    const double mean = sign_of(a);
    const double norm = 0.5 * std::log(r_) - kLogSqrt2Pi;
    const double right = -0.5 * r_ * (o - mean) * (o - mean) + norm;
    if (eta_ == 0.0) return right;
    const double wrong = -0.5 * r_ * (o + mean) * (o + mean) + norm;
    return log_add_exp(std::log1p(-eta_) + right, std::log(eta_) + wrong);
  }

  Outcome sample(Eigenvalue a, Rng& rng) const override {
    double mean = sign_of(a);
    if (eta_ > 0.0 && rng.uniform() < eta_) mean = -mean;
    std::normal_distribution<double> normal(mean, sigma_);
    return normal(rng);
  }

 private:
  double r_;
  double eta_;
  double sigma_;
};

class CauchyModel : public PairModel {
 public:
  explicit CauchyModel(double gamma) : gamma_(gamma) {
    for (double mean : {-1.0, 1.0}) {
      for (double k : {-4.0, -1.0, 0.0, 1.0, 4.0}) breakpoints_.push_back(mean + k * gamma_);
    }
    breakpoints_.push_back(0.0);
    finalize_breakpoints(breakpoints_);
  }

  std::string family() const override { return "cauchy"; }
  std::string parameters() const override { return "gamma=" + format_number(gamma_); }
  Support support() const override { return Support::kContinuous; }
  bool in_support(Outcome o) const override { return std::isfinite(o); }
  double scale() const override { return std::max(1.0, gamma_); }

  double log_density(Eigenvalue a, Outcome o) const override {
    if (!in_support(o)) throw std::domain_error("outcome is not a finite real number");
    const double z = (o - sign_of(a)) / gamma_;
    return -std::log(std::numbers::pi * gamma_) - std::log1p(z * z);
  }

  Outcome sample(Eigenvalue a, Rng& rng) const override {
    std::cauchy_distribution<double> cauchy(sign_of(a), gamma_);
    return cauchy(rng);
  }

 private:
  double gamma_;
};

class PoissonModel : public PairModel {
 public:
  PoissonModel(double mu_plus, double mu_minus) : mu_plus_(mu_plus), mu_minus_(mu_minus) {
    // Enumerate counts until the remaining tail of both distributions is
    // below 1e-15 of the accumulated mass.
    const double mu_max = std::max(mu_plus_, mu_minus_);
    double accumulated = 0.0;
    for (long long k = 0;; ++k) {
      const double o = static_cast<double>(k);
      const double term = std::exp(log_density(Eigenvalue::kPlus, o)) + std::exp(log_density(Eigenvalue::kMinus, o));
      accumulated += term;
      atoms_.push_back({o, 1.0});
      if (o + 1.0 > mu_max) {
        const double tail = term * (o + 1.0) / (o + 1.0 - mu_max);
        if (tail < 1e-15 * accumulated) break;
      }
    }
  }

  std::string family() const override { return "poissonian"; }
  std::string parameters() const override {
    return "mu_plus=" + format_number(mu_plus_) + " mu_minus=" + format_number(mu_minus_);
  }
  Support support() const override { return Support::kDiscreteInteger; }
  bool in_support(Outcome o) const override { return o >= 0.0 && std::isfinite(o) && std::floor(o) == o; }

  double log_density(Eigenvalue a, Outcome o) const override {
    if (!in_support(o)) throw std::domain_error("poissonian outcome must be a nonnegative integer count");
    const double mu = a == Eigenvalue::kPlus ? mu_plus_ : mu_minus_;
    if (mu == 0.0) return o == 0.0 ? 0.0 : kNegInf;
    return o * std::log(mu) - mu - std::lgamma(o + 1.0);
  }

  Outcome sample(Eigenvalue a, Rng& rng) const override {
    const double mu = a == Eigenvalue::kPlus ? mu_plus_ : mu_minus_;
    if (mu == 0.0) return 0.0;
    std::poisson_distribution<long long> poisson(mu);
    return static_cast<double>(poisson(rng));
  }

 private:
  double mu_plus_;
  double mu_minus_;
};

class BinaryModel : public PairModel {
 public:
  BinaryModel(double eps_plus, double eps_minus) : eps_plus_(eps_plus), eps_minus_(eps_minus) {
    atoms_ = {{-1.0, 1.0}, {1.0, 1.0}};
  }

  std::string family() const override { return "binary"; }
  std::string parameters() const override {
    return "eps_plus=" + format_number(eps_plus_) + " eps_minus=" + format_number(eps_minus_);
  }
  Support support() const override { return Support::kBinary; }
  bool in_support(Outcome o) const override { return o == 1.0 || o == -1.0; }

  double log_density(Eigenvalue a, Outcome o) const override {
    if (!in_support(o)) throw std::domain_error("binary outcome must be +1 or -1");
    // Probability of reading the eigenvalue's own sign.
    const double correct = a == Eigenvalue::kPlus ? 1.0 - eps_plus_ : 1.0 - eps_minus_;
    const bool matches = (o > 0.0) == (a == Eigenvalue::kPlus);
    return std::log(matches ? correct : 1.0 - correct);
  }

  Outcome sample(Eigenvalue a, Rng& rng) const override {
    const double flip_probability = a == Eigenvalue::kPlus ? eps_plus_ : eps_minus_;
    const bool flipped = rng.uniform() < flip_probability;
    const double own = sign_of(a);
    return flipped ? -own : own;
  }

 private:
  double eps_plus_;
  double eps_minus_;
};

class EmpiricalModel : public PairModel {
 public:
  EmpiricalModel(const Histogram& plus, const Histogram& minus, double floor, double lambda_max)
      : floor_(floor), lambda_max_(lambda_max) {
    require(floor > 0.0, "empirical floor must be positive");
    require(lambda_max > 0.0, "lambda_max must be positive");
    require(plus.centers.size() >= 2, "empirical histograms need at least two bins");
    require(plus.centers.size() == plus.counts.size() && minus.centers.size() == minus.counts.size(),
            "histogram centers and counts differ in length");
    require(plus.centers.size() == minus.centers.size(), "empirical histograms must share their bins");
    const std::size_t n = plus.centers.size();
    for (std::size_t i = 0; i < n; ++i) {
      const double tol = 1e-12 * std::max(1.0, std::abs(plus.centers[i]));
      require(std::abs(plus.centers[i] - minus.centers[i]) <= tol, "empirical histograms must share their bins");
      require(i == 0 || plus.centers[i] > plus.centers[i - 1], "histogram bin centers must be increasing");
    }
    edges_.resize(n + 1);
    const auto& c = plus.centers;
    for (std::size_t i = 1; i < n; ++i) edges_[i] = 0.5 * (c[i - 1] + c[i]);
    edges_[0] = c[0] - 0.5 * (c[1] - c[0]);
    edges_[n] = c[n - 1] + 0.5 * (c[n - 1] - c[n - 2]);

    log_plus_ = log_densities(plus.counts);
    log_minus_ = log_densities(minus.counts);
    cumulative_plus_ = cumulative(log_plus_);
    cumulative_minus_ = cumulative(log_minus_);
    for (std::size_t i = 0; i < n; ++i) atoms_.push_back({c[i], edges_[i + 1] - edges_[i]});
    bins_ = n;
  }

  std::string family() const override { return "empirical"; }
  std::string parameters() const override {
    return "bins=" + std::to_string(bins_) + " floor=" + format_number(floor_) +
           " lambda_max=" + format_number(lambda_max_);
  }
  Support support() const override { return Support::kContinuous; }
  bool in_support(Outcome o) const override { return o >= edges_.front() && o <= edges_.back(); }
  double lambda_clamp() const override { return lambda_max_; }

  double log_density(Eigenvalue a, Outcome o) const override {
    if (!in_support(o)) throw std::domain_error("outcome lies outside the histogram range");
    const auto& logs = a == Eigenvalue::kPlus ? log_plus_ : log_minus_;
    return logs[bin_of(o)];
  }

  Outcome sample(Eigenvalue a, Rng& rng) const override {
    const auto& cdf = a == Eigenvalue::kPlus ? cumulative_plus_ : cumulative_minus_;
    const double u = rng.uniform();
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    const std::size_t bin = std::min<std::size_t>(static_cast<std::size_t>(it - cdf.begin()), bins_ - 1);
    const double v = rng.uniform();
    return edges_[bin] + v * (edges_[bin + 1] - edges_[bin]);
  }

 private:
  std::vector<double> log_densities(const std::vector<double>& counts) const {
    double total = 0.0;
    for (double n : counts) {
      require(n >= 0.0 && std::isfinite(n), "histogram counts must be nonnegative");
      total += n;
    }
    require(total > 0.0, "histogram is empty");
    std::vector<double> mass(counts.size());
    double floored_total = 0.0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
      mass[i] = counts[i] > 0.0 ? counts[i] : floor_ * total;
      floored_total += mass[i];
    }
    std::vector<double> out(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i) {
      out[i] = std::log(mass[i] / floored_total) - std::log(edges_[i + 1] - edges_[i]);
    }
    return out;
  }

  std::vector<double> cumulative(const std::vector<double>& logs) const {
    std::vector<double> cdf(logs.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < logs.size(); ++i) {
      acc += std::exp(logs[i]) * (edges_[i + 1] - edges_[i]);
      cdf[i] = acc;
    }
    for (double& x : cdf) x /= acc;
    return cdf;
  }

  std::size_t bin_of(double o) const {
    auto it = std::upper_bound(edges_.begin(), edges_.end(), o);
    const std::ptrdiff_t idx = (it - edges_.begin()) - 1;
    return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(idx, 0, static_cast<std::ptrdiff_t>(bins_) - 1));
  }

  double floor_;
  double lambda_max_;
  std::size_t bins_ = 0;
  std::vector<double> edges_;
  std::vector<double> log_plus_;
  std::vector<double> log_minus_;
  std::vector<double> cumulative_plus_;
  std::vector<double> cumulative_minus_;
};

}  // namespace
}  // namespace detail

OutcomePair OutcomePair::gaussian(double r) {
  detail::require(r > 0.0 && std::isfinite(r), "gaussian: r must be positive");
  return OutcomePair(std::make_shared<detail::ConversionModel>(r, 0.0), false);
}

OutcomePair OutcomePair::poissonian(double mu_plus, double mu_minus) {
  detail::require(mu_plus >= 0.0 && mu_minus >= 0.0 && std::isfinite(mu_plus) && std::isfinite(mu_minus),
                  "poissonian: means must be nonnegative");
  return OutcomePair(std::make_shared<detail::PoissonModel>(mu_plus, mu_minus), false);
}

OutcomePair OutcomePair::cauchy(double gamma) {
  detail::require(gamma > 0.0 && std::isfinite(gamma), "cauchy: gamma must be positive");
  return OutcomePair(std::make_shared<detail::CauchyModel>(gamma), false);
}

OutcomePair OutcomePair::gaussian_with_conversion(double r, double eta) {
  detail::require(r > 0.0 && std::isfinite(r), "gaussian_conversion: r must be positive");
  detail::require(eta >= 0.0 && eta <= 0.5, "gaussian_conversion: eta must lie in [0, 1/2]");
  return OutcomePair(std::make_shared<detail::ConversionModel>(r, eta), false);
}

OutcomePair OutcomePair::binary(double eps_plus, double eps_minus) {
  detail::require(eps_plus >= 0.0 && eps_plus <= 1.0 && eps_minus >= 0.0 && eps_minus <= 1.0,
                  "binary: error probabilities must lie in [0, 1]");
  return OutcomePair(std::make_shared<detail::BinaryModel>(eps_plus, eps_minus), false);
}

OutcomePair OutcomePair::empirical(const Histogram& plus, const Histogram& minus, double floor, double lambda_max) {
  return OutcomePair(std::make_shared<detail::EmpiricalModel>(plus, minus, floor, lambda_max), false);
}

OutcomePair OutcomePair::gaussian_mixture(std::vector<GaussianComponent> plus, std::vector<GaussianComponent> minus) {
  std::ostringstream params;
  auto describe = [&](const char* tag, const std::vector<GaussianComponent>& comps) {
    params << tag << "=[";
    for (std::size_t i = 0; i < comps.size(); ++i) {
      if (i) params << ";";
      params << detail::format_number(comps[i].weight) << ":" << detail::format_number(comps[i].mean) << ":"
             << detail::format_number(comps[i].sigma);
    }
    params << "]";
  };
  describe("plus", plus);
  params << " ";
  describe("minus", minus);
  return OutcomePair(
      std::make_shared<detail::MixtureModel>("gaussian_mixture", params.str(), std::move(plus), std::move(minus)),
      false);
}

Support OutcomePair::support() const { return model_->support(); }
std::string OutcomePair::family() const { return model_->family(); }

std::string OutcomePair::describe() const {
  return model_->family() + " " + model_->parameters() + (swapped_ ? " swapped" : "");
}

bool OutcomePair::in_support(Outcome o) const { return model_->in_support(o); }

double OutcomePair::log_density(Eigenvalue a, Outcome o) const { return model_->log_density(resolve(a), o); }

double OutcomePair::log_likelihood_ratio(Outcome o) const {
  const double lambda = log_density(Eigenvalue::kPlus, o) - log_density(Eigenvalue::kMinus, o);
  const double clamp = model_->lambda_clamp();
  return std::isfinite(clamp) ? std::clamp(lambda, -clamp, clamp) : lambda;
}

Outcome OutcomePair::sample(Eigenvalue a, Rng& rng) const { return model_->sample(resolve(a), rng); }

bool OutcomePair::enumerable() const { return !model_->atoms().empty(); }
std::span<const Atom> OutcomePair::atoms() const { return model_->atoms(); }
std::span<const double> OutcomePair::breakpoints() const { return model_->breakpoints(); }
double OutcomePair::scale() const { return model_->scale(); }

OutcomePair OutcomePair::swapped() const { return OutcomePair(model_, !swapped_); }

namespace {

// Splits the theta line into segments on which lambda has constant sign.
// Sign changes are located on a dense grid and refined by bisection.
struct SignSegment {
  double lo;
  double hi;
  int sign;
};

std::vector<SignSegment> lambda_sign_segments(const OutcomePair& pair) {
  const double w = pair.scale();
  auto lambda_sign = [&](double theta) {
    const double lam = pair.log_likelihood_ratio(w * std::tan(theta));
    if (std::isnan(lam)) return 0;
    return lam > 0.0 ? 1 : (lam < 0.0 ? -1 : 0);
  };

  std::vector<double> grid = detail::theta_edges(pair);
  constexpr int kPerPanel = 256;
  std::vector<double> fine;
  for (std::size_t p = 0; p + 1 < grid.size(); ++p) {
    for (int i = 0; i < kPerPanel; ++i) fine.push_back(grid[p] + (grid[p + 1] - grid[p]) * i / kPerPanel);
  }
  fine.push_back(grid.back());

  std::vector<double> cuts = {fine.front()};
  for (std::size_t i = 1; i + 1 < fine.size(); ++i) {
    const int left = lambda_sign(fine[i - 1]);
    const int right = lambda_sign(fine[i]);
    if (left == right) continue;
    double lo = fine[i - 1];
    double hi = fine[i];
    for (int it = 0; it < 80 && hi - lo > 1e-15; ++it) {
      const double mid = 0.5 * (lo + hi);
      (lambda_sign(mid) == left ? lo : hi) = mid;
    }
    cuts.push_back(0.5 * (lo + hi));
  }
  cuts.push_back(fine.back());

  std::vector<SignSegment> out;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (!(cuts[i + 1] > cuts[i])) continue;
    out.push_back({cuts[i], cuts[i + 1], lambda_sign(0.5 * (cuts[i] + cuts[i + 1]))});
  }
  return out;
}

}  // namespace

SingleRepetitionErrors single_repetition_errors(const OutcomePair& pair) {
  SingleRepetitionErrors out;
  auto no_observables = [](double, double, double) { return std::array<double, 0>{}; };

  if (pair.enumerable()) {
    for (const Atom& atom : pair.atoms()) {
      const double lam = pair.log_likelihood_ratio(atom.point);
      const double p_plus = std::exp(pair.log_density(Eigenvalue::kPlus, atom.point)) * atom.weight;
      const double p_minus = std::exp(pair.log_density(Eigenvalue::kMinus, atom.point)) * atom.weight;
      if (lam < 0.0) out.eps_plus += p_plus;
      if (lam > 0.0) out.eps_minus += p_minus;
      if (lam == 0.0) {
        out.eps_plus += 0.5 * p_plus;
        out.eps_minus += 0.5 * p_minus;
      }
    }
  } else {
    for (const SignSegment& seg : lambda_sign_segments(pair)) {
      // Panel edges inside the segment keep the breakpoint structure.
      std::vector<double> edges = {seg.lo};
      for (double e : detail::theta_edges(pair)) {
        if (e > seg.lo && e < seg.hi) edges.push_back(e);
      }
      edges.push_back(seg.hi);
      auto mass = [&](Eigenvalue a) {
        const auto res = integrate_outcomes<0>(
            pair, [a](double lp, double lm) { return a == Eigenvalue::kPlus ? lp : lm; }, no_observables, {}, edges);
        return std::exp(res.log_mass);
      };
      if (seg.sign < 0) out.eps_plus += mass(Eigenvalue::kPlus);
      if (seg.sign > 0) out.eps_minus += mass(Eigenvalue::kMinus);
      if (seg.sign == 0) {
        out.eps_plus += 0.5 * mass(Eigenvalue::kPlus);
        out.eps_minus += 0.5 * mass(Eigenvalue::kMinus);
      }
    }
  }
  out.eps = 0.5 * (out.eps_plus + out.eps_minus);
  return out;
}

}  // namespace qreadout
