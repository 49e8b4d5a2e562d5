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

#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "oracles.h"
#include "qreadout/chernoff.h"

namespace qreadout {
namespace {

// K-(s) for two Poisson laws, in closed form.
double poisson_cgf(double mp, double mm, double s) {
  return std::pow(mp, s) * std::pow(mm, 1 - s) - s * mp - (1 - s) * mm;
}

double poisson_chernoff(double mp, double mm) {
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 200; ++i) {
    const double a = lo + (hi - lo) / 3, b = hi - (hi - lo) / 3;
    if (poisson_cgf(mp, mm, a) < poisson_cgf(mp, mm, b)) hi = b; else lo = a;
  }
  return -poisson_cgf(mp, mm, 0.5 * (lo + hi));
}

OutcomePair random_mixture_pair(std::mt19937_64& gen) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto side = [&](double centre) {
    std::vector<GaussianComponent> comps;
    const int n = 1 + static_cast<int>(3 * u(gen));
    for (int i = 0; i < n; ++i) comps.push_back({0.05 + u(gen), centre + 2.0 * (u(gen) - 0.5), 0.2 + 1.5 * u(gen)});
    return comps;
  };
  return OutcomePair::gaussian_mixture(side(0.5), side(-0.5));
}

TEST(Cgf, VanishesAtEndpoints) {
  const std::vector<OutcomePair> pairs = {
      OutcomePair::gaussian(2.0), OutcomePair::cauchy(0.5), OutcomePair::poissonian(5, 1),
      OutcomePair::gaussian_with_conversion(4.0, 0.02), OutcomePair::binary(0.1, 0.3)};
  for (const auto& p : pairs) {
    EXPECT_NEAR(cgf(p, 0.0).k_minus, 0.0, 1e-9) << p.describe();
    EXPECT_NEAR(cgf(p, 1.0).k_minus, 0.0, 1e-9) << p.describe();
  }
}

TEST(Cgf, GaussianHalfIsMinusROverTwo) {
  // Means +-1, variance 1/r: the Bhattacharyya coefficient is exp(-r/2).
  for (double r : {0.1, 1.0, 10.0, 50.0}) {
    EXPECT_NEAR(cgf(OutcomePair::gaussian(r), 0.5).k_minus, -r / 2, 1e-12 * std::max(1.0, r));
  }
  // Independent quadrature of sqrt(P+ P-).
  const double r = 3.0;
  const auto g = OutcomePair::gaussian(r);
  const double direct = oracle::integrate_line(
      [&](double o) {
        return std::exp(0.5 * (g.log_density(Eigenvalue::kPlus, o) + g.log_density(Eigenvalue::kMinus, o)));
      },
      {-1.0, 0.0, 1.0});
  EXPECT_NEAR(std::log(direct), -r / 2, 1e-12);
}

TEST(Cgf, PoissonClosedForm) {
  const auto p = OutcomePair::poissonian(7.0, 2.0);
  for (double s : {0.1, 0.37, 0.8}) EXPECT_NEAR(cgf(p, s).k_minus, poisson_cgf(7.0, 2.0, s), 1e-12);
}

TEST(Cgf, CauchyMatchesIndependentQuadrature) {
  const auto c = OutcomePair::cauchy(0.7);
  for (double s : {0.2, 0.5, 0.9}) {
    const double direct = oracle::integrate_line(
        [&](double o) {
          return std::exp(s * c.log_density(Eigenvalue::kPlus, o) + (1 - s) * c.log_density(Eigenvalue::kMinus, o));
        },
        {-1.0, 0.0, 1.0});
    EXPECT_NEAR(cgf(c, s).k_minus, std::log(direct), 1e-10);
  }
}

TEST(Cgf, RejectsOutOfRangeS) { EXPECT_THROW(cgf(OutcomePair::gaussian(1), 1.5), std::domain_error); }

TEST(ChernoffInformation, GaussianFixedPoint) {
  const auto s = chernoff_information(OutcomePair::gaussian(1.0));
  EXPECT_NEAR(s.C, 0.5, 1e-10);
  EXPECT_NEAR(s.s_star, 0.5, 1e-8);
  EXPECT_NEAR(s.alpha, 1.0, 1e-8);
  EXPECT_NEAR(s.k2, 4.0, 1e-8);
  EXPECT_NEAR(s.bhattacharyya, 0.5, 1e-12);
  EXPECT_FALSE(s.degenerate);
}

TEST(ChernoffInformation, GaussianIdentity) {
  for (double r : {0.1, 1.0, 10.0}) {
    EXPECT_NEAR(chernoff_information(OutcomePair::gaussian(r)).C / (r / 2), 1.0, 1e-8) << r;
  }
}

TEST(ChernoffInformation, IdenticalDistributionsAreDegenerate) {
  for (const auto& p : {OutcomePair::poissonian(3, 3), OutcomePair::binary(0.5, 0.5),
                        OutcomePair::gaussian_mixture({{1, 0, 1}}, {{1, 0, 1}}),
                        OutcomePair::gaussian_with_conversion(2.0, 0.5)}) {
    const auto s = chernoff_information(p);
    EXPECT_NEAR(s.C, 0.0, 1e-12) << p.describe();
    EXPECT_NEAR(s.bhattacharyya, 0.0, 1e-12);
    EXPECT_TRUE(s.degenerate);
    EXPECT_TRUE(std::isnan(s.alpha));
  }
}

TEST(ChernoffInformation, SymmetricBinaryClosedForm) {
  const auto s = chernoff_information(OutcomePair::binary(0.2, 0.2));
  const double expect = std::log(1.0 / std::sqrt(4 * 0.2 * 0.8));
  EXPECT_NEAR(expect, 0.22314355131, 1e-10);
  EXPECT_NEAR(s.C, expect, 1e-10);
  EXPECT_NEAR(s.C, oracle::binary_chernoff_by_search(0.2, 0.2), 1e-10);
  EXPECT_NEAR(s.s_star, 0.5, 1e-8);
}

TEST(ChernoffInformation, AsymmetricBinaryMatchesSearch) {
  const auto s = chernoff_information(OutcomePair::binary(0.05, 0.3));
  EXPECT_NEAR(s.C, oracle::binary_chernoff_by_search(0.05, 0.3), 1e-10);
}

TEST(ChernoffInformation, PoissonMatchesClosedForm) {
  for (auto [mp, mm] : {std::pair{5.0, 1.0}, {2.0, 0.5}, {40.0, 25.0}}) {
    EXPECT_NEAR(chernoff_information(OutcomePair::poissonian(mp, mm)).C, poisson_chernoff(mp, mm), 1e-10);
  }
}

TEST(ChernoffInformation, PoissonianReferenceValues) {
  // Means 2 and 1/2.
  const auto s = chernoff_information(OutcomePair::poissonian(2.0, 0.5));
  EXPECT_NEAR(s.C, 0.2533, 5e-5);
  EXPECT_NEAR(s.alpha, 0.9999, 5e-5);
  EXPECT_NEAR(s.s_star, 0.5569, 5e-5);
}

TEST(ChernoffInformation, CauchyReferenceValues) {
  // Scale 1/2.
  const auto s = chernoff_information(OutcomePair::cauchy(0.5));
  EXPECT_NEAR(s.C, 0.4422, 5e-5);
  EXPECT_NEAR(s.alpha, 1.1079, 5e-5);
  EXPECT_NEAR(s.s_star, 0.5, 1e-8);
  EXPECT_NEAR(s.bhattacharyya, s.C, 1e-10);
}

TEST(ChernoffInformation, DisjointSupportsAreInfinitelyDistinguishable) {
  const auto s = chernoff_information(OutcomePair::binary(0.0, 0.0));
  EXPECT_TRUE(std::isinf(s.C));
  EXPECT_TRUE(std::isnan(s.alpha));
}

TEST(ChernoffInformation, OneSidedSupportGivesBoundaryFlag) {
  // P+ is a point mass at 0, P- has full support: inf at s = 1.
  const auto s = chernoff_information(OutcomePair::poissonian(0.0, 2.0));
  EXPECT_NEAR(s.C, 2.0, 1e-9);
  EXPECT_TRUE(s.boundary_optimum);
  EXPECT_TRUE(std::isnan(s.alpha));
}

TEST(ChernoffInformation, SaddleEquationHolds) {
  for (const auto& p : {OutcomePair::poissonian(5, 1), OutcomePair::cauchy(0.3), OutcomePair::binary(0.02, 0.2),
                        OutcomePair::gaussian_with_conversion(6.0, 0.03)}) {
    const auto s = chernoff_information(p);
    EXPECT_NEAR(effective_distribution(p, s.s_star).mean_lambda(), 0.0, 1e-8) << p.describe();
    EXPECT_LE(s.s_tolerance, 1e-10);
  }
}

TEST(ChernoffInformation, AlphaDefinition) {
  const auto p = OutcomePair::poissonian(5, 1);
  const auto s = chernoff_information(p);
  const double st = s.s_star;
  EXPECT_NEAR(s.alpha, 2 * st * st * (1 - st) * (1 - st) * s.k2 / s.C, 1e-12);
}

TEST(EffectiveDistribution, GaussianHalfIsCentredGaussian) {
  const double r = 2.0;
  const auto eff = effective_distribution(OutcomePair::gaussian(r), 0.5);
  for (double o : {-1.0, 0.0, 0.7}) {
    EXPECT_NEAR(eff.log_density(o), 0.5 * std::log(r / (2 * std::numbers::pi)) - r * o * o / 2, 1e-12);
  }
}

TEST(EffectiveDistribution, SymmetricBinaryIsUniform) {
  const auto eff = effective_distribution(OutcomePair::binary(0.15, 0.15), 0.5);
  EXPECT_NEAR(std::exp(eff.log_density(1.0)), 0.5, 1e-14);
  EXPECT_NEAR(std::exp(eff.log_density(-1.0)), 0.5, 1e-14);
}

TEST(EffectiveDistribution, RejectsBoundaryS) {
  EXPECT_THROW(effective_distribution(OutcomePair::gaussian(1), 0.0), std::domain_error);
}

TEST(Cumulants, GaussianLambdaIsGaussian) {
  for (double r : {0.5, 3.0}) {
    const auto k = cumulants_under_eff(OutcomePair::gaussian(r), 0.5, 4);
    ASSERT_EQ(k.size(), 3u);
    EXPECT_NEAR(k[0], 4 * r, 1e-9 * r);
    EXPECT_NEAR(k[1], 0.0, 1e-9 * r);
    EXPECT_NEAR(k[2], 0.0, 1e-8 * r * r);
  }
}

TEST(Cumulants, BinarySecondCumulantMatchesFiniteDifference) {
  const auto p = OutcomePair::binary(0.2, 0.2);
  const double h = 1e-4;
  auto k = [](double s) {
    return std::log(std::pow(0.8, s) * std::pow(0.2, 1 - s) + std::pow(0.2, s) * std::pow(0.8, 1 - s));
  };
  const double fd_closed = (k(0.5 + h) - 2 * k(0.5) + k(0.5 - h)) / (h * h);
  const double fd_lib =
      (cgf(p, 0.5 + h).k_minus - 2 * cgf(p, 0.5).k_minus + cgf(p, 0.5 - h).k_minus) / (h * h);
  const double k2 = cumulants_under_eff(p, 0.5, 2)[0];
  EXPECT_NEAR(k2, fd_closed, 1e-6);
  EXPECT_NEAR(k2, fd_lib, 1e-6);
  EXPECT_NEAR(k2, std::pow(std::log(4.0), 2), 1e-12);
}

TEST(Cumulants, PoissonThirdCumulant) {
  // K(s) = mp^s mm^(1-s) - ..., so K''' = mp^s mm^(1-s) ln(mp/mm)^3.
  const double mp = 5, mm = 1, s = 0.4;
  const auto k = cumulants_under_eff(OutcomePair::poissonian(mp, mm), s, 3);
  const double base = std::pow(mp, s) * std::pow(mm, 1 - s);
  const double L = std::log(mp / mm);
  EXPECT_NEAR(k[0], base * L * L, 1e-10);
  EXPECT_NEAR(k[1], base * L * L * L, 1e-9);
}

TEST(Cumulants, RejectsBadOrder) {
  EXPECT_THROW(cumulants_under_eff(OutcomePair::gaussian(1), 0.5, 5), std::invalid_argument);
}

TEST(SmallC, IdenticalPair) {
  const auto e = small_c_expansion(OutcomePair::poissonian(2, 2));
  EXPECT_NEAR(e.C, 0.0, 1e-15);
  EXPECT_DOUBLE_EQ(e.alpha, 1.0);
  EXPECT_DOUBLE_EQ(e.s_star, 0.5);
}

TEST(SmallC, GaussianSymmetryAndAlpha) {
  const double r = 0.05;
  const auto e = small_c_expansion(OutcomePair::gaussian(r));
  const auto exact = chernoff_information(OutcomePair::gaussian(r));
  EXPECT_EQ(e.s_star, 0.5);
  EXPECT_NEAR(e.alpha / exact.alpha, 1.0, 0.01);
  EXPECT_FALSE(e.unreliable);
}

TEST(SmallC, GaussianRelativeErrorScalesWithR) {
  // Expanding y = 2 tanh(lambda / 2) gives <y^2>/8 = (r/2)(1 - r) + O(r^3),
  // so the relative error shrinks linearly as r -> 0.
  for (double r : {0.05, 0.02, 0.01, 0.002}) {
    const auto e = small_c_expansion(OutcomePair::gaussian(r));
    EXPECT_LE(std::abs(e.C / (r / 2) - 1.0), 1.1 * r) << r;
  }
}

TEST(SmallC, AgreesWithExactForWeakAsymmetricPair) {
  const auto p = OutcomePair::poissonian(10.0, 9.0);
  const auto e = small_c_expansion(p);
  const auto exact = chernoff_information(p);
  // Next-order terms are O(C) relative to the leading one.
  EXPECT_NEAR(e.C / exact.C, 1.0, 2.0 * exact.C);
  EXPECT_NEAR(e.s_star, exact.s_star, 2e-3);
  EXPECT_NEAR(e.alpha, exact.alpha, 2e-3);
}

TEST(SmallC, FlagsLargeC) { EXPECT_TRUE(small_c_expansion(OutcomePair::gaussian(5.0)).unreliable); }

TEST(ChernoffProperties, SwapInvariance) {
  std::mt19937_64 gen(7);
  std::vector<OutcomePair> pairs = {OutcomePair::poissonian(5, 1), OutcomePair::binary(0.05, 0.3),
                                    OutcomePair::gaussian_with_conversion(3.0, 0.1), OutcomePair::cauchy(0.4)};
  for (int i = 0; i < 10; ++i) pairs.push_back(random_mixture_pair(gen));
  for (const auto& p : pairs) {
    const auto a = chernoff_information(p);
    const auto b = chernoff_information(p.swapped());
    EXPECT_NEAR(a.C, b.C, 1e-9) << p.describe();
    EXPECT_NEAR(a.alpha, b.alpha, 1e-9) << p.describe();
    EXPECT_NEAR(a.bhattacharyya, b.bhattacharyya, 1e-9) << p.describe();
    EXPECT_NEAR(a.s_star, 1.0 - b.s_star, 1e-9) << p.describe();
  }
}

TEST(ChernoffProperties, AffineReparameterization) {
  // o -> a o + b maps Gaussian(r) to a single-component mixture.
  for (double r : {0.3, 2.0}) {
    const double sigma = 1.0 / std::sqrt(r);
    const auto base = chernoff_information(OutcomePair::gaussian(r));
    for (auto [a, b] : {std::pair{3.0, -2.0}, {0.1, 5.0}}) {
      const auto mapped = chernoff_information(
          OutcomePair::gaussian_mixture({{1.0, a + b, a * sigma}}, {{1.0, -a + b, a * sigma}}));
      EXPECT_NEAR(mapped.C, base.C, 1e-8);
      EXPECT_NEAR(mapped.s_star, base.s_star, 1e-8);
      EXPECT_NEAR(mapped.alpha, base.alpha, 1e-8);
    }
  }
}

TEST(ChernoffProperties, BoundChainOnRandomMixtures) {
  std::mt19937_64 gen(8);
  for (int i = 0; i < 100; ++i) {
    const auto p = random_mixture_pair(gen);
    const auto s = chernoff_information(p);
    EXPECT_GE(s.C, 0.0);
    EXPECT_LE(s.C / 2, s.bhattacharyya + 1e-12) << p.describe();
    EXPECT_LE(s.bhattacharyya, s.C + 1e-12) << p.describe();
    EXPECT_GE(s.s_star, 0.0);
    EXPECT_LE(s.s_star, 1.0);
  }
}

TEST(ChernoffProperties, CgfIsConvexOnGrid) {
  std::mt19937_64 gen(9);
  std::vector<OutcomePair> pairs = {OutcomePair::cauchy(0.5), OutcomePair::poissonian(2, 0.5),
                                    OutcomePair::binary(0.01, 0.4)};
  for (int i = 0; i < 3; ++i) pairs.push_back(random_mixture_pair(gen));
  for (const auto& p : pairs) {
    std::vector<double> k(101);
    for (int i = 0; i <= 100; ++i) k[i] = cgf(p, i / 100.0).k_minus;
    for (int i = 1; i < 100; ++i) EXPECT_GE(k[i - 1] - 2 * k[i] + k[i + 1], -1e-9) << p.describe() << " i=" << i;
  }
}

TEST(ChernoffProperties, SmallCLimitIsMonotone) {
  double prev_alpha_gap = std::numeric_limits<double>::infinity();
  double prev_s_gap = std::numeric_limits<double>::infinity();
  for (double r : {0.5, 0.1, 0.02}) {
    const auto s = chernoff_information(OutcomePair::gaussian(r));
    const double alpha_gap = std::abs(s.alpha - 1.0), s_gap = std::abs(s.s_star - 0.5);
    EXPECT_LE(alpha_gap, prev_alpha_gap + 1e-9);
    EXPECT_LE(s_gap, prev_s_gap + 1e-9);
    EXPECT_LT(alpha_gap, 1e-6);
    prev_alpha_gap = alpha_gap;
    prev_s_gap = s_gap;
  }
}

TEST(ChernoffProperties, ConversionPairApproachesGaussianAnsatzForSmallR) {
  // An asymmetric pair with shrinking contrast: alpha -> 1 and s* -> 1/2.
  double prev = std::numeric_limits<double>::infinity();
  for (double scale : {1.0, 0.3, 0.1}) {
    const auto s = chernoff_information(OutcomePair::poissonian(5.0 + 5.0 * scale, 5.0));
    const double gap = std::abs(s.alpha - 1.0) + std::abs(s.s_star - 0.5);
    EXPECT_LT(gap, prev);
    prev = gap;
  }
}

}  // namespace
}  // namespace qreadout
