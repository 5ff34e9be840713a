// Copyright 2026 The Profiled Auctions Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "profiled/distribution.hpp"
#include "profiled/rng.hpp"

namespace {

using profiled::DistributionModel;
using profiled::DomainError;

constexpr double kE = std::numbers::e;

std::vector<DistributionModel> families() {
  return {DistributionModel::uniform(0, 1),     DistributionModel::uniform(0.5, 3),
          DistributionModel::exponential(1),    DistributionModel::exponential(2.5),
          DistributionModel::weibull(1, 1),     DistributionModel::weibull(2, 1),
          DistributionModel::weibull(3, 0.5),   DistributionModel::power_tail(1.5),
          DistributionModel::power_tail(3)};
}

TEST(Distribution, CdfSurvivalPdfExamples) {
  const auto u = DistributionModel::uniform(0, 1);
  EXPECT_DOUBLE_EQ(u.pdf(0.3), 1.0);
  EXPECT_DOUBLE_EQ(u.cdf(0.3), 0.3);
  EXPECT_DOUBLE_EQ(u.survival(0.3), 0.7);
  EXPECT_EQ(u.cdf(-1), 0.0);
  EXPECT_EQ(u.cdf(2), 1.0);
  EXPECT_EQ(u.pdf(2), 0.0);

  const auto e = DistributionModel::exponential(1);
  EXPECT_NEAR(e.quantile(1 - 1 / kE), 1.0, 1e-14);
  EXPECT_NEAR(DistributionModel::weibull(2, 1).quantile(1 - 1 / kE), 1.0, 1e-14);
  EXPECT_NEAR(DistributionModel::power_tail(2).survival(1.0), 0.25, 1e-15);
}

TEST(Distribution, QuantileEdges) {
  const auto u = DistributionModel::uniform(0, 2);
  EXPECT_EQ(u.quantile(0), 0.0);
  EXPECT_EQ(u.quantile(1), 2.0);
  EXPECT_THROW(DistributionModel::exponential(1).quantile(1.0), DomainError);
  EXPECT_THROW(u.quantile(-0.1), DomainError);
  EXPECT_THROW(u.quantile(1.1), DomainError);
  EXPECT_THROW(u.cdf(std::nan("")), DomainError);
}

TEST(Distribution, QuantileCdfRoundTrip) {
  profiled::RandomState rng(2024);
  for (const auto& d : families()) {
    for (int i = 0; i < 100; ++i) {
      const double u = rng.uniform();
      EXPECT_NEAR(d.cdf(d.quantile(u)), u, 1e-9) << d.spec() << " u=" << u;
    }
  }
}

TEST(Distribution, HazardExamples) {
  EXPECT_NEAR(DistributionModel::exponential(3).hazard(0.7), 3.0, 1e-12);
  EXPECT_NEAR(DistributionModel::exponential(3).hazard(40), 3.0, 1e-12);
  EXPECT_NEAR(DistributionModel::power_tail(2).hazard(1.0), 1.0, 1e-14);
  EXPECT_NEAR(DistributionModel::uniform(0, 1).hazard(0.5), 2.0, 1e-14);
  EXPECT_THROW(DistributionModel::uniform(0, 1).hazard(1.0), DomainError);
  EXPECT_THROW(DistributionModel::uniform(0, 1).hazard(5.0), DomainError);
}

TEST(Distribution, VirtualValueExamples) {
  EXPECT_NEAR(DistributionModel::uniform(0, 1).virtual_value(0.75), 0.5, 1e-15);
  EXPECT_NEAR(DistributionModel::exponential(1).virtual_value(2.0), 1.0, 1e-15);
  for (double c : {1.5, 2.0, 3.0})
    for (double z : {0.0, 0.4, 7.0})
      EXPECT_NEAR(DistributionModel::power_tail(c).virtual_value(z), z * (1 - 1 / c) - 1 / c,
                  1e-12);
  EXPECT_THROW(DistributionModel::uniform(0, 1).virtual_value(1.5), DomainError);
}

TEST(Distribution, InverseVirtualExamples) {
  EXPECT_NEAR(DistributionModel::exponential(1).inverse_virtual(0), 1.0, 1e-15);
  EXPECT_NEAR(DistributionModel::uniform(0, 1).inverse_virtual(0.25), 0.625, 1e-15);
  EXPECT_NEAR(DistributionModel::power_tail(2).inverse_virtual(0), 1.0, 1e-15);
  // Weibull(2,1): phi(z) = z - 1/(2z).
  EXPECT_NEAR(DistributionModel::weibull(2, 1).inverse_virtual(0.3),
              (0.3 + std::sqrt(0.09 + 2)) / 2, 1e-11);
  // Levels below every virtual value map to the lower end of the support.
  EXPECT_EQ(DistributionModel::uniform(0, 1).inverse_virtual(-5), 0.0);
  EXPECT_EQ(DistributionModel::uniform(1, 2).inverse_virtual(-0.5), 1.0);
  EXPECT_THROW(DistributionModel::uniform(0, 1).inverse_virtual(1.01), DomainError);
}

TEST(Distribution, InverseVirtualIsMinimal) {
  profiled::RandomState rng(99);
  for (const auto& d : families()) {
    const double lo = d.support().lower;
    for (int i = 0; i < 50; ++i) {
      const double y = d.virtual_value(d.quantile(0.02 + 0.96 * rng.uniform()));
      const double z = d.inverse_virtual(y);
      EXPECT_GE(z, std::max(y, lo));
      EXPECT_GE(d.virtual_value(z), y - 1e-9 * std::max(1.0, std::abs(y))) << d.spec();
      const double delta = 1e-6 * std::max(1.0, z);
      if (z - delta > lo) {
        EXPECT_LT(d.virtual_value(z - delta), y) << d.spec() << " y=" << y;
      }
    }
  }
}

TEST(Distribution, VirtualValueBelowValue) {
  for (const auto& d : families())
    for (double u : {1e-6, 0.1, 0.5, 0.9, 1 - 1e-6}) {
      const double z = d.quantile(u);
      EXPECT_LE(d.virtual_value(z), z) << d.spec();
    }
}

TEST(Distribution, MonopolyPriceExamples) {
  EXPECT_NEAR(DistributionModel::uniform(0, 1).monopoly_price(), 0.5, 1e-15);
  EXPECT_NEAR(DistributionModel::exponential(1).monopoly_price(), 1.0, 1e-15);
  EXPECT_NEAR(DistributionModel::weibull(1, 1).monopoly_price(), 1.0, 1e-11);
}

TEST(Distribution, MonopolyPriceMaximisesPostedRevenue) {
  for (const auto& d : families()) {
    const double p = d.monopoly_price();
    const double hi = d.quantile(1 - 1e-9);
    // Coarse grid, then golden-section refinement around the best cell.
    const int n = 4000;
    double best = d.support().lower;
    double best_rev = -1;
    for (int i = 0; i <= n; ++i) {
      const double z = d.support().lower + (hi - d.support().lower) * i / n;
      const double r = z * d.survival(z);
      if (r > best_rev) best_rev = r, best = z;
    }
    const double step = (hi - d.support().lower) / n;
    double a = std::max(d.support().lower, best - step), b = best + step;
    const double g = (std::sqrt(5.0) - 1) / 2;
    for (int it = 0; it < 200; ++it) {
      const double x1 = b - g * (b - a), x2 = a + g * (b - a);
      if (x1 * d.survival(x1) < x2 * d.survival(x2)) a = x1;
      else b = x2;
    }
    EXPECT_NEAR(0.5 * (a + b), p, 1e-6 * std::max(1.0, p)) << d.spec();
  }
}

TEST(Distribution, MhrSellsAboveReserveWithProbabilityOneOverE) {
  for (const auto& d : families()) {
    if (!d.known_mhr()) continue;
    EXPECT_GE(d.survival(d.monopoly_price()), 1 / kE - 1e-12) << d.spec();
  }
}

TEST(Distribution, MhrAndRegularityChecks) {
  EXPECT_TRUE(profiled::check_mhr(DistributionModel::exponential(1), 1000));
  EXPECT_TRUE(profiled::check_mhr(DistributionModel::uniform(0, 1), 1000));
  EXPECT_TRUE(profiled::check_mhr(DistributionModel::weibull(3, 2), 1000));
  EXPECT_FALSE(profiled::check_mhr(DistributionModel::power_tail(1.5), 1000));
  EXPECT_TRUE(profiled::check_regular(DistributionModel::power_tail(1.5), 1000));
  EXPECT_THROW(profiled::check_mhr(DistributionModel::exponential(1), 1), DomainError);
}

TEST(Distribution, ConstructorPreconditions) {
  EXPECT_THROW(DistributionModel::weibull(0.5, 1), DomainError);
  EXPECT_THROW(DistributionModel::weibull(2, 0), DomainError);
  EXPECT_THROW(DistributionModel::exponential(0), DomainError);
  EXPECT_THROW(DistributionModel::exponential(-1), DomainError);
  EXPECT_THROW(DistributionModel::uniform(1, 1), DomainError);
  EXPECT_THROW(DistributionModel::uniform(-1, 1), DomainError);
  EXPECT_THROW(DistributionModel::power_tail(1.0), DomainError);
}

TEST(Distribution, PartialExpectation) {
  const auto e = DistributionModel::exponential(2);
  // E[X 1{X > t}] = (t + 1/rate) e^{-rate t}.
  EXPECT_NEAR(e.partial_expectation(1.5), (1.5 + 0.5) * std::exp(-3.0), 1e-15);
  const auto p = DistributionModel::power_tail(3);
  EXPECT_NEAR(p.partial_expectation(0), 0.5, 1e-14);
  EXPECT_NEAR(DistributionModel::uniform(0, 2).partial_expectation(1), 0.75, 1e-15);
  EXPECT_NEAR(DistributionModel::weibull(1, 1).partial_expectation(1.5), 2.5 * std::exp(-1.5),
              1e-13);
}

TEST(Distribution, SeededSamplingIsDeterministic) {
  const auto d = DistributionModel::weibull(2, 1);
  profiled::RandomState a(7), b(7), c(8);
  bool differs = false;
  for (int i = 0; i < 1000; ++i) {
    const double x = d.sample(a);
    EXPECT_EQ(x, d.sample(b));
    differs = differs || x != d.sample(c);
  }
  EXPECT_TRUE(differs);
}

TEST(Distribution, SamplingMatchesCdf) {
  for (const auto& d : {DistributionModel::exponential(1), DistributionModel::uniform(0, 1),
                        DistributionModel::weibull(2, 1)}) {
    profiled::RandomState rng(11);
    std::vector<double> xs(1'000'000);
    for (auto& x : xs) x = d.sample(rng);
    std::sort(xs.begin(), xs.end());
    double ks = 0;
    const double n = static_cast<double>(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double f = d.cdf(xs[i]);
      ks = std::max({ks, std::abs(f - i / n), std::abs((i + 1) / n - f)});
    }
    EXPECT_LT(ks, 0.005) << d.spec();
  }
}

TEST(Distribution, SpecStrings) {
  EXPECT_EQ(DistributionModel::exponential(1).spec(), "exp:1");
  EXPECT_EQ(DistributionModel::uniform(0, 1).spec(), "uniform:0,1");
  EXPECT_EQ(DistributionModel::weibull(2, 1).spec(), "weibull:2,1");
  EXPECT_EQ(DistributionModel::power_tail(1.5).spec(), "powertail:1.5");
}

TEST(Rng, SubstreamsAreDistinctAndReproducible) {
  auto a = profiled::RandomState::substream(5, 0);
  auto b = profiled::RandomState::substream(5, 1);
  auto a2 = profiled::RandomState::substream(5, 0);
  const double x = a.uniform();
  EXPECT_EQ(x, a2.uniform());
  EXPECT_NE(x, b.uniform());
  for (int i = 0; i < 100000; ++i) {
    const double u = a.uniform();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

}  // namespace
