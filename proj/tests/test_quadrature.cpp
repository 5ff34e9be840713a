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

#include <cmath>
#include <limits>

#include "profiled/errors.hpp"
#include "profiled/quadrature.hpp"

namespace {

using profiled::integrate;
using profiled::Quadrature;

TEST(Quadrature, Examples) {
  const auto lin = integrate([](double z) { return z; }, 0.0, 1.0);
  EXPECT_NEAR(lin.value, 0.5, 1e-15);
  EXPECT_LT(lin.error, 1e-9);

  const auto tail = integrate([](double z) { return std::exp(-z); }, 0.0,
                              std::numeric_limits<double>::infinity());
  EXPECT_NEAR(tail.value, 1.0, 1e-10);

  const auto m = integrate([](double z) { return z * std::exp(-2 * z); }, 0.0,
                           std::numeric_limits<double>::infinity());
  EXPECT_NEAR(m.value, 0.25, 1e-10);
}

TEST(Quadrature, ErrorEstimateIsHonest) {
  // A kink defeats a single panel; the reported error must cover the truth.
  const auto r = integrate([](double z) { return std::abs(z - 0.3); }, 0.0, 1.0);
  const double truth = 0.5 * (0.09 + 0.49);
  EXPECT_LE(std::abs(r.value - truth), std::max(r.error, 1e-15));
  EXPECT_LE(r.error, 1e-9 * truth);
}

TEST(Quadrature, BreakpointsAreHonoured) {
  const double bps[] = {0.0, 0.3, 1.0};
  const auto r = integrate([](double z) { return z < 0.3 ? 0.0 : 1.0; },
                           std::span<const double>(bps));
  EXPECT_NEAR(r.value, 0.7, 1e-14);
}

TEST(Quadrature, NonConvergenceCarriesPartialValue) {
  Quadrature q;
  q.max_subdivisions = 3;
  q.relative_tolerance = 1e-14;
  q.absolute_tolerance = 1e-16;
  try {
    integrate([](double z) { return std::sin(1 / (z + 1e-3)); }, 0.0, 1.0, q);
    FAIL() << "expected QuadratureError";
  } catch (const profiled::QuadratureError& e) {
    EXPECT_TRUE(std::isfinite(e.partial_value()));
    EXPECT_GT(e.partial_error(), 0.0);
  }
}

TEST(Quadrature, Validation) {
  Quadrature bad;
  bad.relative_tolerance = 0;
  EXPECT_THROW(bad.validate(), profiled::DomainError);
  bad = {};
  bad.tail_quantile = 1.0;
  EXPECT_THROW(bad.validate(), profiled::DomainError);
  bad = {};
  bad.tail_quantile = 0.4;
  EXPECT_THROW(bad.validate(), profiled::DomainError);
  EXPECT_THROW(integrate([](double z) { return z; }, 1.0, 0.0), profiled::DomainError);
}

TEST(Quadrature, NonFiniteIntegrandIsReported) {
  EXPECT_THROW(integrate([](double) { return std::nan(""); }, 0.0, 1.0),
               profiled::QuadratureError);
}

TEST(Measured, Propagation) {
  const profiled::Measured a{2.0, 0.1}, b{4.0, 0.2};
  const auto s = a + b;
  EXPECT_DOUBLE_EQ(s.value, 6.0);
  EXPECT_DOUBLE_EQ(s.error, 0.30000000000000004);
  const auto d = a - b;
  EXPECT_DOUBLE_EQ(d.value, -2.0);
  EXPECT_NEAR(d.error, 0.3, 1e-15);
  const auto r = profiled::ratio(a, b);
  EXPECT_DOUBLE_EQ(r.value, 0.5);
  EXPECT_NEAR(r.error, 0.1 / 4 + 2 * 0.2 / 16, 1e-15);
}

}  // namespace
