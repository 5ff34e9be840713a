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
#include <bit>
#include <cmath>
#include <vector>

#include "profiled/quantities.hpp"
#include "profiled/simulation.hpp"

namespace {

using profiled::DistributionModel;
using profiled::MechanismKind;
using profiled::PredictionModel;
using profiled::SimConfig;

SimConfig config(std::uint64_t trials, std::uint64_t seed, unsigned workers = 4) {
  SimConfig c;
  c.trials = trials;
  c.seed = seed;
  c.workers = workers;
  return c;
}

TEST(Prediction, Examples) {
  const auto u = DistributionModel::uniform(0, 1);
  profiled::RandomState rng(1);
  EXPECT_EQ(profiled::draw_prediction(PredictionModel::correct(), 0.42, u, rng), 0.42);
  const auto shift = PredictionModel::cyclic_shift(0.1);
  EXPECT_NEAR(profiled::draw_prediction(shift, 0.95, u, rng), 0.05, 1e-15);
  EXPECT_NEAR(profiled::draw_prediction(shift, 0.5, u, rng), 0.6, 1e-15);
  EXPECT_NEAR(profiled::draw_prediction(shift, 0.9, u, rng), 1.0, 1e-15);
  EXPECT_EQ(profiled::draw_prediction(shift, 0.0, u, rng), 0.0);
}

TEST(Prediction, Validation) {
  EXPECT_THROW(PredictionModel::cyclic_shift(0.0), profiled::DomainError);
  EXPECT_THROW(PredictionModel::cyclic_shift(1.0), profiled::DomainError);
  profiled::RandomState rng(1);
  EXPECT_THROW(profiled::draw_prediction(PredictionModel::cyclic_shift(0.1), 0.5,
                                         DistributionModel::exponential(1), rng),
               profiled::DomainError);
  EXPECT_THROW(profiled::draw_prediction(PredictionModel::cyclic_shift(0.1), 0.5,
                                         DistributionModel::uniform(0, 2), rng),
               profiled::DomainError);
}

TEST(Prediction, Parse) {
  EXPECT_EQ(profiled::parse_prediction("correct").kind, PredictionModel::Kind::Correct);
  EXPECT_EQ(profiled::parse_prediction("independent").kind, PredictionModel::Kind::Independent);
  EXPECT_EQ(profiled::parse_prediction("pessimistic").kind,
            PredictionModel::Kind::PessimisticWorstCase);
  const auto s = profiled::parse_prediction("shift:0.05");
  EXPECT_EQ(s.kind, PredictionModel::Kind::CyclicShift);
  EXPECT_DOUBLE_EQ(s.epsilon, 0.05);
  EXPECT_EQ(profiled::to_string(s), "shift:0.05");
  EXPECT_THROW(profiled::parse_prediction("shift:x"), profiled::ParseError);
  EXPECT_THROW(profiled::parse_prediction("oracle"), profiled::ParseError);
}

double ks_against(std::vector<double> xs, const DistributionModel& d) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double worst = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = d.cdf(xs[i]);
    worst = std::max({worst, std::abs(f - i / n), std::abs((i + 1) / n - f)});
  }
  return worst;
}

TEST(Prediction, MarginalMatchesDistribution) {
  const auto u = DistributionModel::uniform(0, 1);
  const auto e = DistributionModel::exponential(1);
  struct Case {
    PredictionModel model;
    DistributionModel d;
  };
  const std::vector<Case> cases{{PredictionModel::correct(), e},
                                {PredictionModel::independent(), e},
                                {PredictionModel::pessimistic(), e},
                                {PredictionModel::cyclic_shift(0.05), u},
                                {PredictionModel::cyclic_shift(0.3), u}};
  for (const auto& c : cases) {
    profiled::RandomState rng(5);
    std::vector<double> xs(100'000);
    for (auto& x : xs) x = profiled::draw_prediction(c.model, c.d.sample(rng), c.d, rng);
    EXPECT_LT(ks_against(xs, c.d), 0.01) << profiled::to_string(c.model);
  }
}

TEST(Simulation, EstimateFields) {
  const auto e = profiled::estimate_revenue(DistributionModel::uniform(0, 1), MechanismKind::Mpi,
                                            PredictionModel::independent(), config(50'000, 9));
  EXPECT_EQ(e.trials, 50'000u);
  EXPECT_EQ(e.seed, 9u);
  EXPECT_GT(e.std_error, 0);
  EXPECT_NEAR(e.ci95_lo, e.mean - 1.96 * e.std_error, 1e-15);
  EXPECT_NEAR(e.ci95_hi, e.mean + 1.96 * e.std_error, 1e-15);
}

TEST(Simulation, BitIdenticalAcrossWorkerCounts) {
  const auto d = DistributionModel::weibull(2, 1);
  for (bool anti : {false, true}) {
    SimConfig c = config(100'000, 123, 1);
    c.antithetic = anti;
    const auto a = profiled::simulate(d, MechanismKind::M1, PredictionModel::correct(), c);
    c.workers = 7;
    const auto b = profiled::simulate(d, MechanismKind::M1, PredictionModel::correct(), c);
    EXPECT_EQ(std::bit_cast<std::uint64_t>(a.total.mean), std::bit_cast<std::uint64_t>(b.total.mean));
    EXPECT_EQ(std::bit_cast<std::uint64_t>(a.total.std_error),
              std::bit_cast<std::uint64_t>(b.total.std_error));
    EXPECT_EQ(a.profiled.mean, b.profiled.mean);
  }
}

TEST(Simulation, SeedChangesResult) {
  const auto d = DistributionModel::exponential(1);
  const auto a = profiled::estimate_revenue(d, MechanismKind::M2, PredictionModel::correct(), config(20'000, 1));
  const auto b = profiled::estimate_revenue(d, MechanismKind::M2, PredictionModel::correct(), config(20'000, 2));
  EXPECT_NE(a.mean, b.mean);
}

TEST(Simulation, PredictionIgnoringIsInsensitiveToPredictions) {
  const auto d = DistributionModel::exponential(1);
  const auto c = config(200'000, 31);
  const auto a = profiled::estimate_revenue(d, MechanismKind::Mpi, PredictionModel::correct(), c);
  const auto b = profiled::estimate_revenue(d, MechanismKind::Mpi, PredictionModel::independent(), c);
  const auto p = profiled::estimate_revenue(d, MechanismKind::Mpi, PredictionModel::pessimistic(), c);
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(a.std_error, b.std_error);
  EXPECT_EQ(a.mean, p.mean);
}

struct Agreement {
  MechanismKind kind;
  const char* dist;
};

class MonteCarloVsQuadrature : public ::testing::TestWithParam<Agreement> {};

DistributionModel by_name(const std::string& s) {
  if (s == "uniform") return DistributionModel::uniform(0, 1);
  if (s == "exp") return DistributionModel::exponential(1);
  return DistributionModel::weibull(2, 1);
}

double quadrature_revenue(const DistributionModel& d, MechanismKind k) {
  switch (k) {
    case MechanismKind::Moc: return profiled::benchmark(d).value;
    case MechanismKind::Mpi: return profiled::rev_mpi(d).value;
    case MechanismKind::M1: return profiled::rev_m1(d).value;
    case MechanismKind::M2: return profiled::rev_m2(d).value;
  }
  return 0;
}

TEST_P(MonteCarloVsQuadrature, WithinThreeStandardErrors) {
  const auto d = by_name(GetParam().dist);
  const auto e = profiled::estimate_revenue(d, GetParam().kind, PredictionModel::correct(),
                                            config(1'000'000, 2026));
  EXPECT_LE(std::abs(e.mean - quadrature_revenue(d, GetParam().kind)), 3 * e.std_error)
      << "mean " << e.mean << " +- " << e.std_error;
}

INSTANTIATE_TEST_SUITE_P(
    Grid, MonteCarloVsQuadrature,
    ::testing::Values(Agreement{MechanismKind::Moc, "uniform"}, Agreement{MechanismKind::Moc, "exp"},
                      Agreement{MechanismKind::Moc, "weibull"}, Agreement{MechanismKind::Mpi, "uniform"},
                      Agreement{MechanismKind::Mpi, "exp"}, Agreement{MechanismKind::Mpi, "weibull"},
                      Agreement{MechanismKind::M1, "uniform"}, Agreement{MechanismKind::M1, "exp"},
                      Agreement{MechanismKind::M1, "weibull"}, Agreement{MechanismKind::M2, "uniform"},
                      Agreement{MechanismKind::M2, "exp"}, Agreement{MechanismKind::M2, "weibull"}),
    [](const auto& info) {
      return std::string(profiled::to_string(info.param.kind)) + "_" + info.param.dist;
    });

TEST(Simulation, ComponentsSplitHonestRevenue) {
  // With correct predictions M_oc collects R^s from the bidder and R^h from the profiled agent.
  const auto d = DistributionModel::uniform(0, 1);
  const auto r = profiled::simulate(d, MechanismKind::Moc, PredictionModel::correct(),
                                    config(1'000'000, 8));
  EXPECT_LE(std::abs(r.strategic.mean - 1.0 / 6), 3 * r.strategic.std_error);
  EXPECT_LE(std::abs(r.profiled.mean - 5.0 / 12), 3 * r.profiled.std_error);
  EXPECT_NEAR(r.strategic.mean + r.profiled.mean, r.total.mean, 1e-12);
}

TEST(Simulation, ConsistencyRatioIsOne) {
  for (const char* name : {"uniform", "exp", "weibull"}) {
    const auto d = by_name(name);
    const auto e = profiled::estimate_revenue(d, MechanismKind::Moc, PredictionModel::correct(),
                                              config(1'000'000, 77));
    const double ratio = profiled::estimate_ratio(d, MechanismKind::Moc, PredictionModel::correct(),
                                                  config(1'000'000, 77));
    EXPECT_NEAR(ratio, 1.0, 3 * e.std_error / e.mean) << name;
  }
}

TEST(Simulation, PessimisticMatchesStrategicRevenue) {
  for (const char* name : {"uniform", "exp", "weibull"}) {
    const auto d = by_name(name);
    const auto e = profiled::estimate_revenue(d, MechanismKind::Moc, PredictionModel::pessimistic(),
                                              config(1'000'000, 4));
    EXPECT_LE(std::abs(e.mean - profiled::rev_strategic(d).value), 3 * e.std_error) << name;
  }
}

TEST(Simulation, PessimisticRobustnessForExponential) {
  const double r = profiled::estimate_ratio(DistributionModel::exponential(1), MechanismKind::Moc,
                                            PredictionModel::pessimistic(), config(10'000'000, 5, 8));
  EXPECT_NEAR(r, 4.291, 0.02 * 4.291);
}

TEST(Simulation, CyclicShiftStarvesProfiledAgent) {
  const auto d = DistributionModel::uniform(0, 1);
  auto r = profiled::simulate(d, MechanismKind::Moc, PredictionModel::cyclic_shift(0.01),
                              config(1'000'000, 6));
  EXPECT_LT(r.profiled.mean, 0.02);
  r = profiled::simulate(d, MechanismKind::Moc, PredictionModel::cyclic_shift(0.05),
                         config(1'000'000, 6));
  EXPECT_LT(r.profiled.mean / r.total.mean, 0.06);
}

TEST(Simulation, AntitheticAgrees) {
  const auto d = DistributionModel::exponential(1);
  SimConfig c = config(1'000'000, 12);
  c.antithetic = true;
  const auto e = profiled::estimate_revenue(d, MechanismKind::M2, PredictionModel::correct(), c);
  EXPECT_LE(std::abs(e.mean - profiled::rev_m2(d).value), 3 * e.std_error);
}

TEST(Simulation, ConfigValidation) {
  const auto d = DistributionModel::uniform(0, 1);
  EXPECT_THROW(profiled::estimate_revenue(d, MechanismKind::Moc, PredictionModel::correct(), config(0, 1)),
               profiled::DomainError);
  SimConfig odd = config(11, 1);
  odd.antithetic = true;
  EXPECT_THROW(profiled::estimate_revenue(d, MechanismKind::Moc, PredictionModel::correct(), odd),
               profiled::DomainError);
  EXPECT_THROW(profiled::estimate_revenue(DistributionModel::exponential(1), MechanismKind::Moc,
                                          PredictionModel::cyclic_shift(0.1), config(10, 1)),
               profiled::DomainError);
}

}  // namespace
