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

#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "profiled/distribution.hpp"
#include "profiled/mechanisms.hpp"
#include "profiled/quantities.hpp"
#include "profiled/rng.hpp"

namespace profiled {

/// How the prediction v_hat is generated from the profiled agent's value.
struct PredictionModel {
  enum class Kind { Correct, Independent, CyclicShift, PessimisticWorstCase };

  Kind kind = Kind::Correct;
  double epsilon = 0.0;  // CyclicShift only

  static PredictionModel correct() { return {Kind::Correct, 0.0}; }
  static PredictionModel independent() { return {Kind::Independent, 0.0}; }
  static PredictionModel cyclic_shift(double eps) {
    if (!(eps > 0.0 && eps < 1.0)) throw DomainError("cyclic shift needs epsilon in (0, 1)");
    return {Kind::CyclicShift, eps};
  }
  // v_hat ~ F independently and M_oc's profiled agent never buys: the
  // accounting behind the pessimistic robustness bound.
  static PredictionModel pessimistic() { return {Kind::PessimisticWorstCase, 0.0}; }
};

inline std::string to_string(const PredictionModel& m) {
  switch (m.kind) {
    case PredictionModel::Kind::Correct: return "correct";
    case PredictionModel::Kind::Independent: return "independent";
    case PredictionModel::Kind::CyclicShift: return "shift:" + detail::fmt_real(m.epsilon);
    case PredictionModel::Kind::PessimisticWorstCase: return "pessimistic";
  }
  return "?";
}

inline PredictionModel parse_prediction(std::string_view s) {
  if (s == "correct") return PredictionModel::correct();
  if (s == "independent") return PredictionModel::independent();
  if (s == "pessimistic") return PredictionModel::pessimistic();
  if (s.starts_with("shift:")) {
    const std::string num(s.substr(6));
    std::size_t used = 0;
    double eps = 0.0;
    try {
      eps = std::stod(num, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != num.size())
      throw ParseError("bad shift epsilon '" + num + "'");
    return PredictionModel::cyclic_shift(eps);
  }
  throw ParseError("unknown prediction model '" + std::string(s) +
                   "' (expected correct, independent, shift:<eps> or pessimistic)");
}

/// Maps one uniform u in (0, 1) to a prediction; every model consumes
/// exactly one uniform so that trial streams stay aligned.
inline double prediction_from_uniform(const PredictionModel& model, double v_h,
                                      const DistributionModel& d, double u) {
  switch (model.kind) {
    case PredictionModel::Kind::Correct: return v_h;
    case PredictionModel::Kind::Independent:
    case PredictionModel::Kind::PessimisticWorstCase: return d.from_uniform(u);
    case PredictionModel::Kind::CyclicShift: {
      const auto* uni = d.family_if<family::Uniform>();
      if (!uni || uni->a != 0.0 || uni->b != 1.0)
        throw DomainError("cyclic-shift predictions are defined for Uniform(0,1) only");
      const double eps = model.epsilon;
      if (v_h <= 0.0) return 0.0;
      if (v_h <= 1.0 - eps) return v_h + eps;
      return v_h + eps - 1.0;
    }
  }
  throw DomainError("unknown prediction model");
}

inline double draw_prediction(const PredictionModel& model, double v_h,
                              const DistributionModel& d, RandomState& rng) {
  return prediction_from_uniform(model, v_h, d, rng.uniform());
}

struct SimConfig {
  std::uint64_t trials = 1'000'000;
  std::uint64_t seed = 1;
  bool antithetic = false;
  unsigned workers = 1;  // results do not depend on this
};

struct Estimate {
  double mean = 0.0;
  double std_error = 0.0;
  double ci95_lo = 0.0;
  double ci95_hi = 0.0;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
};

/// Total revenue plus its split by who bought.
struct RevenueBreakdown {
  Estimate total;
  Estimate strategic;
  Estimate profiled;
};

class SimulationError : public DomainError {
 public:
  SimulationError(std::uint64_t trial, const std::string& what)
      : DomainError("trial " + std::to_string(trial) + ": " + what), trial_(trial) {}
  std::uint64_t trial() const noexcept { return trial_; }

 private:
  std::uint64_t trial_;
};

namespace detail {

// Welford accumulator; merge() is Chan et al.'s pairwise update.
struct Moments {
  std::uint64_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++n;
    const double delta = x - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta * (x - mean);
  }

  void merge(const Moments& o) {
    if (o.n == 0) return;
    if (n == 0) {
      *this = o;
      return;
    }
    const double na = static_cast<double>(n), nb = static_cast<double>(o.n);
    const double delta = o.mean - mean;
    const double total = na + nb;
    mean += delta * nb / total;
    m2 += o.m2 + delta * delta * na * nb / total;
    n += o.n;
  }
};

struct BlockStats {
  Moments total, strategic, profiled;
};

inline constexpr std::uint64_t kBlockTrials = 1u << 14;

struct TrialRevenue {
  double total, strategic, profiled;
};

// Per-trial stream order: v_s, v_h, prediction noise, z.
inline TrialRevenue run_trial(const DistributionModel& d, const ReservePrices& prices,
                              MechanismKind kind, const PredictionModel& model,
                              const double (&u)[4]) {
  const double v_s = d.from_uniform(u[0]);
  const double v_h = d.from_uniform(u[1]);
  const double v_hat = prediction_from_uniform(model, v_h, d, u[2]);
  const double z = d.from_uniform(u[3]);
  Outcome o = run_mechanism(d, prices, kind, v_s, v_hat, v_h, z);
  if (kind == MechanismKind::Moc &&
      model.kind == PredictionModel::Kind::PessimisticWorstCase && o.winner == Winner::Profiled) {
    o.winner = Winner::NoSale;
    o.payment = 0.0;
  }
  return {o.payment, o.winner == Winner::Strategic ? o.payment : 0.0,
          o.winner == Winner::Profiled ? o.payment : 0.0};
}

inline BlockStats run_block(const DistributionModel& d, const ReservePrices& prices,
                            MechanismKind kind, const PredictionModel& model,
                            const SimConfig& cfg, std::uint64_t block) {
  BlockStats stats;
  RandomState rng = RandomState::substream(cfg.seed, block);
  const std::uint64_t first = block * kBlockTrials;
  const std::uint64_t last = std::min(cfg.trials, first + kBlockTrials);
  const std::uint64_t step = cfg.antithetic ? 2 : 1;
  for (std::uint64_t t = first; t < last; t += step) {
    double u[4];
    for (double& x : u) x = rng.uniform();
    try {
      TrialRevenue r = run_trial(d, prices, kind, model, u);
      if (cfg.antithetic) {
        const double w[4] = {1.0 - u[0], 1.0 - u[1], 1.0 - u[2], 1.0 - u[3]};
        const TrialRevenue s = run_trial(d, prices, kind, model, w);
        r = {0.5 * (r.total + s.total), 0.5 * (r.strategic + s.strategic),
             0.5 * (r.profiled + s.profiled)};
      }
      stats.total.add(r.total);
      stats.strategic.add(r.strategic);
      stats.profiled.add(r.profiled);
    } catch (const DomainError& e) {
      throw SimulationError(t, e.what());
    }
  }
  return stats;
}

inline Estimate to_estimate(const Moments& m, const SimConfig& cfg) {
  Estimate e;
  e.mean = m.mean;
  e.std_error = m.n > 1 ? std::sqrt(m.m2 / static_cast<double>(m.n - 1) / static_cast<double>(m.n))
                        : 0.0;
  e.ci95_lo = e.mean - 1.96 * e.std_error;
  e.ci95_hi = e.mean + 1.96 * e.std_error;
  e.trials = cfg.trials;
  e.seed = cfg.seed;
  return e;
}

}  // namespace detail

/// Seeded Monte Carlo estimate of a mechanism's expected revenue.
///
/// Each trial draws v_s, v_h ~ F, the prediction, and z ~ F (always all
/// four, in that order); the bidder bids truthfully. Trials are grouped in
/// fixed blocks of 2^14, each with its own substream, and block statistics
/// are merged in block order, so the result is bit-identical for any
/// number of workers. With `antithetic`, trials come in (u, 1 - u) pairs
/// and the standard error is computed from pair means.
inline RevenueBreakdown simulate(const DistributionModel& d, MechanismKind kind,
                                 const PredictionModel& model, const SimConfig& cfg) {
  if (cfg.trials < 1) throw DomainError("trials must be at least 1");
  if (cfg.antithetic && cfg.trials % 2 != 0)
    throw DomainError("antithetic sampling needs an even number of trials");
  if (model.kind == PredictionModel::Kind::CyclicShift) {
    const auto* uni = d.family_if<family::Uniform>();
    if (!uni || uni->a != 0.0 || uni->b != 1.0)
      throw DomainError("cyclic-shift predictions are defined for Uniform(0,1) only");
  }
  const ReservePrices prices = ReservePrices::of(d);
  const std::uint64_t blocks = (cfg.trials + detail::kBlockTrials - 1) / detail::kBlockTrials;
  std::vector<detail::BlockStats> results(blocks);
  std::vector<std::exception_ptr> errors(blocks);

  const unsigned workers =
      static_cast<unsigned>(std::clamp<std::uint64_t>(cfg.workers, 1, blocks));
  std::atomic<std::uint64_t> next{0};
  auto work = [&] {
    for (std::uint64_t b = next++; b < blocks; b = next++) {
      try {
        results[b] = detail::run_block(d, prices, kind, model, cfg, b);
      } catch (...) {
        errors[b] = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned i = 0; i < workers; ++i) pool.emplace_back(work);
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  detail::BlockStats all;
  for (const auto& r : results) {
    all.total.merge(r.total);
    all.strategic.merge(r.strategic);
    all.profiled.merge(r.profiled);
  }
  return {detail::to_estimate(all.total, cfg), detail::to_estimate(all.strategic, cfg),
          detail::to_estimate(all.profiled, cfg)};
}

inline Estimate estimate_revenue(const DistributionModel& d, MechanismKind kind,
                                 const PredictionModel& model, const SimConfig& cfg) {
  return simulate(d, kind, model, cfg).total;
}

/// benchmark(d) / simulated revenue: consistency under Correct predictions,
/// a robustness lower bound under adversarial ones.
inline double estimate_ratio(const DistributionModel& d, MechanismKind kind,
                             const PredictionModel& model, const SimConfig& cfg,
                             const Quadrature& q = {}) {
  const Estimate e = estimate_revenue(d, kind, model, cfg);
  if (!(e.mean > 0.0)) throw DomainError("simulated revenue is not positive; ratio undefined");
  return benchmark(d, q).value / e.mean;
}

}  // namespace profiled
