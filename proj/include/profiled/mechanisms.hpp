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

#include <cmath>
#include <optional>
#include <string>
#include <string_view>

#include "profiled/distribution.hpp"
#include "profiled/errors.hpp"

namespace profiled {

enum class MechanismKind { Moc, Mpi, M1, M2 };

inline std::string_view to_string(MechanismKind k) {
  switch (k) {
    case MechanismKind::Moc: return "oc";
    case MechanismKind::Mpi: return "pi";
    case MechanismKind::M1: return "m1";
    case MechanismKind::M2: return "m2";
  }
  return "?";
}

inline MechanismKind parse_mechanism(std::string_view s) {
  if (s == "oc") return MechanismKind::Moc;
  if (s == "pi") return MechanismKind::Mpi;
  if (s == "m1") return MechanismKind::M1;
  if (s == "m2") return MechanismKind::M2;
  throw ParseError("unknown mechanism '" + std::string(s) + "' (expected oc, pi, m1 or m2)");
}

// M1 and M2 consume an auxiliary sample z ~ F per run.
inline bool needs_auxiliary_sample(MechanismKind k) {
  return k == MechanismKind::M1 || k == MechanismKind::M2;
}

enum class Winner { Strategic, Profiled, NoSale };

/// Result of one run. Offered prices are recorded even when refused;
/// payment is zero exactly when nobody buys.
struct Outcome {
  Winner winner = Winner::NoSale;
  std::optional<double> price_offered_strategic;
  std::optional<double> price_offered_profiled;
  double payment = 0.0;
};

/// Prices that depend only on F, computed once per distribution.
struct ReservePrices {
  double monopoly_price;       // phi^{-1}(0), offered to the profiled agent
  double r_star;               // monopoly_price * (1 - F(monopoly_price))
  double pi_strategic_price;   // phi^{-1}(R*), M_pi's price for the bidder

  static ReservePrices of(const DistributionModel& d) {
    const double p = d.monopoly_price();
    const double rs = p * d.survival(p);
    return {p, rs, d.inverse_virtual(rs)};
  }
};

namespace detail {

inline void require_non_negative(double x, const char* what) {
  if (!(x >= 0.0) || std::isinf(x))
    throw DomainError(std::string(what) + " must be a finite non-negative number");
}

// Second stage shared by every mechanism: a take-it-or-leave-it offer to
// the profiled agent, accepted at equality.
inline Outcome offer_profiled(Outcome o, double price, double v_h_true) {
  o.price_offered_profiled = price;
  if (v_h_true >= price) {
    o.winner = Winner::Profiled;
    o.payment = price;
  } else {
    o.winner = Winner::NoSale;
    o.payment = 0.0;
  }
  return o;
}

// Strategic bidder wins iff b_s reaches the threshold and then pays it;
// this is the critical-bid (Myerson) payment by construction.
inline Outcome posted_to_strategic(double threshold, double b_s) {
  Outcome o;
  if (std::isfinite(threshold)) o.price_offered_strategic = threshold;
  if (b_s >= threshold) {
    o.winner = Winner::Strategic;
    o.payment = threshold;
  }
  return o;
}

inline double oc_threshold(const DistributionModel& d, double v_hat) {
  // A prediction above sup phi can never be matched by the bidder.
  if (v_hat > d.sup_virtual()) return kInf;
  return d.inverse_virtual(v_hat);
}

}  // namespace detail

/// Minimum strategic bid that still wins. `context` is the prediction for
/// Moc and the auxiliary sample z for M1/M2; Mpi takes none.
inline double critical_bid(const DistributionModel& d, MechanismKind kind,
                           std::optional<double> context = std::nullopt) {
  switch (kind) {
    case MechanismKind::Moc:
      if (!context) throw DomainError("critical bid of M_oc needs the prediction");
      detail::require_non_negative(*context, "prediction");
      return detail::oc_threshold(d, *context);
    case MechanismKind::Mpi:
      return ReservePrices::of(d).pi_strategic_price;
    case MechanismKind::M1:
      if (!context) throw DomainError("critical bid of M1 needs the sample z");
      detail::require_non_negative(*context, "sample z");
      return d.inverse_virtual(*context);
    case MechanismKind::M2:
      if (!context) throw DomainError("critical bid of M2 needs the sample z");
      detail::require_non_negative(*context, "sample z");
      return *context;
  }
  throw DomainError("unknown mechanism");
}

/// Optimal-consistency mechanism. The bidder wins iff phi(b_s) >= v_hat,
/// i.e. b_s >= phi^{-1}(v_hat), paying phi^{-1}(v_hat); otherwise the
/// profiled agent is offered the item at v_hat.
inline Outcome run_oc(const DistributionModel& d, double b_s, double v_hat, double v_h_true) {
  detail::require_non_negative(b_s, "bid");
  detail::require_non_negative(v_hat, "prediction");
  detail::require_non_negative(v_h_true, "true value");
  Outcome o = detail::posted_to_strategic(detail::oc_threshold(d, v_hat), b_s);
  if (o.winner == Winner::Strategic) return o;
  return detail::offer_profiled(o, v_hat, v_h_true);
}

/// Optimal prediction-ignoring mechanism.
inline Outcome run_pi(const ReservePrices& prices, double b_s, double v_h_true) {
  detail::require_non_negative(b_s, "bid");
  detail::require_non_negative(v_h_true, "true value");
  Outcome o = detail::posted_to_strategic(prices.pi_strategic_price, b_s);
  if (o.winner == Winner::Strategic) return o;
  return detail::offer_profiled(o, prices.monopoly_price, v_h_true);
}

inline Outcome run_pi(const DistributionModel& d, double b_s, double v_h_true) {
  return run_pi(ReservePrices::of(d), b_s, v_h_true);
}

/// M1: bidder offered phi^{-1}(z) for a caller-supplied z ~ F.
inline Outcome run_m1(const DistributionModel& d, const ReservePrices& prices, double b_s,
                      double v_h_true, double z) {
  detail::require_non_negative(b_s, "bid");
  detail::require_non_negative(v_h_true, "true value");
  detail::require_non_negative(z, "sample z");
  Outcome o = detail::posted_to_strategic(d.inverse_virtual(z), b_s);
  if (o.winner == Winner::Strategic) return o;
  return detail::offer_profiled(o, prices.monopoly_price, v_h_true);
}

inline Outcome run_m1(const DistributionModel& d, double b_s, double v_h_true, double z) {
  return run_m1(d, ReservePrices::of(d), b_s, v_h_true, z);
}

/// M2: bidder offered the sample z itself.
inline Outcome run_m2(const ReservePrices& prices, double b_s, double v_h_true, double z) {
  detail::require_non_negative(b_s, "bid");
  detail::require_non_negative(v_h_true, "true value");
  detail::require_non_negative(z, "sample z");
  Outcome o = detail::posted_to_strategic(z, b_s);
  if (o.winner == Winner::Strategic) return o;
  return detail::offer_profiled(o, prices.monopoly_price, v_h_true);
}

inline Outcome run_m2(const DistributionModel& d, double b_s, double v_h_true, double z) {
  return run_m2(ReservePrices::of(d), b_s, v_h_true, z);
}

/// Dispatch used by the simulator; arguments a mechanism ignores are unused.
inline Outcome run_mechanism(const DistributionModel& d, const ReservePrices& prices,
                             MechanismKind kind, double b_s, double v_hat, double v_h_true,
                             double z) {
  switch (kind) {
    case MechanismKind::Moc: return run_oc(d, b_s, v_hat, v_h_true);
    case MechanismKind::Mpi: return run_pi(prices, b_s, v_h_true);
    case MechanismKind::M1: return run_m1(d, prices, b_s, v_h_true, z);
    case MechanismKind::M2: return run_m2(prices, b_s, v_h_true, z);
  }
  throw DomainError("unknown mechanism");
}

}  // namespace profiled
