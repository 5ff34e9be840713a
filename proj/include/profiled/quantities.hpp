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

#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "profiled/distribution.hpp"
#include "profiled/quadrature.hpp"

namespace profiled {

// phi^{-1} memoised on the exact bit pattern of its argument. Nested
// quadratures over the same distribution revisit identical Kronrod nodes,
// and root finding dominates their cost otherwise. Not thread-safe; keep
// one per evaluation.
class InverseVirtualCache {
 public:
  explicit InverseVirtualCache(const DistributionModel& d) : d_(d) {}

  double operator()(double y) {
    const auto key = std::bit_cast<std::uint64_t>(y);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    const double x = d_.inverse_virtual(y);
    memo_.emplace(key, x);
    return x;
  }

  std::size_t size() const { return memo_.size(); }

 private:
  const DistributionModel& d_;
  std::unordered_map<std::uint64_t, double> memo_;
};

/// Where integrals against f are evaluated: [lower, T] with T the upper
/// support end or quantile(tail_quantile), split at quantile breakpoints so
/// that every initial panel carries probability mass.
struct IntegrationDomain {
  std::vector<double> breakpoints;
  double truncation = 0.0;     // T
  double tail_survival = 0.0;  // 1 - F(T); zero for bounded supports
};

inline IntegrationDomain integration_domain(const DistributionModel& d, const Quadrature& q) {
  q.validate();
  const SupportInterval s = d.support();
  IntegrationDomain dom;
  dom.truncation = s.bounded() ? s.upper : d.quantile(q.tail_quantile);
  dom.tail_survival = s.bounded() ? 0.0 : d.survival(dom.truncation);
  dom.breakpoints.push_back(s.lower);
  for (double u : {0.25, 0.5, 0.75}) dom.breakpoints.push_back(d.quantile(u));
  for (double tail = 1e-1; 1.0 - tail < q.tail_quantile; tail *= 0.1)
    dom.breakpoints.push_back(d.quantile(1.0 - tail));
  dom.breakpoints.push_back(dom.truncation);
  std::sort(dom.breakpoints.begin(), dom.breakpoints.end());
  dom.breakpoints.erase(std::remove_if(dom.breakpoints.begin(), dom.breakpoints.end(),
                                       [&](double x) { return x > dom.truncation; }),
                        dom.breakpoints.end());
  dom.breakpoints.erase(std::unique(dom.breakpoints.begin(), dom.breakpoints.end()),
                        dom.breakpoints.end());
  return dom;
}

/// integral of g(z) f(z) dz over the truncated domain (no tail term).
template <class G>
Measured integrate_against(const DistributionModel& d, const IntegrationDomain& dom, G&& g,
                           const Quadrature& q) {
  return integrate([&](double z) { return g(z) * d.pdf(z); },
                   std::span<const double>(dom.breakpoints), q);
}

namespace detail {

inline Measured expected_value(const DistributionModel& d, const IntegrationDomain& dom,
                               const Quadrature& q) {
  Measured m = integrate_against(d, dom, [](double z) { return z; }, q);
  if (dom.tail_survival > 0) m.value += d.partial_expectation(dom.truncation);
  return m;
}

inline Measured random_price_revenue(const DistributionModel& d, const IntegrationDomain& dom,
                                     const Quadrature& q) {
  Measured m = integrate_against(d, dom, [&](double z) { return z * d.survival(z); }, q);
  // Integrand is at most z (1 - F(T)) f(z) beyond T.
  m.error += dom.tail_survival * d.partial_expectation(dom.truncation);
  return m;
}

inline double r_star(const DistributionModel& d) {
  const double p = d.monopoly_price();
  return p * d.survival(p);
}

// Beyond T every integrand of the form x S(x) with x = phi^{-1}(z) >= z is
// bounded by R* (the maximum of the revenue curve).
inline Measured auxiliary_a(const DistributionModel& d, const IntegrationDomain& dom,
                            InverseVirtualCache& inv, const Quadrature& q) {
  Measured m = integrate_against(
      d, dom,
      [&](double z) {
        const double x = inv(z);
        return (x - z) * d.survival(x);
      },
      q);
  m.error += r_star(d) * dom.tail_survival;
  return m;
}

inline Measured rev_strategic(const DistributionModel& d, const IntegrationDomain& dom,
                              InverseVirtualCache& inv, const Quadrature& q) {
  Measured m = integrate_against(
      d, dom,
      [&](double z) {
        const double x = inv(z);
        return x * d.survival(x);
      },
      q);
  m.error += r_star(d) * dom.tail_survival;
  return m;
}

// Beyond T the integrand z F(phi^{-1}(z)) f(z) lies between F(T) z f(z) and
// z f(z); the midpoint of the two partial expectations is added.
inline Measured rev_honest(const DistributionModel& d, const IntegrationDomain& dom,
                           InverseVirtualCache& inv, const Quadrature& q) {
  Measured m = integrate_against(d, dom, [&](double z) { return z * d.cdf(inv(z)); }, q);
  if (dom.tail_survival > 0) {
    const double pe = d.partial_expectation(dom.truncation);
    m.value += pe * (1.0 - 0.5 * dom.tail_survival);
    m.error += 0.5 * pe * dom.tail_survival;
  }
  return m;
}

inline Measured rev_m1(const DistributionModel& d, const IntegrationDomain& dom,
                       InverseVirtualCache& inv, double rstar, const Quadrature& q) {
  Measured m = integrate_against(
      d, dom,
      [&](double z) {
        const double x = inv(z);
        return x * d.survival(x) + d.cdf(x) * rstar;
      },
      q);
  // Beyond T: the profiled term lies in [F(T), 1] R* S(T), the strategic
  // term in [0, R* S(T)].
  m.value += rstar * dom.tail_survival;
  m.error += rstar * dom.tail_survival;
  return m;
}

inline Measured cdf_moment(const DistributionModel& d, const IntegrationDomain& dom,
                           const Quadrature& q) {
  Measured m = integrate_against(d, dom, [&](double z) { return d.cdf(z); }, q);
  const double ft = d.cdf(dom.truncation);
  m.value += 0.5 * (1.0 - ft * ft);
  return m;
}

// Relative accuracy assumed for closed forms and root-found prices.
inline Measured priced(double value) { return {value, 1e-12 * std::abs(value)}; }

}  // namespace detail

/// V_F = E[X].
inline Measured expected_value(const DistributionModel& d, const Quadrature& q = {}) {
  return detail::expected_value(d, integration_domain(d, q), q);
}

/// Q_F: revenue from one agent offered an independent random price drawn from F.
inline Measured random_price_revenue(const DistributionModel& d, const Quadrature& q = {}) {
  return detail::random_price_revenue(d, integration_domain(d, q), q);
}

/// A_F = integral of (phi^{-1}(z) - z) (1 - F(phi^{-1}(z))) f(z).
inline Measured auxiliary_a(const DistributionModel& d, const Quadrature& q = {}) {
  InverseVirtualCache inv(d);
  return detail::auxiliary_a(d, integration_domain(d, q), inv, q);
}

/// chi_F = A_F / V_F.
inline Measured chi(const DistributionModel& d, const Quadrature& q = {}) {
  return ratio(auxiliary_a(d, q), expected_value(d, q));
}

/// R*_F: best fixed-price revenue from a single agent, p* (1 - F(p*)) at the monopoly price.
inline Measured r_star(const DistributionModel& d) { return detail::priced(detail::r_star(d)); }

/// R^s_F: M_oc's expected revenue from the strategic bidder.
inline Measured rev_strategic(const DistributionModel& d, const Quadrature& q = {}) {
  InverseVirtualCache inv(d);
  return detail::rev_strategic(d, integration_domain(d, q), inv, q);
}

/// R^h_F: M_oc's expected revenue from the honest bidder.
inline Measured rev_honest(const DistributionModel& d, const Quadrature& q = {}) {
  InverseVirtualCache inv(d);
  return detail::rev_honest(d, integration_domain(d, q), inv, q);
}

/// Optimal revenue from a strategic plus an honest bidder, R^s + R^h.
inline Measured benchmark(const DistributionModel& d, const Quadrature& q = {}) {
  InverseVirtualCache inv(d);
  const auto dom = integration_domain(d, q);
  return detail::rev_strategic(d, dom, inv, q) + detail::rev_honest(d, dom, inv, q);
}

/// R^1_F: random reserve phi^{-1}(z), z ~ F, then the monopoly price to the profiled agent.
inline Measured rev_m1(const DistributionModel& d, const Quadrature& q = {}) {
  InverseVirtualCache inv(d);
  return detail::rev_m1(d, integration_domain(d, q), inv, detail::r_star(d), q);
}

/// integral of F f; equals 1/2 for every continuous F.
inline Measured cdf_moment(const DistributionModel& d, const Quadrature& q = {}) {
  return detail::cdf_moment(d, integration_domain(d, q), q);
}

/// R^2_F = Q_F + R*_F / 2.
inline Measured rev_m2(const DistributionModel& d, const Quadrature& q = {}) {
  return random_price_revenue(d, q) + 0.5 * r_star(d);
}

/// Revenue of M_pi: price phi^{-1}(R*) to the strategic bidder, then the
/// monopoly price to the profiled agent.
inline Measured rev_mpi(const DistributionModel& d) {
  const double rs = detail::r_star(d);
  const double p = d.inverse_virtual(rs);
  return detail::priced(p * d.survival(p) + d.cdf(p) * rs);
}

/// Every scalar of interest, each with an absolute error estimate.
/// Fields that could not be evaluated stay empty and their reason is
/// recorded in `failures`; cross-checks that do not hold go to `issues`.
struct QuantityReport {
  std::string dist;
  std::optional<Measured> v, q, a, chi, r_star, monopoly_price, r_s, r_h, benchmark, r_1, r_2,
      r_pi;
  std::optional<Measured> cdf_moment;
  std::map<std::string, std::string> failures;
  std::vector<std::string> issues;

  bool consistent() const { return failures.empty() && issues.empty(); }
};

inline QuantityReport quantity_report(const DistributionModel& d, const Quadrature& quad = {}) {
  quad.validate();
  QuantityReport r;
  r.dist = d.spec();
  const IntegrationDomain dom = integration_domain(d, quad);
  InverseVirtualCache inv(d);

  auto attempt = [&](const char* name, std::optional<Measured>& slot, auto&& compute) {
    try {
      slot = compute();
    } catch (const std::exception& e) {
      r.failures[name] = e.what();
    }
  };

  attempt("v", r.v, [&] { return detail::expected_value(d, dom, quad); });
  attempt("q", r.q, [&] { return detail::random_price_revenue(d, dom, quad); });
  attempt("monopoly_price", r.monopoly_price, [&] { return detail::priced(d.monopoly_price()); });
  attempt("r_star", r.r_star, [&] { return r_star(d); });
  attempt("a", r.a, [&] { return detail::auxiliary_a(d, dom, inv, quad); });
  attempt("r_s", r.r_s, [&] { return detail::rev_strategic(d, dom, inv, quad); });
  attempt("r_h", r.r_h, [&] { return detail::rev_honest(d, dom, inv, quad); });
  attempt("cdf_moment", r.cdf_moment, [&] { return detail::cdf_moment(d, dom, quad); });
  if (r.a && r.v) r.chi = ratio(*r.a, *r.v);
  else r.failures["chi"] = "needs a and v";
  if (r.r_s && r.r_h) r.benchmark = *r.r_s + *r.r_h;
  else r.failures["benchmark"] = "needs r_s and r_h";
  if (r.r_star) {
    attempt("r_1", r.r_1, [&] { return detail::rev_m1(d, dom, inv, r.r_star->value, quad); });
    attempt("r_pi", r.r_pi, [&] { return rev_mpi(d); });
  } else {
    r.failures["r_1"] = r.failures["r_pi"] = "needs r_star";
  }
  if (r.q && r.r_star) r.r_2 = *r.q + 0.5 * *r.r_star;
  else r.failures["r_2"] = "needs q and r_star";

  // Cross-checks, each allowed its combined error plus a rounding floor.
  auto floor_for = [](double scale) { return 64 * std::numeric_limits<double>::epsilon() * scale; };
  if (r.benchmark && r.a && r.v) {
    const Measured alt = *r.a + *r.v;
    const double gap = std::abs(r.benchmark->value - alt.value);
    if (gap > r.benchmark->error + alt.error + floor_for(alt.value))
      r.issues.push_back("benchmark differs from V (chi + 1) by " + detail::fmt_real(gap));
  }
  if (r.chi && r.chi->value < -r.chi->error) r.issues.push_back("chi is negative");
  if (r.r_pi && r.r_1 && r.r_pi->value < r.r_1->value - r.r_1->error - r.r_pi->error)
    r.issues.push_back("r_pi is below r_1");
  if (r.r_pi && r.r_2 && r.r_pi->value < r.r_2->value - r.r_2->error - r.r_pi->error)
    r.issues.push_back("r_pi is below r_2");
  if (r.cdf_moment &&
      std::abs(r.cdf_moment->value - 0.5) > r.cdf_moment->error + dom.tail_survival + 1e-12)
    r.issues.push_back("integral of F f differs from 1/2");
  return r;
}

}  // namespace profiled
