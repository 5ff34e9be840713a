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
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "profiled/distribution.hpp"
#include "profiled/mechanisms.hpp"
#include "profiled/quadrature.hpp"
#include "profiled/quantities.hpp"

namespace profiled {

inline constexpr double kE = std::numbers::e;

/// Outcome of one numerical check. `worst_slack` is the smallest margin by
/// which the checked inequality held (negative when violated), in the
/// check's own normalised units; passed <=> worst_slack >= -tolerance.
/// Skipped checks (precondition not met) have passed == false and a NaN slack.
struct VerificationResult {
  std::string name;
  bool passed = false;
  bool skipped = false;
  double worst_slack = std::numeric_limits<double>::quiet_NaN();
  double tolerance = 0.0;
  std::string worst_point;
};

namespace detail {

// Tracks the minimum slack seen and where it occurred.
class SlackTracker {
 public:
  SlackTracker(std::string name, double tolerance) {
    r_.name = std::move(name);
    r_.tolerance = tolerance;
    r_.worst_slack = std::numeric_limits<double>::infinity();
  }

  void observe(double slack, const std::string& where) {
    if (std::isnan(slack)) slack = -std::numeric_limits<double>::infinity();
    if (slack < r_.worst_slack) {
      r_.worst_slack = slack;
      r_.worst_point = where;
    }
  }

  VerificationResult finish() {
    r_.passed = r_.worst_slack >= -r_.tolerance;
    return r_;
  }

 private:
  VerificationResult r_;
};

inline VerificationResult skipped(std::string name, std::string why) {
  VerificationResult r;
  r.name = std::move(name);
  r.skipped = true;
  r.worst_point = std::move(why);
  return r;
}

inline std::vector<double> lemma_grid(const DistributionModel& d, int grid_size) {
  std::vector<double> zs{d.support().lower};
  for (double u : quantile_grid_levels(grid_size)) zs.push_back(d.quantile(u));
  return zs;
}

}  // namespace detail

inline constexpr int kDefaultGrid = 200;

/// Q_F >= V_F / 4 and R*_F >= V_F / e, slack normalised by V_F.
inline VerificationResult verify_lemma1(const DistributionModel& d, const Quadrature& q = {}) {
  const std::string name = "lemma1 " + d.spec();
  if (!check_mhr(d, 1000)) return detail::skipped(name, "not MHR");
  detail::SlackTracker t(name, 1e-9);
  const double v = expected_value(d, q).value;
  t.observe((random_price_revenue(d, q).value - v / 4) / v, "Q >= V/4");
  t.observe((r_star(d).value - v / kE) / v, "R* >= V/e");
  return t.finish();
}

/// F(phi^{-1}(z)) <= 1 - (1 - F(z)) / e on a quantile grid (plus z at the
/// lower support end), compared in survival form.
inline VerificationResult verify_lemma2(const DistributionModel& d, int grid_size = kDefaultGrid) {
  const std::string name = "lemma2 " + d.spec();
  if (!check_mhr(d, 1000)) return detail::skipped(name, "not MHR");
  detail::SlackTracker t(name, 1e-9);
  for (double z : detail::lemma_grid(d, grid_size)) {
    const double slack = d.survival(d.inverse_virtual(z)) - d.survival(z) / kE;
    t.observe(slack, "z=" + detail::fmt_real(z));
  }
  return t.finish();
}

/// 1 - F(z) = exp(-H(z)) with H the numerically integrated hazard;
/// slack is minus the relative error.
inline VerificationResult verify_hazard_identity(const DistributionModel& d,
                                                 int grid_size = kDefaultGrid,
                                                 const Quadrature& q = {}) {
  detail::SlackTracker t("hazard identity " + d.spec(), 1e-6);
  double cumulative = 0.0;
  double prev = d.support().lower;
  for (double u : detail::quantile_grid_levels(grid_size)) {
    const double z = d.quantile(u);
    cumulative += integrate([&](double y) { return d.hazard(y); }, prev, z, q).value;
    prev = z;
    const double s = d.survival(z);
    t.observe(-std::abs(std::exp(-cumulative) - s) / s, "z=" + detail::fmt_real(z));
  }
  return t.finish();
}

/// Revenue inequalities for MHR distributions, normalised by V_F:
///   R^s + R^h = V (chi + 1);  R^s >= V (chi + 1/(4e));
///   R^1 >= V (chi + 3/(4e));  R^1 >= V (chi/e + 5/(4e) - 1/(2e^2));
///   R^2 >= (1/4 + 1/(2e)) V;  integral of F f = 1/2.
inline VerificationResult verify_revenue_lemmas(const DistributionModel& d,
                                                const Quadrature& q = {}) {
  const std::string name = "revenue lemmas " + d.spec();
  if (!check_mhr(d, 1000)) return detail::skipped(name, "not MHR");
  detail::SlackTracker t(name, 1e-6);
  const QuantityReport r = quantity_report(d, q);
  if (!r.failures.empty()) {
    t.observe(-std::numeric_limits<double>::infinity(),
              "quantity failed: " + r.failures.begin()->first);
    return t.finish();
  }
  const double v = r.v->value, c = r.chi->value;
  t.observe(-std::abs(r.benchmark->value - v * (c + 1)) / v, "benchmark = V(chi+1)");
  t.observe(r.r_s->value / v - (c + 1 / (4 * kE)), "R^s >= V(chi + 1/(4e))");
  t.observe(r.r_1->value / v - (c + 3 / (4 * kE)), "R^1 >= V(chi + 3/(4e))");
  t.observe(r.r_1->value / v - (c / kE + 5 / (4 * kE) - 1 / (2 * kE * kE)),
            "R^1 >= V(chi/e + 5/(4e) - 1/(2e^2))");
  t.observe(r.r_2->value / v - (0.25 + 1 / (2 * kE)), "R^2 >= (1/4 + 1/(2e)) V");
  t.observe(-std::abs(r.cdf_moment->value - 0.5), "integral F f = 1/2");
  t.observe(r.r_pi->value / v - std::max(r.r_1->value, r.r_2->value) / v, "R_pi >= max(R^1, R^2)");
  return t.finish();
}

/// Robustness bound of M_oc: (chi + 1) / (chi + 1/(4e)).
inline double robustness_bound_oc(double chi) {
  if (!(chi >= 0)) throw DomainError("chi must be non-negative");
  return (chi + 1) / (chi + 1 / (4 * kE));
}

/// Robustness bound of M_pi via M1: (chi + 1) / (chi/e + 5/(4e) - 1/(2e^2)).
inline double robustness_bound_m1(double chi) {
  if (!(chi >= 0)) throw DomainError("chi must be non-negative");
  return (chi + 1) / (chi / kE + 5 / (4 * kE) - 1 / (2 * kE * kE));
}

/// Robustness bound of M_pi via M2: (chi + 1) / (1/4 + 1/(2e)).
inline double robustness_bound_m2(double chi) {
  if (!(chi >= 0)) throw DomainError("chi must be non-negative");
  return (chi + 1) / (0.25 + 1 / (2 * kE));
}

/// chi at which the M1 and M2 bounds coincide: e/4 - 3/4 + 1/(2e).
inline double m1_m2_crossover() { return kE / 4 - 0.75 + 1 / (2 * kE); }

struct FrontierRow {
  double chi, bound_oc, bound_m1, bound_m2, bound_pi;
};

/// Robustness bounds sampled uniformly on chi in [0, 1/(2e)].
inline std::vector<FrontierRow> pareto_frontier(int n_points) {
  if (n_points < 2) throw DomainError("the frontier needs at least 2 points");
  std::vector<FrontierRow> rows;
  rows.reserve(static_cast<std::size_t>(n_points));
  const double hi = 1 / (2 * kE);
  for (int i = 0; i < n_points; ++i) {
    const double chi = i == n_points - 1 ? hi : hi * i / (n_points - 1);
    const double m1 = robustness_bound_m1(chi), m2 = robustness_bound_m2(chi);
    rows.push_back({chi, robustness_bound_oc(chi), m1, m2, std::min(m1, m2)});
  }
  return rows;
}

/// Linearly interpolated chi where bound_m1 - bound_m2 changes sign.
inline std::optional<double> frontier_crossover(std::span<const FrontierRow> rows) {
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double g0 = rows[i - 1].bound_m1 - rows[i - 1].bound_m2;
    const double g1 = rows[i].bound_m1 - rows[i].bound_m2;
    if (g0 == 0) return rows[i - 1].chi;
    if ((g0 > 0) != (g1 > 0) || g1 == 0)
      return rows[i - 1].chi + (rows[i].chi - rows[i - 1].chi) * g0 / (g0 - g1);
  }
  return std::nullopt;
}

/// Frontier shape: bound_oc strictly decreasing, bound_m1 and bound_m2
/// strictly increasing, bound_pi = min(m1, m2), crossover within 1e-3 of
/// the closed form.
inline VerificationResult verify_frontier(std::span<const FrontierRow> rows) {
  detail::SlackTracker t("pareto frontier", 0.0);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& a = rows[i - 1];
    const auto& b = rows[i];
    const std::string at = "chi=" + detail::fmt_real(b.chi);
    t.observe(a.bound_oc - b.bound_oc > 0 ? 0.0 : -1.0, "bound_oc decreasing at " + at);
    t.observe(b.bound_m1 - a.bound_m1 > 0 ? 0.0 : -1.0, "bound_m1 increasing at " + at);
    t.observe(b.bound_m2 - a.bound_m2 > 0 ? 0.0 : -1.0, "bound_m2 increasing at " + at);
  }
  for (const auto& r : rows)
    t.observe(r.bound_pi == std::min(r.bound_m1, r.bound_m2) ? 0.0 : -1.0,
              "bound_pi = min at chi=" + detail::fmt_real(r.chi));
  const auto cross = frontier_crossover(rows);
  if (!cross) {
    t.observe(-1.0, "no m1/m2 crossover");
  } else {
    const double gap = std::abs(*cross - m1_m2_crossover());
    t.observe(gap <= 1e-3 ? 0.0 : -gap, "crossover at chi=" + detail::fmt_real(*cross));
  }
  return t.finish();
}

/// benchmark / revenue, where revenue is R^s for Moc (nothing from the
/// profiled agent), and R_pi, R^1, R^2 for the prediction-ignoring mechanisms.
inline Measured analytic_robustness(const DistributionModel& d, MechanismKind kind,
                                    const Quadrature& q = {}) {
  const Measured bench = benchmark(d, q);
  switch (kind) {
    case MechanismKind::Moc: return ratio(bench, rev_strategic(d, q));
    case MechanismKind::Mpi: return ratio(bench, rev_mpi(d));
    case MechanismKind::M1: return ratio(bench, rev_m1(d, q));
    case MechanismKind::M2: return ratio(bench, rev_m2(d, q));
  }
  throw DomainError("unknown mechanism");
}

/// Realised robustness never exceeds the chi-indexed bounds.
inline VerificationResult verify_bound_dominance(const DistributionModel& d,
                                                 const Quadrature& q = {}) {
  const std::string name = "bound dominance " + d.spec();
  if (!check_mhr(d, 1000)) return detail::skipped(name, "not MHR");
  detail::SlackTracker t(name, 1e-6);
  const double c = chi(d, q).value;
  t.observe(c >= 0 ? 0.0 : c, "chi >= 0");
  t.observe(robustness_bound_oc(std::max(c, 0.0)) - analytic_robustness(d, MechanismKind::Moc, q).value,
            "M_oc at chi=" + detail::fmt_real(c));
  const double pi_bound =
      std::min(robustness_bound_m1(std::max(c, 0.0)), robustness_bound_m2(std::max(c, 0.0)));
  t.observe(pi_bound - analytic_robustness(d, MechanismKind::Mpi, q).value,
            "M_pi at chi=" + detail::fmt_real(c));
  return t.finish();
}

/// benchmark / (2 R*) for PowerTail(c): the best a prediction-distrusting
/// mechanism can guarantee is at most 2 R* <= 2, while benchmark >= V = 1/(c-1).
struct DivergenceRow {
  double c;
  double two_r_star;
  double benchmark;
  double ratio;
};

inline DivergenceRow nonmhr_divergence_row(double c, const Quadrature& q = {}) {
  const DistributionModel d = DistributionModel::power_tail(c);
  const double two_r = 2 * r_star(d).value;
  const double bench = benchmark(d, q).value;
  return {c, two_r, bench, bench / two_r};
}

inline VerificationResult verify_nonmhr_divergence(std::span<const double> c_values,
                                                   const Quadrature& q = {}) {
  detail::SlackTracker t("nonmhr divergence", 1e-9);
  std::vector<DivergenceRow> rows;
  for (double c : c_values) {
    if (!(c > 1)) throw DomainError("power-tail exponent must exceed 1");
    const DivergenceRow row = nonmhr_divergence_row(c, q);
    const std::string at = "c=" + detail::fmt_real(c);
    const double closed = (2 / c) * std::pow((c - 1) / c, c - 1);
    t.observe(-std::abs(row.two_r_star - closed) / closed, "2R* closed form at " + at);
    t.observe(2 - row.two_r_star, "2R* <= 2 at " + at);
    const double v = 1 / (c - 1);
    t.observe((row.benchmark - v) / v, "benchmark >= 1/(c-1) at " + at);
    rows.push_back(row);
  }
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.c < b.c; });
  for (std::size_t i = 1; i < rows.size(); ++i)
    t.observe(rows[i - 1].ratio > rows[i].ratio ? 0.0 : -1.0,
              "ratio increases as c decreases at c=" + detail::fmt_real(rows[i - 1].c));
  return t.finish();
}

/// The verification grid: Uniform(0,b), Exponential(rate), Weibull(k, theta).
inline std::vector<DistributionModel> mhr_parameter_grid() {
  std::vector<DistributionModel> grid;
  for (double b : {0.5, 1.0, 2.0, 10.0}) grid.push_back(DistributionModel::uniform(0, b));
  for (double rate : {0.1, 0.5, 1.0, 2.0, 10.0}) grid.push_back(DistributionModel::exponential(rate));
  for (double k : {1.0, 1.5, 2.0, 3.0})
    for (double theta : {0.5, 1.0, 2.0}) grid.push_back(DistributionModel::weibull(k, theta));
  return grid;
}

inline std::vector<double> power_tail_exponents() { return {1.001, 1.01, 1.1, 1.5, 2.0, 3.0}; }

inline std::vector<VerificationResult> lemma_suite(const Quadrature& q = {}) {
  std::vector<VerificationResult> out;
  for (const auto& d : mhr_parameter_grid()) {
    out.push_back(verify_lemma1(d, q));
    out.push_back(verify_lemma2(d));
    out.push_back(verify_hazard_identity(d, kDefaultGrid, q));
    out.push_back(verify_revenue_lemmas(d, q));
  }
  return out;
}

// Closed-form constants compared at 1e-9.
inline VerificationResult verify_bound_constants() {
  detail::SlackTracker t("bound constants", 1e-9);
  auto same = [&](double got, double want, const char* what) {
    t.observe(-std::abs(got - want), what);
  };
  same(robustness_bound_oc(0), 4 * kE, "bound_oc(0) = 4e");
  same(robustness_bound_m1(1 / (2 * kE)), (4 * kE + 2) / 5, "bound_m1(1/(2e)) = (4e+2)/5");
  same(robustness_bound_m1(0), 4 * kE * kE / (5 * kE - 2), "bound_m1(0) = 4e^2/(5e-2)");
  same(robustness_bound_m2(0), 4 * kE / (kE + 2), "bound_m2(0) = 4e/(e+2)");
  same(robustness_bound_m1(m1_m2_crossover()), robustness_bound_m2(m1_m2_crossover()),
       "bound_m1 = bound_m2 at the crossover");
  return t.finish();
}

inline VerificationResult verify_bound_monotonicity(int grid_size = 1000) {
  detail::SlackTracker t("bound monotonicity", 0.0);
  const auto rows = pareto_frontier(grid_size);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const std::string at = "chi=" + detail::fmt_real(rows[i].chi);
    t.observe(rows[i - 1].bound_oc > rows[i].bound_oc ? 0.0 : -1.0, "oc at " + at);
    t.observe(rows[i - 1].bound_m1 < rows[i].bound_m1 ? 0.0 : -1.0, "m1 at " + at);
    t.observe(rows[i - 1].bound_m2 < rows[i].bound_m2 ? 0.0 : -1.0, "m2 at " + at);
  }
  return t.finish();
}

inline std::vector<VerificationResult> bounds_suite(const Quadrature& q = {}) {
  std::vector<VerificationResult> out{verify_bound_constants(), verify_bound_monotonicity()};
  const auto rows = pareto_frontier(200);
  out.push_back(verify_frontier(rows));
  for (const auto& d : mhr_parameter_grid()) out.push_back(verify_bound_dominance(d, q));
  return out;
}

inline std::vector<VerificationResult> nonmhr_suite(const Quadrature& q = {}) {
  std::vector<VerificationResult> out;
  const auto cs = power_tail_exponents();
  out.push_back(verify_nonmhr_divergence(cs, q));
  detail::SlackTracker shape("powertail regular but not MHR", 0.0);
  for (double c : cs) {
    const auto d = DistributionModel::power_tail(c);
    shape.observe(check_regular(d, 1000) ? 0.0 : -1.0, "regular at c=" + detail::fmt_real(c));
    shape.observe(check_mhr(d, 1000) ? -1.0 : 0.0, "not MHR at c=" + detail::fmt_real(c));
  }
  out.push_back(shape.finish());
  return out;
}

}  // namespace profiled
