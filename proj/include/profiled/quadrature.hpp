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
#include <queue>
#include <span>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "profiled/errors.hpp"

namespace profiled {

/// A scalar together with an absolute error estimate.
struct Measured {
  double value = 0.0;
  double error = 0.0;

  Measured& operator+=(const Measured& other) {
    value += other.value;
    error += other.error;
    return *this;
  }
  friend Measured operator+(Measured lhs, const Measured& rhs) { return lhs += rhs; }
  friend Measured operator-(Measured lhs, const Measured& rhs) {
    lhs.value -= rhs.value;
    lhs.error += rhs.error;
    return lhs;
  }
  friend Measured operator*(double k, Measured m) {
    m.value *= k;
    m.error *= std::abs(k);
    return m;
  }
};

// First-order propagation for a ratio.
inline Measured ratio(const Measured& num, const Measured& den) {
  const double r = num.value / den.value;
  const double err = num.error / std::abs(den.value) +
                     std::abs(num.value) * den.error / (den.value * den.value);
  return {r, err};
}

/// Settings for adaptive quadrature and for truncating unbounded supports.
struct Quadrature {
  double relative_tolerance = 1e-9;
  double absolute_tolerance = 1e-12;
  double tail_quantile = 1.0 - 1e-12;
  int max_subdivisions = 2000;

  void validate() const {
    if (!(relative_tolerance > 0.0) || !(absolute_tolerance > 0.0))
      throw DomainError("quadrature tolerances must be positive");
    if (!(tail_quantile > 0.5 && tail_quantile < 1.0))
      throw DomainError("tail_quantile must lie in (0.5, 1)");
    if (max_subdivisions < 1) throw DomainError("max_subdivisions must be at least 1");
  }
};

namespace detail {

struct Panel {
  double a, b, value, error;
  bool operator<(const Panel& other) const { return error < other.error; }
};

template <class F>
Panel gk21(F& f, double a, double b) {
  double err = 0.0;
  const double v =
      boost::math::quadrature::gauss_kronrod<double, 21>::integrate(f, a, b, 0, 0.0, &err);
  // Boost reports the single-panel error on the reference interval [-1, 1].
  err *= 0.5 * (b - a);
  if (!std::isfinite(v) || !std::isfinite(err))
    throw QuadratureError("integrand is not finite on [" + std::to_string(a) + ", " +
                              std::to_string(b) + "]",
                          0.0, std::numeric_limits<double>::infinity());
  return {a, b, v, err};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod (10/21-point panels) over consecutive
/// breakpoints. The panel with the largest error is bisected until the
/// summed error meets max(absolute, relative * |value|).
///
/// Breakpoints must be finite and non-decreasing; zero-width panels are
/// skipped. Throws QuadratureError (with the partial sum) when
/// max_subdivisions panels are not enough.
template <class F>
Measured integrate(F&& f, std::span<const double> breakpoints, const Quadrature& q = {}) {
  q.validate();
  std::priority_queue<detail::Panel> panels;
  std::vector<detail::Panel> finished;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    const double a = breakpoints[i], b = breakpoints[i + 1];
    if (!std::isfinite(a) || !std::isfinite(b))
      throw DomainError("integration breakpoints must be finite");
    if (b < a) throw DomainError("integration breakpoints must be non-decreasing");
    if (b > a) panels.push(detail::gk21(f, a, b));
  }

  auto totals = [&] {
    Measured m;
    auto copy = panels;
    while (!copy.empty()) {
      m.value += copy.top().value;
      m.error += copy.top().error;
      copy.pop();
    }
    for (const auto& p : finished) {
      m.value += p.value;
      m.error += p.error;
    }
    return m;
  };

  double value = 0.0, error = 0.0;
  {
    const Measured t = totals();
    value = t.value;
    error = t.error;
  }
  int count = static_cast<int>(panels.size());
  while (!panels.empty() &&
         error > std::max(q.absolute_tolerance, q.relative_tolerance * std::abs(value))) {
    detail::Panel worst = panels.top();
    panels.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      finished.push_back(worst);  // cannot be split further in double precision
      continue;
    }
    if (count >= q.max_subdivisions) {
      panels.push(worst);
      const Measured t = totals();
      throw QuadratureError("quadrature did not converge within " +
                                std::to_string(q.max_subdivisions) + " subdivisions",
                            t.value, t.error);
    }
    const detail::Panel left = detail::gk21(f, worst.a, mid);
    const detail::Panel right = detail::gk21(f, mid, worst.b);
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    panels.push(left);
    panels.push(right);
    ++count;
  }
  const Measured t = totals();
  if (t.error > std::max(q.absolute_tolerance, q.relative_tolerance * std::abs(t.value)))
    throw QuadratureError("quadrature stalled at panels of minimal width", t.value, t.error);
  return t;
}

/// Integral over [a, b]. An infinite b is mapped onto [0, 1) by
/// z = a + t / (1 - t); callers integrating against a distribution should
/// prefer an explicit quantile truncation instead.
template <class F>
Measured integrate(F&& f, double a, double b, const Quadrature& q = {}) {
  if (std::isnan(a) || std::isnan(b) || !std::isfinite(a))
    throw DomainError("integration bounds must be numbers with a finite lower limit");
  if (std::isinf(b)) {
    if (b < 0) throw DomainError("upper limit must not be -inf");
    auto mapped = [&](double t) {
      const double one_minus = 1.0 - t;
      return f(a + t / one_minus) / (one_minus * one_minus);
    };
    const double bps[] = {0.0, 0.5, 0.9, 0.99, 1.0};
    // The GK nodes never touch t = 1 exactly.
    return integrate(mapped, std::span<const double>(bps), q);
  }
  const double bps[] = {a, b};
  return integrate(std::forward<F>(f), std::span<const double>(bps), q);
}

}  // namespace profiled
