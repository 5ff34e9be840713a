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
#include <cstdint>
#include <cstdio>
#include <limits>
#include <memory>
#include <mutex>
#include <numbers>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include "profiled/errors.hpp"
#include "profiled/rng.hpp"

namespace profiled {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Support of a valuation distribution; upper may be +infinity.
struct SupportInterval {
  double lower = 0.0;
  double upper = kInf;

  bool bounded() const noexcept { return std::isfinite(upper); }
};

namespace detail {

inline std::string fmt_real(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

// Smallest z >= start with fn(z) >= target, for a continuous non-decreasing
// fn. The bracket starts at [start, start + 1] and doubles its width; the
// root is then polished by TOMS 748 to a relative width of 1e-12.
template <class Fn>
double smallest_crossing(Fn&& fn, double target, double start, double upper) {
  double lo = start;
  double f_lo = fn(lo);
  if (f_lo >= target) return lo;
  double width = 1.0;
  double hi = lo + width;
  if (hi > upper) hi = upper;
  double f_hi = fn(hi);
  int doublings = 0;
  while (f_hi < target) {
    if (hi >= upper) throw DomainError("no point of the support reaches the requested level");
    lo = hi;
    f_lo = f_hi;
    width *= 2.0;
    hi = std::min(lo + width, upper);
    f_hi = fn(hi);
    if (++doublings > 2100) throw DomainError("bracket expansion overflowed");
  }
  // TOMS 748 needs finite function values at both ends.
  for (int i = 0; i < 200 && !std::isfinite(f_lo); ++i) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = fn(mid);
    if (f_mid >= target) {
      hi = mid;
      f_hi = f_mid;
    } else {
      lo = mid;
      f_lo = f_mid;
    }
  }
  if (!std::isfinite(f_lo) || f_hi == target) return hi;

  auto g = [&](double z) { return fn(z) - target; };
  // The returned end of the bracket is biased by at most its width, so
  // iterate to a few ulps (well inside the 1e-12 relative target).
  auto tol = [](double a, double b) {
    return std::abs(b - a) <= 8 * std::numeric_limits<double>::epsilon() *
                                  std::max(std::abs(a), std::abs(b));
  };
  std::uintmax_t max_iter = 200;
  const auto r = boost::math::tools::toms748_solve(g, lo, hi, f_lo - target, f_hi - target,
                                                   tol, max_iter);
  return g(r.second) >= 0.0 ? r.second : (g(r.first) >= 0.0 ? r.first : hi);
}

inline double normal_sf(double t) { return 0.5 * std::erfc(t * (1.0 / std::numbers::sqrt2)); }
inline double normal_pdf(double t) {
  return std::exp(-0.5 * t * t) * (0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2);
}

// Logit-spaced probabilities covering [1e-6, 1 - 1e-6]; dense in both tails.
inline std::vector<double> quantile_grid_levels(int grid_size) {
  const double lo = std::log(1e-6 / (1 - 1e-6));
  std::vector<double> u(static_cast<std::size_t>(grid_size));
  for (int i = 0; i < grid_size; ++i) {
    const double t = lo + (-2.0 * lo) * i / (grid_size - 1);
    u[static_cast<std::size_t>(i)] = 1.0 / (1.0 + std::exp(-t));
  }
  return u;
}

// true iff fn is non-decreasing along xs, allowing 1e-9 relative slack.
template <class Fn>
bool non_decreasing_on(const std::vector<double>& xs, Fn&& fn) {
  double prev = -kInf;
  for (double x : xs) {
    const double v = fn(x);
    if (std::isnan(v)) return false;
    if (v < prev - 1e-9 * std::max(1.0, std::abs(prev))) return false;
    prev = std::max(prev, v);
  }
  return true;
}

}  // namespace detail

namespace family {

struct Uniform {
  double a, b;

  SupportInterval support() const { return {a, b}; }
  double cdf(double z) const { return z <= a ? 0.0 : z >= b ? 1.0 : (z - a) / (b - a); }
  double survival(double z) const { return z <= a ? 1.0 : z >= b ? 0.0 : (b - z) / (b - a); }
  double pdf(double z) const { return (z < a || z > b) ? 0.0 : 1.0 / (b - a); }
  double quantile(double u) const { return a + u * (b - a); }
  double hazard(double z) const { return z < a ? 0.0 : 1.0 / (b - z); }
  double virtual_value(double z) const {
    return (z < a || z > b) ? -kInf : 2.0 * z - b;
  }
  std::optional<double> inverse_virtual(double y) const { return std::max(0.5 * (y + b), a); }
  double sup_virtual() const { return b; }
  double partial_expectation(double t) const {
    const double from = std::clamp(t, a, b);
    return (b * b - from * from) / (2.0 * (b - a));
  }
  double from_uniform(double u) const { return quantile(u); }
  bool mhr() const { return true; }
  std::string spec() const { return "uniform:" + detail::fmt_real(a) + "," + detail::fmt_real(b); }
};

struct Exponential {
  double rate;

  SupportInterval support() const { return {0.0, kInf}; }
  double cdf(double z) const { return z <= 0 ? 0.0 : -std::expm1(-rate * z); }
  double survival(double z) const { return z <= 0 ? 1.0 : std::exp(-rate * z); }
  double pdf(double z) const { return z < 0 ? 0.0 : rate * std::exp(-rate * z); }
  double quantile(double u) const { return -std::log1p(-u) / rate; }
  double hazard(double z) const { return z < 0 ? 0.0 : rate; }
  double virtual_value(double z) const { return z < 0 ? -kInf : z - 1.0 / rate; }
  std::optional<double> inverse_virtual(double y) const { return std::max(y + 1.0 / rate, 0.0); }
  double sup_virtual() const { return kInf; }
  double partial_expectation(double t) const {
    t = std::max(t, 0.0);
    return std::exp(-rate * t) * (t + 1.0 / rate);
  }
  double from_uniform(double u) const { return quantile(u); }
  bool mhr() const { return true; }
  std::string spec() const { return "exp:" + detail::fmt_real(rate); }
};

struct Weibull {
  double shape, scale;

  SupportInterval support() const { return {0.0, kInf}; }
  double cumulative_hazard(double z) const { return std::pow(z / scale, shape); }
  double cdf(double z) const { return z <= 0 ? 0.0 : -std::expm1(-cumulative_hazard(z)); }
  double survival(double z) const { return z <= 0 ? 1.0 : std::exp(-cumulative_hazard(z)); }
  double hazard(double z) const {
    if (z < 0) return 0.0;
    return (shape / scale) * std::pow(z / scale, shape - 1.0);
  }
  double pdf(double z) const { return z < 0 ? 0.0 : hazard(z) * survival(z); }
  double quantile(double u) const { return scale * std::pow(-std::log1p(-u), 1.0 / shape); }
  double virtual_value(double z) const {
    if (z < 0) return -kInf;
    return z - (scale / shape) * std::pow(z / scale, 1.0 - shape);
  }
  std::optional<double> inverse_virtual(double) const { return std::nullopt; }
  double sup_virtual() const { return kInf; }
  double partial_expectation(double t) const {
    t = std::max(t, 0.0);
    return scale * boost::math::tgamma(1.0 + 1.0 / shape, cumulative_hazard(t));
  }
  double from_uniform(double u) const { return quantile(u); }
  bool mhr() const { return true; }
  std::string spec() const {
    return "weibull:" + detail::fmt_real(shape) + "," + detail::fmt_real(scale);
  }
};

// F(z) = 1 - (z + 1)^(-c): regular for c > 1 but with decreasing hazard c / (z + 1).
struct PowerTail {
  double exponent;

  SupportInterval support() const { return {0.0, kInf}; }
  double survival(double z) const {
    return z <= 0 ? 1.0 : std::exp(-exponent * std::log1p(z));
  }
  double cdf(double z) const { return z <= 0 ? 0.0 : -std::expm1(-exponent * std::log1p(z)); }
  double pdf(double z) const {
    return z < 0 ? 0.0 : exponent * std::exp(-(exponent + 1.0) * std::log1p(z));
  }
  double quantile(double u) const { return std::expm1(-std::log1p(-u) / exponent); }
  double hazard(double z) const { return z < 0 ? 0.0 : exponent / (z + 1.0); }
  double virtual_value(double z) const { return z < 0 ? -kInf : z - (z + 1.0) / exponent; }
  std::optional<double> inverse_virtual(double y) const {
    return std::max((y * exponent + 1.0) / (exponent - 1.0), 0.0);
  }
  double sup_virtual() const { return kInf; }
  double partial_expectation(double t) const {
    t = std::max(t, 0.0);
    const double c = exponent;
    return c / (c - 1.0) * std::exp((1.0 - c) * std::log1p(t)) - std::exp(-c * std::log1p(t));
  }
  double from_uniform(double u) const { return quantile(u); }
  bool mhr() const { return false; }
  std::string spec() const { return "powertail:" + detail::fmt_real(exponent); }
};

/// Gaussian kernel density on [0, inf) with reflection at zero:
/// f(z) = (1/(n h)) sum_i [K((z - x_i)/h) + K((z + x_i)/h)].
///
/// Kernel sums only visit samples within 8.5 bandwidths of z (the
/// remaining terms are below double precision); samples further right
/// are counted in bulk for the survival function.
class EmpiricalKde {
 public:
  EmpiricalKde(std::vector<double> samples, double bandwidth, std::string label)
      : xs_(std::move(samples)), h_(bandwidth), label_(std::move(label)) {
    std::sort(xs_.begin(), xs_.end());
    mean_ = 0.0;
    for (double x : xs_) mean_ += x;
    mean_ /= static_cast<double>(xs_.size());
  }

  const std::vector<double>& samples() const { return xs_; }
  double bandwidth() const { return h_; }
  const std::string& label() const { return label_; }

  SupportInterval support() const { return {0.0, kInf}; }

  double pdf(double z) const {
    if (z < 0) return 0.0;
    double sum = 0.0;
    for (auto it = lower(z - window()); it != xs_.end() && *it <= z + window(); ++it)
      sum += detail::normal_pdf((z - *it) / h_);
    for (auto it = xs_.begin(); it != xs_.end() && *it <= window() - z; ++it)
      sum += detail::normal_pdf((z + *it) / h_);
    return sum / (static_cast<double>(xs_.size()) * h_);
  }

  double survival(double z) const {
    if (z <= 0) return 1.0;
    const auto right = upper(z + window());
    double sum = static_cast<double>(xs_.end() - right);
    for (auto it = lower(z - window()); it != right; ++it) sum += detail::normal_sf((z - *it) / h_);
    for (auto it = xs_.begin(); it != xs_.end() && *it <= window() - z; ++it)
      sum += detail::normal_sf((z + *it) / h_);
    return std::min(1.0, sum / static_cast<double>(xs_.size()));
  }

  double cdf(double z) const { return z <= 0 ? 0.0 : 1.0 - survival(z); }

  double hazard(double z) const {
    if (z < 0) return 0.0;
    const double s = survival(z);
    return s > 0 ? pdf(z) / s : kInf;
  }

  double virtual_value(double z) const {
    if (z < 0) return -kInf;
    const double s = survival(z);
    if (s <= 0) return z;
    const double f = pdf(z);
    return f > 0 ? z - s / f : -kInf;
  }

  double quantile(double u) const {
    if (u <= 0) return 0.0;
    const double hi_guess = xs_.back() + window();
    if (u <= 0.5) {
      return detail::smallest_crossing([&](double z) { return cdf(z); }, u, 0.0, kInf);
    }
    const double tail = 1.0 - u;
    // Survival is decreasing, so search on its negation.
    return detail::smallest_crossing([&](double z) { return -survival(z); }, -tail, 0.0,
                                     std::max(hi_guess, 1.0) * 1e6);
  }

  std::optional<double> inverse_virtual(double) const { return std::nullopt; }
  double sup_virtual() const { return kInf; }

  // E[|Y| 1{|Y| > t}] for Y ~ N(x_i, h^2), averaged over kernels.
  double partial_expectation(double t) const {
    t = std::max(t, 0.0);
    double sum = 0.0;
    for (double x : xs_) {
      const double a = (t - x) / h_, b = (t + x) / h_;
      sum += x * detail::normal_sf(a) + h_ * detail::normal_pdf(a) - x * detail::normal_sf(b) +
             h_ * detail::normal_pdf(b);
    }
    return sum / static_cast<double>(xs_.size());
  }

  // Composition sampler: one uniform picks a kernel and supplies the
  // Gaussian offset; reflecting |x_i + h N| reproduces the density exactly.
  double from_uniform(double u) const {
    const double n = static_cast<double>(xs_.size());
    const double scaled = u * n;
    const auto idx = std::min(static_cast<std::size_t>(scaled), xs_.size() - 1);
    double r = scaled - static_cast<double>(idx);
    r = std::clamp(r, 1e-300, 1.0 - 1e-16);
    const double offset = -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * r);
    return std::abs(xs_[idx] + h_ * offset);
  }

  double mean() const { return mean_; }

  // Checked on 1000 points placed at the sample quantiles of the usual
  // logit-spaced levels; inverting the KDE cdf for each would cost a root
  // search per point.
  bool regular() const {
    std::call_once(regular_once_, [this] {
      std::vector<double> zs;
      const double last = static_cast<double>(xs_.size() - 1);
      for (double u : detail::quantile_grid_levels(1000)) {
        const double pos = u * last;
        const auto i = static_cast<std::size_t>(pos);
        const double frac = pos - static_cast<double>(i);
        zs.push_back(i + 1 < xs_.size() ? xs_[i] + frac * (xs_[i + 1] - xs_[i]) : xs_.back());
      }
      regular_ = detail::non_decreasing_on(zs, [this](double z) { return virtual_value(z); });
    });
    return regular_;
  }

  bool mhr() const { return false; }  // not known a priori; see check_mhr
  std::string spec() const { return "empirical:" + label_; }

 private:
  double window() const { return 8.5 * h_; }
  std::vector<double>::const_iterator lower(double v) const {
    return std::lower_bound(xs_.begin(), xs_.end(), v);
  }
  std::vector<double>::const_iterator upper(double v) const {
    return std::upper_bound(xs_.begin(), xs_.end(), v);
  }

  std::vector<double> xs_;
  double h_;
  std::string label_;
  double mean_ = 0.0;
  mutable std::once_flag regular_once_;
  mutable bool regular_ = false;
};

}  // namespace family

/// An immutable valuation distribution.
///
/// Built-in families: Uniform(a, b), Exponential(rate), Weibull(shape >= 1,
/// scale), PowerTail(c > 1), and Gaussian-KDE fits of sample data. Copies
/// share the (immutable) KDE sample table.
class DistributionModel {
 public:
  using Family = std::variant<family::Uniform, family::Exponential, family::Weibull,
                              family::PowerTail, std::shared_ptr<const family::EmpiricalKde>>;

 private:
  template <class Fn>
  decltype(auto) visit(Fn&& fn) const {
    return std::visit(
        [&fn](const auto& f) -> decltype(auto) {
          if constexpr (requires { f->support(); }) return fn(*f);
          else return fn(f);
        },
        family_);
  }

 public:

  static DistributionModel uniform(double a, double b) {
    if (!(std::isfinite(a) && std::isfinite(b)) || a < 0 || !(a < b))
      throw DomainError("uniform requires 0 <= a < b, got a=" + detail::fmt_real(a) +
                        " b=" + detail::fmt_real(b));
    return DistributionModel(family::Uniform{a, b});
  }
  static DistributionModel exponential(double rate) {
    if (!(rate > 0) || !std::isfinite(rate))
      throw DomainError("exponential requires rate > 0, got " + detail::fmt_real(rate));
    return DistributionModel(family::Exponential{rate});
  }
  static DistributionModel weibull(double shape, double scale) {
    if (!(shape >= 1.0) || !std::isfinite(shape))
      throw DomainError("weibull requires shape >= 1 (MHR), got " + detail::fmt_real(shape));
    if (!(scale > 0) || !std::isfinite(scale))
      throw DomainError("weibull requires scale > 0, got " + detail::fmt_real(scale));
    return DistributionModel(family::Weibull{shape, scale});
  }
  static DistributionModel power_tail(double c) {
    if (!(c > 1.0) || !std::isfinite(c))
      throw DomainError("powertail requires exponent c > 1, got " + detail::fmt_real(c));
    return DistributionModel(family::PowerTail{c});
  }
  static DistributionModel empirical(std::shared_ptr<const family::EmpiricalKde> kde) {
    return DistributionModel(std::move(kde));
  }

  const Family& family() const { return family_; }

  template <class T>
  const T* family_if() const {
    if constexpr (std::is_same_v<T, family::EmpiricalKde>) {
      auto p = std::get_if<std::shared_ptr<const family::EmpiricalKde>>(&family_);
      return p ? p->get() : nullptr;
    } else {
      return std::get_if<T>(&family_);
    }
  }

  SupportInterval support() const {
    return visit([](const auto& f) { return f.support(); });
  }
  std::string spec() const {
    return visit([](const auto& f) { return f.spec(); });
  }

  double cdf(double z) const {
    if (std::isnan(z)) throw DomainError("cdf of NaN");
    return visit([z](const auto& f) { return f.cdf(z); });
  }
  double survival(double z) const {
    if (std::isnan(z)) throw DomainError("survival of NaN");
    return visit([z](const auto& f) { return f.survival(z); });
  }
  double pdf(double z) const {
    if (std::isnan(z)) throw DomainError("pdf of NaN");
    return visit([z](const auto& f) { return f.pdf(z); });
  }

  double quantile(double u) const {
    if (!(u >= 0.0 && u <= 1.0)) throw DomainError("quantile requires u in [0, 1)");
    if (u == 1.0) {
      if (!support().bounded()) throw DomainError("quantile(1) is infinite on an unbounded support");
      return support().upper;
    }
    return visit([u](const auto& f) { return f.quantile(u); });
  }

  /// Inverse-transform sample (composition sampler for KDE fits).
  double sample(RandomState& rng) const { return from_uniform(rng.uniform()); }
  double from_uniform(double u) const {
    return visit([u](const auto& f) { return f.from_uniform(u); });
  }

  double hazard(double z) const {
    if (survival(z) <= 0.0)
      throw DomainError("hazard is undefined at or above the essential supremum (z=" +
                        detail::fmt_real(z) + ")");
    return visit([z](const auto& f) { return f.hazard(z); });
  }

  /// phi(z) = z - (1 - F(z)) / f(z).
  double virtual_value(double z) const {
    if (!(pdf(z) > 0.0))
      throw DomainError("virtual valuation needs positive density (z=" + detail::fmt_real(z) + ")");
    return visit([z](const auto& f) { return f.virtual_value(z); });
  }

  /// min{z in support : phi(z) >= y}.
  double inverse_virtual(double y) const {
    if (std::isnan(y)) throw DomainError("inverse virtual valuation of NaN");
    if (!is_regular()) throw DomainError("inverse virtual valuation requires a regular distribution");
    const double sup = sup_virtual();
    if (y > sup)
      throw DomainError("level " + detail::fmt_real(y) + " exceeds the supremum " +
                        detail::fmt_real(sup) + " of the virtual valuation");
    return visit([this, y](const auto& f) -> double {
      if (auto closed = f.inverse_virtual(y)) return *closed;
      const SupportInterval s = support();
      return detail::smallest_crossing([&f](double z) { return f.virtual_value(z); }, y,
                                       std::max(y, s.lower), s.upper);
    });
  }

  double sup_virtual() const {
    return visit([](const auto& f) { return f.sup_virtual(); });
  }

  /// phi^{-1}(0): the posted price maximising z (1 - F(z)).
  double monopoly_price() const { return inverse_virtual(0.0); }

  /// E[X 1{X > t}].
  double partial_expectation(double t) const {
    return visit([t](const auto& f) { return f.partial_expectation(t); });
  }

  bool is_regular() const {
    return std::visit(
        [](const auto& f) {
          if constexpr (requires { f->regular(); }) return f->regular();
          else return true;
        },
        family_);
  }

  /// Known MHR by construction (Uniform, Exponential, Weibull with shape >= 1).
  bool known_mhr() const {
    return visit([](const auto& f) { return f.mhr(); });
  }

 private:
  explicit DistributionModel(Family f) : family_(std::move(f)) {}

  Family family_;
};

/// Hazard rate non-decreasing on a logit-spaced quantile grid spanning
/// [1e-6, 1 - 1e-6] (1e-9 relative slack).
inline bool check_mhr(const DistributionModel& d, int grid_size) {
  if (grid_size < 2) throw DomainError("grid_size must be at least 2");
  std::vector<double> zs;
  for (double u : detail::quantile_grid_levels(grid_size)) zs.push_back(d.quantile(u));
  return detail::non_decreasing_on(zs, [&d](double z) { return d.hazard(z); });
}

/// Virtual valuation non-decreasing on the same grid as check_mhr.
inline bool check_regular(const DistributionModel& d, int grid_size) {
  if (grid_size < 2) throw DomainError("grid_size must be at least 2");
  std::vector<double> zs;
  for (double u : detail::quantile_grid_levels(grid_size)) zs.push_back(d.quantile(u));
  try {
    return detail::non_decreasing_on(zs, [&d](double z) { return d.virtual_value(z); });
  } catch (const DomainError&) {
    return false;
  }
}

}  // namespace profiled
