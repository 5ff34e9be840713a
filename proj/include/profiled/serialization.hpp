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
#include <cstdio>
#include <ostream>
#include <span>
#include <string>

#include "json.hpp"

#include "profiled/bounds.hpp"
#include "profiled/mechanisms.hpp"
#include "profiled/quantities.hpp"
#include "profiled/simulation.hpp"

namespace profiled {

// Keys keep insertion order so output follows the documented field order.
using Json = nlohmann::ordered_json;

// Output is rounded to 12 significant digits.
inline double round12(double x) {
  if (!std::isfinite(x) || x == 0.0) return x;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return std::strtod(buf, nullptr);
}

inline Json real_json(double x) {
  if (!std::isfinite(x)) return nullptr;
  return round12(x);
}

inline Json to_json(const Measured& m) {
  return {{"value", real_json(m.value)}, {"error", real_json(m.error)}};
}

inline Json to_json(const QuantityReport& r) {
  Json j;
  j["dist"] = r.dist;
  auto put = [&](const char* key, const std::optional<Measured>& m) {
    j[key] = m ? to_json(*m) : Json{{"value", nullptr}, {"error", nullptr}};
  };
  put("v", r.v);
  put("q", r.q);
  put("a", r.a);
  put("chi", r.chi);
  put("r_star", r.r_star);
  put("monopoly_price", r.monopoly_price);
  put("r_s", r.r_s);
  put("r_h", r.r_h);
  put("benchmark", r.benchmark);
  put("r_1", r.r_1);
  put("r_2", r.r_2);
  put("r_pi", r.r_pi);
  j["consistent"] = r.consistent();
  j["issues"] = r.issues;
  j["failures"] = r.failures;
  return j;
}

inline Json to_json(const Outcome& o) {
  auto opt = [](const std::optional<double>& x) -> Json {
    return x ? real_json(*x) : Json(nullptr);
  };
  const char* winner = o.winner == Winner::Strategic  ? "strategic"
                       : o.winner == Winner::Profiled ? "profiled"
                                                      : "none";
  return {{"winner", winner},
          {"price_s", opt(o.price_offered_strategic)},
          {"price_h", opt(o.price_offered_profiled)},
          {"payment", real_json(o.payment)}};
}

inline Json to_json(const Estimate& e) {
  return {{"mean", real_json(e.mean)},
          {"stderr", real_json(e.std_error)},
          {"ci95", {real_json(e.ci95_lo), real_json(e.ci95_hi)}},
          {"trials", e.trials},
          {"seed", e.seed}};
}

inline Json to_json(const VerificationResult& r) {
  return {{"name", r.name},
          {"passed", r.passed},
          {"status", r.skipped ? "skipped" : r.passed ? "passed" : "failed"},
          {"worst_slack", real_json(r.worst_slack)},
          {"tolerance", r.tolerance},
          {"worst_point", r.worst_point}};
}

inline void write_frontier_csv(std::ostream& out, std::span<const FrontierRow> rows) {
  out << "chi,bound_oc,bound_m1,bound_m2,bound_pi\n";
  char buf[160];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g,%.12g,%.12g\n", r.chi, r.bound_oc,
                  r.bound_m1, r.bound_m2, r.bound_pi);
    out << buf;
  }
}

}  // namespace profiled
