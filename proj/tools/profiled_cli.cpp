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


// profiled: command-line front end for the profiled-auction library.

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "profiled/profiled.hpp"
#include "profiled/serialization.hpp"

namespace {

using json = profiled::Json;
namespace pa = profiled;

constexpr int kExitOk = 0;
constexpr int kExitDomain = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::uint64_t default_seed() {
  const char* env = std::getenv("PAL_SEED");
  if (!env || !*env) return 1;
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(env, &used);
    if (used != std::string(env).size()) throw std::invalid_argument(env);
    return v;
  } catch (const std::exception&) {
    throw UsageError(std::string("PAL_SEED is not an unsigned integer: '") + env + "'");
  }
}

struct DistOptions {
  std::string spec;
  std::optional<double> bandwidth;
  pa::Quadrature quad;

  void add_to(CLI::App* cmd, bool with_tolerances) {
    cmd->add_option("--dist", spec,
                    "uniform:a,b | exp:rate | weibull:shape,scale | powertail:c | empirical:<path>")
        ->required();
    cmd->add_option("--bandwidth", bandwidth, "KDE bandwidth for empirical:<path>")
        ->check(CLI::PositiveNumber);
    if (with_tolerances) {
      cmd->add_option("--rel-tol", quad.relative_tolerance, "quadrature relative tolerance")
          ->capture_default_str();
      cmd->add_option("--abs-tol", quad.absolute_tolerance, "quadrature absolute tolerance")
          ->capture_default_str();
      cmd->add_option("--tail-quantile", quad.tail_quantile, "truncation quantile")
          ->capture_default_str();
      cmd->add_option("--max-subdivisions", quad.max_subdivisions, "panel budget")
          ->capture_default_str();
    }
  }

  pa::DistributionModel load() const { return pa::parse_dist_spec(spec, bandwidth); }
};

void emit(const json& j) { std::cout << j.dump(2) << '\n'; }

int cmd_quantities(const DistOptions& o) {
  o.quad.validate();
  const auto report = pa::quantity_report(o.load(), o.quad);
  emit(pa::to_json(report));
  for (const auto& issue : report.issues) std::cerr << "warning: " << issue << '\n';
  for (const auto& [name, why] : report.failures) std::cerr << "error: " << name << ": " << why << '\n';
  return report.failures.empty() ? kExitOk : kExitDomain;
}

struct SimOptions {
  std::string mechanism = "oc";
  std::string prediction = "correct";
  std::uint64_t trials = 1'000'000;
  std::optional<std::uint64_t> seed;
  bool ratio = false;
  bool antithetic = false;
  unsigned workers = 1;
};

int cmd_simulate(const DistOptions& o, const SimOptions& s) {
  const auto d = o.load();
  const auto kind = pa::parse_mechanism(s.mechanism);
  const auto model = pa::parse_prediction(s.prediction);
  pa::SimConfig cfg;
  cfg.trials = s.trials;
  cfg.seed = s.seed ? *s.seed : default_seed();
  cfg.antithetic = s.antithetic;
  cfg.workers = s.workers;

  const auto r = pa::simulate(d, kind, model, cfg);
  json j = pa::to_json(r.total);
  j["dist"] = d.spec();
  j["mechanism"] = std::string(pa::to_string(kind));
  j["prediction"] = pa::to_string(model);
  j["antithetic"] = s.antithetic;
  j["components"] = {{"strategic", pa::to_json(r.strategic)},
                     {"profiled", pa::to_json(r.profiled)}};
  j["profiled_share"] = r.total.mean > 0 ? pa::real_json(r.profiled.mean / r.total.mean)
                                         : json(nullptr);
  if (s.ratio) {
    if (!(r.total.mean > 0)) throw pa::DomainError("simulated revenue is not positive; ratio undefined");
    const auto bench = pa::benchmark(d, o.quad);
    json out;
    out["ratio"] = pa::real_json(bench.value / r.total.mean);
    out["benchmark"] = pa::to_json(bench);
    out["estimate"] = std::move(j);
    emit(out);
  } else {
    emit(j);
  }
  return kExitOk;
}

int cmd_verify(const std::string& suite) {
  std::vector<pa::VerificationResult> results;
  auto append = [&](std::vector<pa::VerificationResult> rs) {
    results.insert(results.end(), rs.begin(), rs.end());
  };
  if (suite == "lemmas" || suite == "all") append(pa::lemma_suite());
  if (suite == "bounds" || suite == "all") append(pa::bounds_suite());
  if (suite == "nonmhr" || suite == "all") append(pa::nonmhr_suite());

  bool ok = true;
  json arr = json::array();
  for (const auto& r : results) {
    ok = ok && r.passed;
    arr.push_back(pa::to_json(r));
    if (!r.passed) std::cerr << "FAILED " << r.name << " at " << r.worst_point << '\n';
  }
  emit({{"suite", suite}, {"passed", ok}, {"results", arr}});
  return ok ? kExitOk : kExitDomain;
}

int cmd_pareto(int points, const std::string& out) {
  const auto rows = pa::pareto_frontier(points);
  if (out == "-") {
    pa::write_frontier_csv(std::cout, rows);
    return kExitOk;
  }
  std::ofstream f(out);
  if (!f) throw pa::DomainError("cannot write '" + out + "'");
  pa::write_frontier_csv(f, rows);
  if (const auto x = pa::frontier_crossover(rows))
    std::cerr << "wrote " << rows.size() << " rows to " << out << "; m1/m2 crossover at chi="
              << *x << '\n';
  return kExitOk;
}

int cmd_fit(const std::string& input, const std::string& family, std::optional<double> bandwidth) {
  const auto xs = pa::read_samples(input);
  json j{{"input", input}, {"family", family}, {"n", xs.size()}};
  std::optional<pa::DistributionModel> d;
  std::string spec;
  if (family == "kde") {
    d = pa::fit_empirical(xs, bandwidth, input);
    const auto* kde = d->family_if<std::shared_ptr<const pa::family::EmpiricalKde>>();
    spec = "empirical:" + input;
    j["bandwidth"] = pa::real_json((*kde)->bandwidth());
    j["regular"] = (*kde)->regular();
  } else if (family == "exp") {
    d = pa::fit_exponential_moments(xs);
    spec = d->spec();
  } else {
    auto w = pa::fit_weibull_moments(xs);
    d = w.model;
    spec = d->spec();
    j["shape_clamped"] = w.shape_clamped;
    if (w.shape_clamped)
      std::cerr << "warning: sample CV exceeds 1; Weibull shape clamped to 1\n";
  }
  j["dist"] = spec;
  j["fitted_v"] = pa::to_json(pa::expected_value(*d));
  j["ks_distance"] = pa::real_json(pa::ks_distance(xs, *d));
  emit(j);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Revenue analysis for auctions with one strategic and one profiled bidder"};
  app.require_subcommand(1);

  DistOptions q_dist;
  auto* quantities = app.add_subcommand("quantities", "report distribution quantities as JSON");
  q_dist.add_to(quantities, true);

  DistOptions s_dist;
  SimOptions sim;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo revenue estimate as JSON");
  s_dist.add_to(simulate, true);
  simulate->add_option("--mechanism", sim.mechanism, "oc | pi | m1 | m2")
      ->check(CLI::IsMember({"oc", "pi", "m1", "m2"}))
      ->capture_default_str();
  simulate->add_option("--prediction", sim.prediction,
                       "correct | independent | pessimistic | shift:<eps>")
      ->capture_default_str();
  simulate->add_option("--trials", sim.trials, "number of trials")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  simulate->add_option("--seed", sim.seed, "RNG seed (default: PAL_SEED or 1)");
  simulate->add_flag("--ratio", sim.ratio, "report benchmark / mean revenue");
  simulate->add_flag("--antithetic", sim.antithetic, "antithetic (u, 1-u) trial pairs");
  simulate->add_option("--workers", sim.workers, "worker threads (results do not depend on it)")
      ->check(CLI::Range(1u, 1024u))
      ->capture_default_str();

  std::string suite = "all";
  auto* verify = app.add_subcommand("verify", "run verification suites; exit 0 iff all pass");
  verify->add_option("--suite", suite, "lemmas | bounds | nonmhr | all")
      ->check(CLI::IsMember({"lemmas", "bounds", "nonmhr", "all"}))
      ->capture_default_str();

  int points = 200;
  std::string out = "-";
  auto* pareto = app.add_subcommand("pareto", "robustness bounds against chi as CSV");
  pareto->add_option("--points", points, "number of chi values")
      ->check(CLI::Range(2, 1000000))
      ->capture_default_str();
  pareto->add_option("--out", out, "output path, '-' for stdout")->capture_default_str();

  std::string input;
  std::string family = "kde";
  std::optional<double> fit_bandwidth;
  auto* fit = app.add_subcommand("fit", "fit a distribution to a sample file");
  fit->add_option("--input", input, "one-column CSV or text file")->required();
  fit->add_option("--family", family, "kde | exp | weibull")
      ->check(CLI::IsMember({"kde", "exp", "weibull"}))
      ->capture_default_str();
  fit->add_option("--bandwidth", fit_bandwidth, "KDE bandwidth (default: Silverman)")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*quantities) return cmd_quantities(q_dist);
    if (*simulate) return cmd_simulate(s_dist, sim);
    if (*verify) return cmd_verify(suite);
    if (*pareto) return cmd_pareto(points, out);
    if (*fit) return cmd_fit(input, family, fit_bandwidth);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const pa::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitDomain;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitDomain;
  }
  return kExitUsage;
}
