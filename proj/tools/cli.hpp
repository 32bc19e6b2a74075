// Copyright 2026 The dpcompozer Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// dpcompozer command line. Exit codes: 0 success, 1 domain error, 2 usage.

#ifndef DPCOMPOZER_TOOLS_CLI_HPP_
#define DPCOMPOZER_TOOLS_CLI_HPP_

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <locale>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dpcompozer.hpp"

namespace dpcompozer::cli {

using nlohmann::json;

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomain = 1;
inline constexpr int kExitUsage = 2;

// Thrown for flag combinations CLI11 cannot express; maps to exit 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline std::string fmt(double x) {
  std::ostringstream s;
  s.imbue(std::locale::classic());
  s << std::setprecision(17) << x;
  return s.str();
}

// Non-finite doubles become null, which JSON cannot hold otherwise.
inline json num(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

inline json to_json(const EpsDelta& g) { return {{"eps", num(g.eps)}, {"delta", num(g.delta)}}; }

struct Sink {
  std::string path;
  std::ostream& fallback;

  void write(const std::string& text) const {
    if (path.empty() || path == "-") {
      fallback << text;
      return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    f << text;
  }
};

// ---------------------------------------------------------------- region

struct RegionArgs {
  double eps = 0.0;
  double delta = 0.0;
  int k = 1;
  std::string format = "csv";
  std::string out;
};

inline std::string cmd_region(const RegionArgs& a) {
  const EpsDelta g{a.eps, a.delta};
  validate(g);
  const PrivacyRegion r = a.k == 1 ? region_from_eps_delta(g) : optimal_region(g, a.k);
  std::vector<PrivacyPoint> v = boundary(r);
  std::sort(v.begin(), v.end(), [](const PrivacyPoint& x, const PrivacyPoint& y) {
    return x.pmd < y.pmd || (x.pmd == y.pmd && x.pfa > y.pfa);
  });
  if (a.format == "json") {
    json j;
    j["params"] = {{"eps", a.eps}, {"delta", a.delta}, {"k", a.k}};
    j["vertices"] = json::array();
    for (const PrivacyPoint& p : v) j["vertices"].push_back({{"pmd", p.pmd}, {"pfa", p.pfa}});
    j["lines"] = json::array();
    for (const EpsDelta& l : r.lines()) j["lines"].push_back(to_json(l));
    return j.dump(2) + "\n";
  }
  std::string s = "pmd,pfa\n";
  for (const PrivacyPoint& p : v) s += fmt(p.pmd) + "," + fmt(p.pfa) + "\n";
  return s;
}

// ---------------------------------------------------------------- compose

struct ComposeArgs {
  double eps = 0.0;
  double delta = 0.0;
  int k = 1;
  std::optional<double> slack;
  std::string method = "all";
  std::string steps;
  std::string format = "text";
  std::string out;
};

inline std::vector<EpsDelta> read_steps(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read steps file " + path);
  json j;
  try {
    j = json::parse(f);
  } catch (const json::exception& e) {
    throw std::runtime_error("steps file " + path + ": " + e.what());
  }
  if (!j.is_array()) throw std::runtime_error("steps file must hold a list of {eps, delta}");
  std::vector<EpsDelta> steps;
  for (const json& s : j) {
    if (!s.is_object() || !s.contains("eps") || !s.contains("delta") ||
        !s["eps"].is_number() || !s["delta"].is_number()) {
      throw std::runtime_error("each step needs numeric eps and delta");
    }
    steps.push_back({s["eps"].get<double>(), s["delta"].get<double>()});
  }
  return steps;
}

inline std::string cmd_compose(const ComposeArgs& a) {
  CompositionQuery q;
  q.slack = a.slack;
  const bool hetero = !a.steps.empty();
  if (hetero) {
    if (a.method != "all" && a.method != "basic" && a.method != "heterogeneous") {
      throw std::invalid_argument("method " + a.method +
                                  " needs identical steps; use basic, heterogeneous or all");
    }
    q.per_step = read_steps(a.steps);
  } else {
    if (a.method == "heterogeneous") {
      throw std::invalid_argument("method heterogeneous needs --steps");
    }
    const EpsDelta g{a.eps, a.delta};
    validate(g);
    q.per_step = HomogeneousSteps{g, a.k};
  }
  const Comparison c = compare(q);

  std::vector<const CompositionReport*> shown;
  for (const CompositionReport& r : c.reports) {
    if (a.method == "all" || to_string(r.method) == a.method) shown.push_back(&r);
  }

  if (a.format == "json") {
    json j;
    j["slack"] = c.slack;
    j["reports"] = json::array();
    for (const CompositionReport* r : shown) {
      j["reports"].push_back({{"method", std::string(to_string(r->method))},
                              {"eps", num(r->result_eps)},
                              {"delta", num(r->result_delta)},
                              {"notes", r->notes}});
    }
    j["nesting"] = json::array();
    for (const Nesting& n : c.nesting) {
      j["nesting"].push_back({{"inner", std::string(to_string(n.inner))},
                              {"outer", std::string(to_string(n.outer))},
                              {"holds", n.holds}});
    }
    return j.dump(2) + "\n";
  }
  std::ostringstream s;
  s.imbue(std::locale::classic());
  s << "slack " << fmt(c.slack) << "\n";
  s << std::left << std::setw(15) << "method" << std::setw(26) << "eps" << std::setw(26)
    << "delta" << "notes\n";
  for (const CompositionReport* r : shown) {
    s << std::setw(15) << to_string(r->method) << std::setw(26) << fmt(r->result_eps)
      << std::setw(26) << fmt(r->result_delta) << r->notes << "\n";
  }
  for (const Nesting& n : c.nesting) {
    s << to_string(n.inner) << " inside " << to_string(n.outer) << ": "
      << (n.holds ? "yes" : "no") << "\n";
  }
  return s.str();
}

// ---------------------------------------------------------------- calibrate

struct CalibrateArgs {
  std::string mechanism;
  double eps = 0.0;
  double delta = 0.0;
  int k = 1;
  double sensitivity = 1.0;
  double eta = 0.5;
  double nu = 0.1;
  std::string out;
};

inline json to_json(const ForwardCheck& f) {
  return {{"composed", to_json(f.composed)}, {"slack", num(f.slack)}, {"meets", f.meets}};
}

inline std::string cmd_calibrate(const CalibrateArgs& a) {
  const EpsDelta target{a.eps, a.delta};
  json j;
  j["mechanism"] = a.mechanism;
  j["target"] = to_json(target);
  if (a.mechanism == "budget") {
    const EpsDelta q = per_query_budget(target, a.k);
    const ForwardCheck f = forward_check(q, a.k, target);
    j["k"] = a.k;
    j["per_query"] = to_json(q);
    j["forward_check"] = to_json(f);
    j["calibrated_eps0"] = calibrate_eps0(target, a.k);
  } else if (a.mechanism == "laplace") {
    const double var = laplace_variance(a.sensitivity, target, a.k);
    const double b = laplace_scale(var);
    const EpsDelta q{laplace_pair_eps(a.sensitivity, b), 0.0};
    j["k"] = a.k;
    j["sensitivity"] = a.sensitivity;
    j["variance"] = var;
    j["scale"] = b;
    j["per_query"] = to_json(q);
    j["forward_check"] = to_json(forward_check(q, a.k, target));
  } else if (a.mechanism == "gaussian") {
    const double var = gaussian_variance(a.sensitivity, target, a.k);
    const double sigma = std::sqrt(var);
    const double achieved = gaussian_delta(GaussianCurve::of(a.sensitivity, sigma, a.k), a.eps);
    j["k"] = a.k;
    j["sensitivity"] = a.sensitivity;
    j["variance"] = var;
    j["sigma"] = sigma;
    j["forward_check"] = {{"composed", {{"eps", a.eps}, {"delta", num(achieved)}}},
                          {"meets", achieved <= a.delta}};
  } else if (a.mechanism == "jl") {
    const JlParams p = jl_params(target, a.eta, a.nu);
    const JlParams old = jl_params_legacy(target, a.eta, a.nu);
    j["eta"] = a.eta;
    j["nu"] = a.nu;
    j["r"] = p.r;
    j["per_row"] = to_json(EpsDelta{p.eps0, p.delta0});
    j["w"] = p.w;
    j["tau"] = p.tau;
    j["legacy"] = {{"eps0", old.eps0}, {"w", old.w}, {"tau", old.tau}};
    j["forward_check"] = to_json(forward_check({p.eps0, p.delta0}, p.r, target));
  } else {
    throw UsageError("unknown mechanism " + a.mechanism);
  }
  return j.dump(2) + "\n";
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  std::string mechanism = "canonical";
  double eps = 0.0;
  double delta = 0.0;
  int k = 1;
  std::size_t trials = 10000;
  std::uint64_t seed = 1;
  std::string thresholds = "auto";
  std::string out;
};

inline std::vector<double> parse_list(const std::string& text) {
  std::vector<double> v;
  std::istringstream in(text);
  in.imbue(std::locale::classic());
  std::string item;
  while (std::getline(in, item, ',')) {
    std::istringstream one(item);
    one.imbue(std::locale::classic());
    double x = 0.0;
    if (!(one >> x) || !(one >> std::ws).eof()) throw UsageError("bad threshold '" + item + "'");
    v.push_back(x);
  }
  if (v.empty()) throw UsageError("empty threshold list");
  std::sort(v.begin(), v.end());
  return v;
}

inline std::string cmd_simulate(const SimulateArgs& a) {
  MechanismSpec spec;
  EpsDelta g{a.eps, a.delta};
  if (a.mechanism == "canonical") {
    spec = MechanismSpec::canonical(g);
  } else if (a.mechanism == "geometric") {
    g.delta = 0.0;
    spec = MechanismSpec::geometric(a.eps);
  } else {
    throw UsageError("unknown mechanism " + a.mechanism);
  }
  validate(spec);
  if (a.k < 1) throw std::invalid_argument("k must be >= 1");
  if (a.trials < 1) throw std::invalid_argument("trials must be >= 1");
  const AdversaryStrategy strategy = non_adaptive(spec);
  std::vector<CurvePoint> curve;
  if (a.thresholds == "auto") {
    curve = estimate_curve_auto(strategy, a.k, a.trials, a.seed);
  } else {
    const std::vector<double> t = parse_list(a.thresholds);
    curve = estimate_curve(strategy, a.k, a.trials, t, a.seed);
  }
  const ContainmentReport rep = check_within(curve, optimal_region(g, a.k));
  std::string s = "threshold,pmd,pfa,ci\n";
  for (const CurvePoint& c : curve) {
    s += fmt(c.threshold) + "," + fmt(c.point.pmd) + "," + fmt(c.point.pfa) + "," +
         fmt(std::max(c.radius_pmd, c.radius_pfa)) + "\n";
  }
  s += "# verdict " + std::string(to_string(rep.verdict)) + " violations " +
       std::to_string(rep.violations) + " near_boundary " + std::to_string(rep.near_boundary) +
       "\n";
  return s;
}

// ---------------------------------------------------------------- entry

inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Differential privacy composition accountant"};
  app.require_subcommand(1);

  RegionArgs ra;
  auto* region = app.add_subcommand("region", "Boundary of R(eps, delta) or its k-fold composition");
  region->add_option("--eps", ra.eps)->required();
  region->add_option("--delta", ra.delta)->required();
  region->add_option("--k", ra.k)->check(CLI::PositiveNumber);
  region->add_option("--format", ra.format)->check(CLI::IsMember({"csv", "json"}));
  region->add_option("--out", ra.out, "output file (default stdout)");

  ComposeArgs ca;
  auto* compose = app.add_subcommand("compose", "Composed guarantees from each method");
  compose->add_option("--eps", ca.eps);
  compose->add_option("--delta", ca.delta);
  compose->add_option("--k", ca.k)->check(CLI::PositiveNumber);
  compose->add_option("--slack", ca.slack);
  compose->add_option("--method", ca.method)
      ->check(CLI::IsMember({"basic", "drv", "optimal", "simplified", "heterogeneous", "all"}));
  auto* steps = compose->add_option("--steps", ca.steps, "JSON list of {eps, delta}");
  compose->add_option("--format", ca.format)->check(CLI::IsMember({"text", "json"}));
  compose->add_option("--out", ca.out);
  compose->get_option("--eps")->excludes(steps);

  CalibrateArgs cb;
  auto* calibrate = app.add_subcommand("calibrate", "Per-query budgets and noise scales");
  calibrate->add_option("--mechanism", cb.mechanism)
      ->required()
      ->check(CLI::IsMember({"laplace", "gaussian", "budget", "jl"}));
  calibrate->add_option("--eps", cb.eps)->required();
  calibrate->add_option("--delta", cb.delta)->required();
  calibrate->add_option("--k", cb.k)->check(CLI::PositiveNumber);
  calibrate->add_option("--sensitivity", cb.sensitivity);
  calibrate->add_option("--eta", cb.eta);
  calibrate->add_option("--nu", cb.nu);
  calibrate->add_option("--out", cb.out);

  SimulateArgs sa;
  auto* simulate = app.add_subcommand("simulate", "Monte-Carlo tradeoff points and containment");
  simulate->add_option("--mechanism", sa.mechanism)
      ->check(CLI::IsMember({"canonical", "geometric"}));
  simulate->add_option("--eps", sa.eps)->required();
  simulate->add_option("--delta", sa.delta);
  simulate->add_option("--k", sa.k)->check(CLI::PositiveNumber);
  simulate->add_option("--trials", sa.trials)->check(CLI::PositiveNumber);
  simulate->add_option("--seed", sa.seed);
  simulate->add_option("--thresholds", sa.thresholds, "auto or a comma-separated list");
  simulate->add_option("--out", sa.out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*region) {
      Sink{ra.out, out}.write(cmd_region(ra));
    } else if (*compose) {
      Sink{ca.out, out}.write(cmd_compose(ca));
    } else if (*calibrate) {
      Sink{cb.out, out}.write(cmd_calibrate(cb));
    } else if (*simulate) {
      Sink{sa.out, out}.write(cmd_simulate(sa));
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitDomain;
  }
  return kExitOk;
}

}  // namespace dpcompozer::cli

#endif  // DPCOMPOZER_TOOLS_CLI_HPP_
