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

// End-to-end checks. One PASS/FAIL line per check; nonzero exit on failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "dpcompozer.hpp"
#include "oracles.hpp"

namespace {

using namespace dpcompozer;

struct Outcome {
  bool ok = true;
  std::string detail;
};

struct Check {
  int id;
  const char* name;
  double budget_s;
  std::function<Outcome()> run;
};

std::string str(double x) {
  std::ostringstream s;
  s.precision(6);
  s << x;
  return s.str();
}

Outcome exact_region() {
  double worst = 0.0;
  for (int k = 1; k <= 6; ++k) {
    for (double eps : {0.1, 0.4, 1.0}) {
      for (double delta : {0.0, 0.05, 0.1}) {
        const EpsDelta g{eps, delta};
        const auto want = oracle::product_hull(canonical_pair(g), k);
        const auto got = boundary(optimal_region(g, k));
        worst = std::max(worst, oracle::polyline_gap(got, want));
      }
    }
  }
  return {worst <= 1e-9, "max gap " + str(worst)};
}

Outcome delta_one_at_log_two() {
  const std::vector<double> d = optimal_slack_terms(std::log(2.0), 2);
  const auto outcomes = oracle::materialize(canonical_pair({std::log(2.0), 0.0}), 2);
  DiscretePair prod;
  for (const auto& [a, b] : outcomes) {
    prod.p0.push_back(static_cast<double>(a));
    prod.p1.push_back(static_cast<double>(b));
  }
  // TV = max over tests of 1 - pmd - pfa.
  double tv = 0.0;
  for (const PrivacyPoint& p : brute_force_region(prod)) tv = std::max(tv, 1.0 - p.pmd - p.pfa);
  const double err = std::max(std::abs(d[1] - 1.0 / 3.0), std::abs(d[1] - tv));
  return {err <= 1e-12, "delta_1 " + str(d[1]) + " tv " + str(tv)};
}

Outcome reference_parameters() {
  const EpsDelta g{0.1, 0.001};
  const int k = 30;
  const double slack = 0.01;
  std::vector<oracle::Big> steps(k, oracle::Big("0.1"));
  const double simp_want =
      static_cast<double>(oracle::closed_form_terms(steps, oracle::Big("0.01"))[1]);
  const double drv_want =
      static_cast<double>(oracle::drv_eps(oracle::Big("0.1"), k, oracle::Big("0.01")));
  const double simp = simplified(g, k, slack).eps;
  const double d = drv(g, k, slack).eps;
  const double b = basic(g, k).eps;
  const double err = std::max({std::abs(simp - simp_want), std::abs(d - drv_want),
                               std::abs(b - 3.0), std::abs(simp - 1.7090),
                               std::abs(d - 1.9778)});
  const PrivacyRegion opt = optimal_region(g, k);
  const PrivacyRegion sr = region_from_eps_delta(simplified(g, k, slack));
  const PrivacyRegion dr = region_from_eps_delta(drv(g, k, slack));
  const bool nested = contains_region(sr, opt) && contains_region(dr, sr);
  // Goldens are quoted to four places; allow for the rounding there.
  const bool ok = std::abs(simp - simp_want) <= 1e-6 && std::abs(d - drv_want) <= 1e-6 &&
                  std::abs(b - 3.0) <= 1e-6 && err <= 5e-5 && nested;
  return {ok, "simplified " + str(simp) + " drv " + str(d) + " basic " + str(b) +
                  (nested ? " nested" : " NOT nested")};
}

Outcome hockey_stick_oracle() {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<std::size_t> size(1, 4);
  std::uniform_real_distribution<double> eps(0.0, 3.0);
  double worst = 0.0;
  for (int t = 0; t < 200; ++t) {
    const DiscretePair p = oracle::random_pair(rng, size(rng));
    const double e = eps(rng);
    const double want = static_cast<double>(oracle::subset_hockey_stick(p, e));
    worst = std::max(worst, std::abs(hockey_stick(p, e) - want));
  }
  return {worst <= 1e-12, "max error " + str(worst)};
}

Outcome geometric_optimality() {
  double worst = 0.0;
  for (double eps : {0.2, 0.5}) {
    for (int k = 1; k <= 5; ++k) {
      const auto got = boundary(region_from_llr(product_pair(geometric_pair(eps, 40), k)));
      const auto want = boundary(optimal_region({eps, 0.0}, k));
      worst = std::max(worst, oracle::polyline_gap(got, want));
    }
  }
  return {worst <= 1e-6, "max gap " + str(worst)};
}

Outcome gaussian_sizing() {
  bool ok = true;
  double worst_disc = 0.0;
  double worst_ratio = 0.0;
  for (int k : {1, 10, 100}) {
    for (double eps : {0.1, 0.5, 1.0}) {
      for (double delta : {1e-2, 1e-4}) {
        const double sigma = std::sqrt(gaussian_variance(1.0, {eps, delta}, k));
        const GaussianCurve c = GaussianCurve::of(1.0, sigma, k);
        const double exact = gaussian_delta(c, eps);
        ok = ok && exact <= delta;
        worst_ratio = std::max(worst_ratio, exact / delta);
        const DiscretePair p =
            discretize(MechanismSpec::gaussian(c.m, 1.0), {-10.0, 10.0 + c.m, 1 << 14});
        worst_disc = std::max(worst_disc, std::abs(hockey_stick(p, eps) - exact));
      }
    }
  }
  return {ok && worst_disc <= 1e-4,
          "max delta/target " + str(worst_ratio) + " max discretization gap " + str(worst_disc)};
}

Outcome heterogeneous_consistency() {
  int equal = 0;
  for (double eps : {0.01, 0.3, 1.2}) {
    for (double delta : {0.0, 1e-5, 0.01}) {
      for (int k : {1, 7, 64}) {
        const EpsDelta g{eps, delta};
        const EpsDelta a = heterogeneous(std::vector<EpsDelta>(k, g), 0.02);
        const EpsDelta b = simplified(g, k, 0.02);
        if (a.eps == b.eps && a.delta == b.delta) ++equal;
      }
    }
  }
  return {equal == 27, std::to_string(equal) + "/27 identical"};
}

Outcome monte_carlo() {
  const EpsDelta g{0.1, 0.001};
  const auto points =
      estimate_curve_auto(non_adaptive(MechanismSpec::canonical(g)), 30, 100000, 1);
  const ContainmentReport rep = check_within(points, optimal_region(g, 30));
  return {rep.verdict == Verdict::kPass && rep.violations == 0 && rep.near_boundary >= 5,
          std::string(to_string(rep.verdict)) + " points " + std::to_string(points.size()) +
              " violations " + std::to_string(rep.violations) + " near boundary " +
              std::to_string(rep.near_boundary)};
}

Outcome relax_and_tv() {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> e(0.0, 3.0), d(0.0, 0.9), extra(0.0, 2.0);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const EpsDelta g{e(rng), d(rng)};
    const double target = g.eps + extra(rng);
    // Minimal delta at the new slope is the hockey stick of the canonical pair.
    const EpsDelta r = relax(g, target);
    const double minimal = hockey_stick(canonical_pair(g), target);
    worst = std::max(worst, std::abs(r.delta - minimal));
    if (!contains_region(region_from_eps_delta(r), region_from_eps_delta(g))) worst = 1.0;
    // Largest 1 - pmd - pfa over the boundary sits at the corner.
    double tv = 0.0;
    for (const PrivacyPoint& p : boundary(region_from_eps_delta(g))) {
      tv = std::max(tv, 1.0 - p.pmd - p.pfa);
    }
    const double corner = (1.0 - g.delta) / (1.0 + std::exp(g.eps));
    worst = std::max({worst, std::abs(tv_upper_bound(g) - tv),
                      std::abs(tv_upper_bound(g) - (1.0 - 2.0 * corner))});
  }
  return {worst <= 1e-9, "max error " + str(worst)};
}

Outcome calibration_soundness() {
  const EpsDelta target{0.5, 0.01};
  const int k = 25;
  const EpsDelta q = per_query_budget(target, k);
  const bool budget = forward_check(q, k, target).meets;
  const double b = laplace_scale(laplace_variance(1.0, target, k));
  const bool lap = forward_check({laplace_pair_eps(1.0, b), 0.0}, k, target).meets;
  const double sigma = std::sqrt(gaussian_variance(1.0, target, k));
  const bool gau = gaussian_delta(GaussianCurve::of(1.0, sigma, k), target.eps) <= target.delta;
  const double e0 = calibrate_eps0(target, k);
  const bool cal = forward_check({e0, q.delta}, k, target).meets && e0 >= q.eps;
  return {budget && lap && gau && cal,
          std::string("budget ") + (budget ? "ok" : "miss") + " laplace " + (lap ? "ok" : "miss") +
              " gaussian " + (gau ? "ok" : "miss") + " calibrated " + str(e0) + " vs " +
              str(q.eps)};
}

}  // namespace

int main() {
  const std::vector<Check> checks{
      {1, "exact region matches materialized product hull", 10.0, exact_region},
      {2, "delta_1 at ln 2 equals product TV", 0.0, delta_one_at_log_two},
      {3, "closed-form goldens and nesting", 1.0, reference_parameters},
      {4, "hockey stick equals subset maximum", 5.0, hockey_stick_oracle},
      {5, "composed geometric pair gives the optimal region", 30.0, geometric_optimality},
      {6, "Gaussian variance meets delta; discretization agrees", 10.0, gaussian_sizing},
      {7, "heterogeneous equals homogeneous bit for bit", 0.0, heterogeneous_consistency},
      {8, "Monte Carlo points inside the optimal region", 60.0, monte_carlo},
      {9, "relax minimality and TV corner identity", 0.0, relax_and_tv},
      {10, "calibration forward checks", 0.0, calibration_soundness},
  };
  int failed = 0;
  for (const Check& c : checks) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.budget_s > 0.0 && secs > c.budget_s) {
      o.ok = false;
      o.detail += " over time budget " + str(c.budget_s) + " s";
    }
    std::printf("%s %2d %s (%.3f s): %s\n", o.ok ? "PASS" : "FAIL", c.id, c.name, secs,
                o.detail.c_str());
    if (!o.ok) ++failed;
  }
  std::printf("%d/%zu passed\n", static_cast<int>(checks.size()) - failed, checks.size());
  return failed == 0 ? 0 : 1;
}
