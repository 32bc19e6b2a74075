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

// The k-fold composition experiment and Monte-Carlo estimation of the
// (P_MD, P_FA) points reached by likelihood-ratio threshold tests.

#ifndef DPCOMPOZER_EXPERIMENT_HPP_
#define DPCOMPOZER_EXPERIMENT_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <functional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "dpcompozer/mechanisms.hpp"
#include "dpcompozer/numeric.hpp"
#include "dpcompozer/region.hpp"

namespace dpcompozer {

// Chooses the mechanism for `round` (0-based) from the outcomes seen so far
// and the adversary's own randomness. Must not depend on anything else.
using AdversaryStrategy = std::function<MechanismSpec(
    int round, std::span<const double> transcript, std::uint64_t randomness)>;

inline AdversaryStrategy non_adaptive(MechanismSpec spec) {
  validate(spec);
  return [spec](int, std::span<const double>, std::uint64_t) { return spec; };
}

struct ViewSample {
  int b = 0;
  std::uint64_t r = 0;
  std::vector<double> ys;
  double llr = 0.0;  // log P0(view) / P1(view)
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
  return splitmix64(splitmix64(splitmix64(seed) ^ a) ^ b);
}

namespace detail {
inline void check_bit(int b) {
  if (b != 0 && b != 1) throw std::invalid_argument("hypothesis bit must be 0 or 1");
}
}  // namespace detail

// One run of the experiment under hypothesis b. The strategy is replayed on
// the final transcript and must request the same mechanisms again.
inline ViewSample run_compose(const AdversaryStrategy& strategy, int k, int b,
                              std::uint64_t seed) {
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  detail::check_bit(b);
  if (!strategy) throw std::invalid_argument("empty adversary strategy");
  ViewSample view;
  view.b = b;
  view.r = derive_seed(seed, 0);
  view.ys.reserve(static_cast<std::size_t>(k));
  std::vector<MechanismSpec> chosen;
  chosen.reserve(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    const MechanismSpec spec = strategy(i, std::span<const double>(view.ys), view.r);
    validate(spec);
    std::mt19937_64 rng(derive_seed(seed, 1, static_cast<std::uint64_t>(i)));
    const double y = sample(spec, b, rng);
    view.llr += log_likelihood_ratio(spec, y);
    view.ys.push_back(y);
    chosen.push_back(spec);
  }
  for (int i = 0; i < k; ++i) {
    const auto prefix = std::span<const double>(view.ys).first(static_cast<std::size_t>(i));
    if (!(strategy(i, prefix, view.r) == chosen[static_cast<std::size_t>(i)])) {
      throw std::runtime_error("adversary strategy is not deterministic in round " +
                               std::to_string(i));
    }
  }
  // +inf and -inf in one view cannot happen for a valid pair; guard anyway.
  if (std::isnan(view.llr)) throw std::runtime_error("view has undefined likelihood ratio");
  return view;
}

// Worker count: hardware concurrency, capped by DPCOMPOZER_THREADS if set.
inline unsigned worker_count() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* cap = std::getenv("DPCOMPOZER_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(cap, &end, 10);
    if (end != cap && v >= 1) n = std::min(n, static_cast<unsigned>(v));
  }
  return n;
}

// View llrs of `trials` independent runs under hypothesis b. Trial j uses
// a seed derived from (seed, b, j), so the output does not depend on threading.
inline std::vector<double> simulate_llrs(const AdversaryStrategy& strategy, int k, int b,
                                         std::size_t trials, std::uint64_t seed) {
  detail::check_bit(b);
  std::vector<double> out(trials);
  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(worker_count(), std::max<std::size_t>(trials, 1)));
  auto work = [&](std::size_t lo, std::size_t hi) {
    for (std::size_t j = lo; j < hi; ++j) {
      out[j] = run_compose(strategy, k, b, derive_seed(seed, static_cast<std::uint64_t>(b) + 2, j)).llr;
    }
  };
  if (workers <= 1) {
    work(0, trials);
    return out;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  const std::size_t chunk = (trials + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    const std::size_t lo = std::min(trials, w * chunk);
    const std::size_t hi = std::min(trials, lo + chunk);
    pool.emplace_back([&, w, lo, hi] {
      try {
        work(lo, hi);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

// Minimum trials for a PASS/FAIL verdict.
inline constexpr std::size_t kMinVerdictTrials = 1000;
inline constexpr double kCiMultiplier = 3.0;

struct CurvePoint {
  double threshold = 0.0;
  PrivacyPoint point;
  double radius_pmd = 0.0;
  double radius_pfa = 0.0;
  std::size_t trials = 0;
};

inline double ci_radius(double p, std::size_t n) {
  if (n == 0) return 1.0;
  return kCiMultiplier * std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

// Test "reject H0 when llr < t". Views with llr == t are rejected with
// probability tie_reject (0 by default), which reaches hull points between
// two deterministic tests. Both inputs must be sorted.
inline CurvePoint estimate_point(std::span<const double> llr0, std::span<const double> llr1,
                                 double t, double tie_reject = 0.0) {
  auto rate_below = [&](std::span<const double> v) {
    const auto lo = std::lower_bound(v.begin(), v.end(), t);
    const auto hi = std::upper_bound(lo, v.end(), t);
    const double n = static_cast<double>(v.size());
    return (static_cast<double>(lo - v.begin()) + tie_reject * static_cast<double>(hi - lo)) / n;
  };
  CurvePoint c;
  c.threshold = t;
  c.trials = std::min(llr0.size(), llr1.size());
  c.point.pfa = rate_below(llr0);
  c.point.pmd = 1.0 - rate_below(llr1);
  c.radius_pfa = ci_radius(c.point.pfa, llr0.size());
  c.radius_pmd = ci_radius(c.point.pmd, llr1.size());
  return c;
}

// Midpoints between consecutive distinct finite llr values, plus one
// threshold below and one above everything observed.
inline std::vector<double> auto_thresholds(std::span<const double> llr0,
                                           std::span<const double> llr1) {
  std::vector<double> v;
  v.reserve(llr0.size() + llr1.size());
  for (double x : llr0) if (std::isfinite(x)) v.push_back(x);
  for (double x : llr1) if (std::isfinite(x)) v.push_back(x);
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end(), [](double a, double b) {
            return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(a));
          }),
          v.end());
  if (v.empty()) return {-1.0, 1.0};
  std::vector<double> t;
  t.reserve(v.size() + 1);
  t.push_back(v.front() - 1.0);
  for (std::size_t i = 1; i < v.size(); ++i) t.push_back(0.5 * (v[i - 1] + v[i]));
  t.push_back(v.back() + 1.0);
  return t;
}

inline std::vector<CurvePoint> estimate_curve(const AdversaryStrategy& strategy, int k,
                                              std::size_t trials,
                                              std::span<const double> thresholds,
                                              std::uint64_t seed) {
  if (!std::is_sorted(thresholds.begin(), thresholds.end())) {
    throw std::invalid_argument("thresholds must be sorted");
  }
  std::vector<double> l0 = simulate_llrs(strategy, k, 0, trials, seed);
  std::vector<double> l1 = simulate_llrs(strategy, k, 1, trials, seed);
  std::sort(l0.begin(), l0.end());
  std::sort(l1.begin(), l1.end());
  std::vector<CurvePoint> out;
  out.reserve(thresholds.size());
  for (double t : thresholds) out.push_back(estimate_point(l0, l1, t));
  return out;
}

// Same, with thresholds chosen by auto_thresholds from the simulated llrs.
inline std::vector<CurvePoint> estimate_curve_auto(const AdversaryStrategy& strategy, int k,
                                                   std::size_t trials, std::uint64_t seed) {
  std::vector<double> l0 = simulate_llrs(strategy, k, 0, trials, seed);
  std::vector<double> l1 = simulate_llrs(strategy, k, 1, trials, seed);
  std::sort(l0.begin(), l0.end());
  std::sort(l1.begin(), l1.end());
  std::vector<CurvePoint> out;
  for (double t : auto_thresholds(l0, l1)) out.push_back(estimate_point(l0, l1, t));
  return out;
}

enum class PointVerdict { kInside, kInsideWithinCi, kViolation };
enum class Verdict { kPass, kFail, kUndetermined };

constexpr std::string_view to_string(PointVerdict v) {
  switch (v) {
    case PointVerdict::kInside: return "inside";
    case PointVerdict::kInsideWithinCi: return "inside-within-ci";
    case PointVerdict::kViolation: return "violation";
  }
  return "?";
}

constexpr std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::kPass: return "PASS";
    case Verdict::kFail: return "FAIL";
    case Verdict::kUndetermined: return "UNDETERMINED";
  }
  return "?";
}

struct PointCheck {
  CurvePoint point;
  PointVerdict verdict = PointVerdict::kInside;
  bool near_boundary = false;  // the CI box touches the boundary
};

struct ContainmentReport {
  std::vector<PointCheck> points;
  std::size_t violations = 0;
  std::size_t near_boundary = 0;
  Verdict verdict = Verdict::kPass;
};

// Regions are up-closed toward (1, 1), so a point is inside within its CI iff
// the upper-right corner of its CI box is inside.
inline ContainmentReport check_within(std::span<const CurvePoint> points,
                                      const PrivacyRegion& region) {
  ContainmentReport rep;
  std::size_t min_trials = points.empty() ? 0 : points.front().trials;
  for (const CurvePoint& c : points) {
    min_trials = std::min(min_trials, c.trials);
    const PrivacyPoint hi{numeric::clamp01(c.point.pmd + c.radius_pmd), numeric::clamp01(c.point.pfa + c.radius_pfa)};
    const PrivacyPoint lo{numeric::clamp01(c.point.pmd - c.radius_pmd), numeric::clamp01(c.point.pfa - c.radius_pfa)};
    PointCheck pc{c};
    if (contains_point(region, c.point)) {
      pc.verdict = PointVerdict::kInside;
    } else if (contains_point(region, hi)) {
      pc.verdict = PointVerdict::kInsideWithinCi;
    } else {
      pc.verdict = PointVerdict::kViolation;
      ++rep.violations;
    }
    pc.near_boundary = pc.verdict != PointVerdict::kViolation && !contains_point(region, lo);
    if (pc.near_boundary) ++rep.near_boundary;
    rep.points.push_back(pc);
  }
  if (min_trials < kMinVerdictTrials) {
    rep.verdict = Verdict::kUndetermined;
  } else {
    rep.verdict = rep.violations == 0 ? Verdict::kPass : Verdict::kFail;
  }
  return rep;
}

}  // namespace dpcompozer

#endif  // DPCOMPOZER_EXPERIMENT_HPP_
