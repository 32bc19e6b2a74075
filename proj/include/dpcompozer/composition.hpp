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

// Guarantees for k-fold adaptive composition of (eps, delta)-DP mechanisms.
//
//   basic       (k eps, k delta)
//   drv         k eps (e^eps - 1) + eps sqrt(2k log(1/slack)), k delta + slack
//   optimal     exact region: intersection over i <= k/2 of
//               R((k - 2i) eps, 1 - (1 - delta)^k (1 - delta_i))
//   simplified  closed-form outer bound of the exact region
//   heterogeneous  the closed form with per-step sums in place of k-multiples

#ifndef DPCOMPOZER_COMPOSITION_HPP_
#define DPCOMPOZER_COMPOSITION_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <ranges>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "dpcompozer/numeric.hpp"
#include "dpcompozer/region.hpp"

namespace dpcompozer {

namespace detail {
inline void require_steps(int k) {
  if (k < 1) throw std::invalid_argument("number of compositions k must be >= 1");
}
inline void require_open_slack(double slack) {
  if (!(slack > 0.0 && slack < 1.0)) {
    throw std::invalid_argument("slack delta must lie in (0, 1), got " +
                                std::to_string(slack));
  }
}
// 1 - (1 - delta)^k
inline double composed_delta_floor(double delta, int k) {
  return -std::expm1(k * std::log1p(-delta));
}
}  // namespace detail

inline EpsDelta basic(const EpsDelta& g, int k) {
  validate(g);
  detail::require_steps(k);
  return {k * g.eps, std::min(k * g.delta, 1.0)};
}

inline EpsDelta drv(const EpsDelta& g, int k, double slack) {
  validate(g);
  detail::require_steps(k);
  if (!(slack > 0.0 && slack <= 1.0)) {
    throw std::invalid_argument("drv: slack delta must lie in (0, 1], got " +
                                std::to_string(slack));
  }
  const double eps = k * g.eps * std::expm1(g.eps) +
                     g.eps * std::sqrt(2.0 * k * std::log(1.0 / slack));
  return {eps, std::min(k * g.delta + slack, 1.0)};
}

// delta_i for i = 0..floor(k/2). Each summand
//   C(k,l) (e^{(k-l)eps} - e^{(k-2i+l)eps}) / (1 + e^eps)^k
// is formed as exp(log C(k,l) + (k-l)eps - k log(1+e^eps)) * (1 - e^{-2(i-l)eps}),
// and summands that underflow are skipped.
inline std::vector<double> optimal_slack_terms(double eps, int k) {
  detail::require_steps(k);
  const int half = k / 2;
  std::vector<double> out(static_cast<std::size_t>(half) + 1, 0.0);
  if (eps == 0.0) return out;

  const double log_norm = k * numeric::softplus(eps);
  std::vector<double> log_head(static_cast<std::size_t>(half));
  int first = half, last = -1;
  for (int l = 0; l < half; ++l) {
    log_head[l] = numeric::log_binomial(k, l) + (k - l) * eps - log_norm;
    if (log_head[l] > -745.0) {
      first = std::min(first, l);
      last = l;
    }
  }
  std::vector<double> terms;
  for (int i = 1; i <= half; ++i) {
    terms.clear();
    for (int l = first; l < i && l <= last; ++l) {
      terms.push_back(std::exp(log_head[l]) * -std::expm1(-2.0 * (i - l) * eps));
    }
    out[i] = numeric::pairwise_sum(terms);
  }
  return out;
}

// Exact privacy region of k-fold composition of (eps, delta)-DP mechanisms.
// Lines with (k - 2i) eps above kEpsCap are clamped there.
inline PrivacyRegion optimal_region(const EpsDelta& g, int k) {
  validate(g);
  detail::require_steps(k);
  const double floor = detail::composed_delta_floor(g.delta, k);
  if (g.eps == 0.0) return region_from_eps_delta({0.0, floor});

  const double keep = 1.0 - floor;
  const std::vector<double> slack = optimal_slack_terms(g.eps, k);
  std::vector<EpsDelta> lines;
  for (int i = 0; i <= k / 2; ++i) {
    lines.push_back({(k - 2 * i) * g.eps, numeric::clamp01(floor + keep * slack[i])});
  }
  return PrivacyRegion::from_lines(std::move(lines));
}

namespace detail {
inline double delta_on_boundary(std::span<const PrivacyPoint> vertices,
                                double target_eps) {
  const double scale = std::exp(target_eps);
  double worst = 0.0;
  for (const PrivacyPoint& v : vertices) {
    worst = std::max(worst, 1.0 - v.pfa - scale * v.pmd);
  }
  return numeric::clamp01(worst);
}
}  // namespace detail

// Smallest delta' with optimal_region(g, k) inside R(target_eps, delta').
inline double optimal_delta_at(const EpsDelta& g, int k, double target_eps) {
  if (!(target_eps >= 0.0)) {
    throw std::invalid_argument("target eps must be nonnegative");
  }
  const std::vector<PrivacyPoint> v = boundary(optimal_region(g, k));
  return detail::delta_on_boundary(v, target_eps);
}

// Smallest eps' with optimal_delta_at(g, k, eps') <= delta_budget, or +inf
// when no eps' reaches the budget.
inline double optimal_eps_at(const EpsDelta& g, int k, double delta_budget) {
  const std::vector<PrivacyPoint> v = boundary(optimal_region(g, k));
  auto delta_at = [&](double t) { return detail::delta_on_boundary(v, t); };
  if (delta_at(0.0) <= delta_budget) return 0.0;
  double hi = std::min(k * g.eps, kEpsCap);
  if (delta_at(hi) > delta_budget) return kInf;
  double lo = 0.0;
  while (hi - lo > 1e-13 * std::max(1.0, hi)) {
    const double mid = 0.5 * (lo + hi);
    (delta_at(mid) <= delta_budget ? hi : lo) = mid;
  }
  return hi;
}

// The three candidate values of the closed-form bound and the guarantee.
struct ClosedFormBound {
  EpsDelta guarantee;
  std::array<double, 3> terms;  // linear, log(e + .) term, log(1/slack) term
};

// Closed-form bound for any sequence of per-step guarantees. The homogeneous
// bound runs through the same accumulation so both agree to the bit when the
// steps coincide.
template <std::ranges::input_range Steps>
ClosedFormBound closed_form_bound(Steps&& steps, double slack) {
  detail::require_open_slack(slack);
  double sum_eps = 0.0, drift = 0.0, sum_sq = 0.0, log_keep = 0.0;
  std::size_t n = 0;
  for (const EpsDelta& g : steps) {
    validate(g);
    sum_eps += g.eps;
    drift += g.eps * std::tanh(0.5 * g.eps);
    sum_sq += g.eps * g.eps;
    log_keep += std::log1p(-g.delta);
    ++n;
  }
  if (n == 0) throw std::invalid_argument("at least one composition step required");

  const double near = std::sqrt(2.0 * sum_sq *
                                std::log(std::numbers::e + std::sqrt(sum_sq) / slack));
  const double far = std::sqrt(2.0 * sum_sq * std::log(1.0 / slack));
  ClosedFormBound out;
  out.terms = {sum_eps, drift + near, drift + far};
  out.guarantee.eps = *std::min_element(out.terms.begin(), out.terms.end());
  out.guarantee.delta = numeric::clamp01(-std::expm1(log_keep + std::log1p(-slack)));
  return out;
}

inline ClosedFormBound simplified_bound(const EpsDelta& g, int k, double slack) {
  detail::require_steps(k);
  return closed_form_bound(
      std::views::iota(0, k) | std::views::transform([&g](int) { return g; }), slack);
}

inline EpsDelta simplified(const EpsDelta& g, int k, double slack) {
  return simplified_bound(g, k, slack).guarantee;
}

inline EpsDelta heterogeneous(std::span<const EpsDelta> steps, double slack) {
  if (steps.empty()) throw std::invalid_argument("heterogeneous needs at least one step");
  return closed_form_bound(steps, slack).guarantee;
}

// min(sqrt(k eps^2), 1/2); throws when that is zero (eps = 0).
inline double default_slack(std::span<const EpsDelta> steps) {
  double sum_sq = 0.0;
  for (const EpsDelta& g : steps) sum_sq += g.eps * g.eps;
  const double s = std::min(std::sqrt(sum_sq), 0.5);
  if (!(s > 0.0)) {
    throw std::invalid_argument("no default slack when every eps is 0; pass one explicitly");
  }
  return s;
}

inline double default_slack(const EpsDelta& g, int k) {
  detail::require_steps(k);
  const double s = std::min(std::sqrt(static_cast<double>(k)) * g.eps, 0.5);
  if (!(s > 0.0)) {
    throw std::invalid_argument("no default slack when eps is 0; pass one explicitly");
  }
  return s;
}

enum class Method { kBasic, kDrv, kOptimal, kSimplified, kHeterogeneous };

constexpr std::string_view to_string(Method m) {
  switch (m) {
    case Method::kBasic: return "basic";
    case Method::kDrv: return "drv";
    case Method::kOptimal: return "optimal";
    case Method::kSimplified: return "simplified";
    case Method::kHeterogeneous: return "heterogeneous";
  }
  return "?";
}

struct HomogeneousSteps {
  EpsDelta step;
  int k = 1;
};

struct CompositionQuery {
  std::variant<HomogeneousSteps, std::vector<EpsDelta>> per_step;
  std::optional<double> slack;  // default_slack when unset
};

struct CompositionReport {
  Method method;
  double result_eps = 0.0;
  double result_delta = 0.0;
  std::optional<PrivacyRegion> region;
  std::string notes;
};

struct Nesting {
  Method inner;
  Method outer;
  bool holds;
};

struct Comparison {
  double slack = 0.0;
  std::vector<CompositionReport> reports;  // ascending result_eps
  std::vector<Nesting> nesting;
};

namespace detail {
inline CompositionReport make_report(Method m, EpsDelta g, std::string notes) {
  return {m, g.eps, g.delta, region_from_eps_delta(g), std::move(notes)};
}

inline const CompositionReport& find(const std::vector<CompositionReport>& v, Method m) {
  return *std::find_if(v.begin(), v.end(),
                       [m](const CompositionReport& r) { return r.method == m; });
}
}  // namespace detail

// Every applicable method at the query's slack, plus region nesting checks.
inline Comparison compare(const CompositionQuery& q) {
  Comparison out;
  if (const auto* h = std::get_if<HomogeneousSteps>(&q.per_step)) {
    const EpsDelta g = h->step;
    const int k = h->k;
    out.slack = q.slack ? *q.slack : default_slack(g, k);
    const double slack = out.slack;

    out.reports.push_back(detail::make_report(Method::kBasic, basic(g, k), "k eps, k delta"));
    out.reports.push_back(detail::make_report(Method::kDrv, drv(g, k, slack),
                                              "delta = k delta + slack"));
    const ClosedFormBound cf = simplified_bound(g, k, slack);
    out.reports.push_back(detail::make_report(
        Method::kSimplified, cf.guarantee,
        "terms " + std::to_string(cf.terms[0]) + ", " + std::to_string(cf.terms[1]) +
            ", " + std::to_string(cf.terms[2])));
    // The exact region, read off at the simplified bound's delta.
    CompositionReport opt{Method::kOptimal, 0.0, cf.guarantee.delta, optimal_region(g, k),
                          "smallest eps on the exact region at the same delta"};
    opt.result_eps = optimal_eps_at(g, k, cf.guarantee.delta);
    out.reports.push_back(std::move(opt));

    auto nest = [&](Method inner, Method outer) {
      out.nesting.push_back({inner, outer,
                             contains_region(*detail::find(out.reports, outer).region,
                                             *detail::find(out.reports, inner).region)});
    };
    nest(Method::kOptimal, Method::kSimplified);
    nest(Method::kSimplified, Method::kDrv);
    nest(Method::kOptimal, Method::kBasic);
  } else {
    const auto& steps = std::get<std::vector<EpsDelta>>(q.per_step);
    if (steps.empty()) throw std::invalid_argument("heterogeneous query has no steps");
    out.slack = q.slack ? *q.slack : default_slack(steps);
    EpsDelta sum{0.0, 0.0};
    for (const EpsDelta& g : steps) {
      validate(g);
      sum.eps += g.eps;
      sum.delta += g.delta;
    }
    sum.delta = std::min(sum.delta, 1.0);
    out.reports.push_back(detail::make_report(Method::kBasic, sum, "sum eps, sum delta"));
    out.reports.push_back(detail::make_report(Method::kHeterogeneous,
                                              heterogeneous(steps, out.slack),
                                              "closed form over per-step sums"));
  }
  std::stable_sort(out.reports.begin(), out.reports.end(),
                   [](const CompositionReport& a, const CompositionReport& b) {
                     return a.result_eps < b.result_eps;
                   });
  return out;
}

}  // namespace dpcompozer

#endif  // DPCOMPOZER_COMPOSITION_HPP_
