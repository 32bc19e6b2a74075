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

// Calibration: per-query budgets and noise scales that meet a composed
// (eps, delta) target. All logarithms are natural.

#ifndef DPCOMPOZER_CALIBRATION_HPP_
#define DPCOMPOZER_CALIBRATION_HPP_

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "dpcompozer/composition.hpp"
#include "dpcompozer/mechanisms.hpp"
#include "dpcompozer/numeric.hpp"
#include "dpcompozer/region.hpp"

namespace dpcompozer {

// Largest eps for which the closed-form budget split is valid.
inline constexpr double kMaxCalibrationEps = 0.9;

namespace detail {
inline void require_high_privacy(const EpsDelta& target) {
  if (!(target.eps > 0.0 && target.eps <= kMaxCalibrationEps)) {
    throw std::domain_error("target eps " + std::to_string(target.eps) +
                            " outside the valid range (0, 0.9]");
  }
  if (!(target.delta > 0.0 && target.delta <= 1.0)) {
    throw std::domain_error("target delta " + std::to_string(target.delta) +
                            " outside the valid range (0, 1]");
  }
}

// log(e + eps/delta)
inline double log_e_plus(double eps, double delta) {
  return std::log(std::numbers::e + eps / delta);
}
}  // namespace detail

// (eps / sqrt(4k log(e + eps/delta)), delta / 2k).
inline EpsDelta per_query_budget(const EpsDelta& target, int k) {
  detail::require_high_privacy(target);
  detail::require_steps(k);
  return {target.eps / std::sqrt(4.0 * k * detail::log_e_plus(target.eps, target.delta)),
          target.delta / (2.0 * k)};
}

// Largest slack s with 1 - (1 - delta0)^k (1 - s) <= target_delta; <= 0 when
// the per-query deltas alone use up the budget.
inline double remaining_slack(double target_delta, double delta0, int k) {
  detail::require_steps(k);
  return -std::expm1(std::log1p(-target_delta) - k * std::log1p(-delta0));
}

// Composed guarantee of k uses of `per_query`, spending the whole remaining
// delta budget as slack, and whether it meets `target`.
struct ForwardCheck {
  EpsDelta composed;
  double slack = 0.0;
  bool meets = false;
};

inline ForwardCheck forward_check(const EpsDelta& per_query, int k, const EpsDelta& target) {
  ForwardCheck out;
  out.slack = std::min(remaining_slack(target.delta, per_query.delta, k),
                       std::nextafter(1.0, 0.0));
  if (!(out.slack > 0.0)) {
    out.composed = basic(per_query, k);
    out.meets = out.composed.eps <= target.eps && out.composed.delta <= target.delta;
    return out;
  }
  out.composed = simplified(per_query, k, out.slack);
  out.meets = out.composed.eps <= target.eps &&
              out.composed.delta <= target.delta + 1e-15;
  return out;
}

// Variance 8 k D^2 log(e + eps/delta) / eps^2 of per-query Laplace noise.
inline double laplace_variance(double sensitivity, const EpsDelta& target, int k) {
  detail::require_high_privacy(target);
  detail::require_steps(k);
  if (!(sensitivity > 0.0)) throw std::invalid_argument("sensitivity must be positive");
  return 8.0 * k * sensitivity * sensitivity *
         detail::log_e_plus(target.eps, target.delta) / (target.eps * target.eps);
}

// Laplace scale b with variance 2 b^2.
inline double laplace_scale(double variance) { return std::sqrt(0.5 * variance); }

// max(8 k D^2 log(e + eps/delta) / eps^2, k D^2 / (4 eps)).
inline double gaussian_variance(double sensitivity, const EpsDelta& target, int k) {
  detail::require_steps(k);
  if (!(sensitivity > 0.0)) throw std::invalid_argument("sensitivity must be positive");
  if (!(target.eps > 0.0)) throw std::invalid_argument("target eps must be positive");
  if (!(target.delta > 0.0 && target.delta <= 1.0)) {
    throw std::invalid_argument("target delta must lie in (0, 1]");
  }
  const double d2 = sensitivity * sensitivity;
  const double main = 8.0 * k * d2 * detail::log_e_plus(target.eps, target.delta) /
                      (target.eps * target.eps);
  return std::max(main, k * d2 / (4.0 * target.eps));
}

// Johnson-Lindenstrauss cut-query mechanism parameters: r projection rows,
// per-row budget (eps0, delta0) for r-fold composition, added weight w, and
// the additive error tau per unit of |S| (multiply by the cut side size).
struct JlParams {
  int r = 0;
  double eps0 = 0.0;
  double delta0 = 0.0;
  double w = 0.0;
  double tau = 0.0;
};

inline void validate_jl(const EpsDelta& target, double eta, double nu) {
  if (!(eta > 0.0 && eta < 1.0) || !(nu > 0.0 && nu < 1.0)) {
    throw std::invalid_argument("eta and nu must lie in (0, 1)");
  }
  if (!(target.eps > 0.0) || !(target.delta > 0.0 && target.delta < 1.0)) {
    throw std::invalid_argument("jl target needs eps > 0 and delta in (0, 1)");
  }
}

inline int jl_rows(double eta, double nu) {
  return static_cast<int>(std::ceil(8.0 * std::log(2.0 / nu) / (eta * eta)));
}

inline JlParams jl_params(const EpsDelta& target, double eta, double nu) {
  validate_jl(target, eta, nu);
  JlParams p;
  p.r = jl_rows(eta, nu);
  p.eps0 = target.eps /
           std::sqrt(4.0 * p.r * detail::log_e_plus(2.0 * target.eps, target.delta));
  p.delta0 = target.delta / (2.0 * p.r);
  p.w = 4.0 / p.eps0 * std::log(2.0 / p.delta0);
  p.tau = 2.0 * eta * p.w;
  return p;
}

// The same parameters under the older split eps0 = eps / sqrt(4 r log(2/delta)).
inline JlParams jl_params_legacy(const EpsDelta& target, double eta, double nu) {
  validate_jl(target, eta, nu);
  JlParams p;
  p.r = jl_rows(eta, nu);
  p.eps0 = target.eps / std::sqrt(4.0 * p.r * std::log(2.0 / target.delta));
  p.delta0 = target.delta / (2.0 * p.r);
  p.w = 4.0 / p.eps0 * std::log(2.0 / p.delta0);
  p.tau = 2.0 * eta * p.w;
  return p;
}

// Largest per-query eps0 whose closed-form k-fold bound at (delta0, slack)
// stays within target.eps. The bound is strictly increasing in eps0, so
// bisection is exact up to the tolerance.
inline double calibrate_eps0(const EpsDelta& target, int k, double delta0, double slack,
                             double tolerance = 1e-12) {
  validate(target);
  detail::require_steps(k);
  if (!(target.eps > 0.0)) throw std::invalid_argument("target eps must be positive");
  if (!(delta0 >= 0.0 && delta0 < 1.0)) {
    throw std::invalid_argument("per-query delta must lie in [0, 1)");
  }
  detail::require_open_slack(slack);
  const double spent = -std::expm1(k * std::log1p(-delta0) + std::log1p(-slack));
  if (spent > target.delta + 1e-12) {
    throw std::domain_error("infeasible delta split: per-query delta " +
                            std::to_string(delta0) + " and slack " + std::to_string(slack) +
                            " compose to " + std::to_string(spent) + " > target delta " +
                            std::to_string(target.delta));
  }
  auto composed = [&](double e0) { return simplified({e0, delta0}, k, slack).eps; };

  double lo = 0.0, hi = target.eps;
  for (int grow = 0; composed(hi) <= target.eps; ++grow) {
    if (grow > 60) throw std::domain_error("calibrate_eps0: no upper bracket");
    lo = hi;
    hi *= 2.0;
  }
  while (hi - lo > tolerance) {
    const double mid = 0.5 * (lo + hi);
    (composed(mid) <= target.eps ? lo : hi) = mid;
  }
  return lo;
}

// Default split: delta0 = delta / 2k, slack = whatever delta budget remains.
inline double calibrate_eps0(const EpsDelta& target, int k) {
  detail::require_steps(k);
  const double delta0 = target.delta / (2.0 * k);
  return calibrate_eps0(target, k, delta0,
                        std::min(remaining_slack(target.delta, delta0, k),
                                 std::nextafter(1.0, 0.0)));
}

}  // namespace dpcompozer

#endif  // DPCOMPOZER_CALIBRATION_HPP_
