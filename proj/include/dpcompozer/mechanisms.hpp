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

// Mechanisms as output-distribution pairs (b = 0 vs b = 1).
//
// Discrete kinds (canonical, geometric) sample outcome indices, returned as
// doubles. Continuous kinds (laplace, gaussian) sample real outputs with the
// alternative hypothesis shifted by the sensitivity.

#ifndef DPCOMPOZER_MECHANISMS_HPP_
#define DPCOMPOZER_MECHANISMS_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dpcompozer/numeric.hpp"
#include "dpcompozer/region.hpp"
#include "dpcompozer/tradeoff.hpp"

namespace dpcompozer {

enum class MechanismKind { kCanonical, kGeometric, kLaplace, kGaussian };

constexpr std::string_view to_string(MechanismKind k) {
  switch (k) {
    case MechanismKind::kCanonical: return "canonical";
    case MechanismKind::kGeometric: return "geometric";
    case MechanismKind::kLaplace: return "laplace";
    case MechanismKind::kGaussian: return "gaussian";
  }
  return "?";
}

inline constexpr int kDefaultGeometricTruncation = 40;

struct MechanismSpec {
  MechanismKind kind = MechanismKind::kCanonical;
  double eps = 0.0;          // canonical, geometric
  double delta = 0.0;        // canonical
  int trunc = kDefaultGeometricTruncation;  // geometric
  double sensitivity = 1.0;  // laplace, gaussian
  double scale = 1.0;        // laplace b, gaussian sigma

  static MechanismSpec canonical(EpsDelta g) {
    return {MechanismKind::kCanonical, g.eps, g.delta};
  }
  static MechanismSpec geometric(double eps, int trunc = kDefaultGeometricTruncation) {
    return {MechanismKind::kGeometric, eps, 0.0, trunc};
  }
  static MechanismSpec laplace(double sensitivity, double b) {
    return {MechanismKind::kLaplace, 0.0, 0.0, 0, sensitivity, b};
  }
  static MechanismSpec gaussian(double sensitivity, double sigma) {
    return {MechanismKind::kGaussian, 0.0, 0.0, 0, sensitivity, sigma};
  }

  bool is_discrete() const {
    return kind == MechanismKind::kCanonical || kind == MechanismKind::kGeometric;
  }

  friend bool operator==(const MechanismSpec&, const MechanismSpec&) = default;
};

inline void validate(const MechanismSpec& s) {
  switch (s.kind) {
    case MechanismKind::kCanonical:
      validate(EpsDelta{s.eps, s.delta});
      return;
    case MechanismKind::kGeometric:
      if (!(s.eps > 0.0)) throw std::invalid_argument("geometric needs eps > 0");
      if (s.trunc < 2) throw std::invalid_argument("geometric truncation must be >= 2");
      return;
    case MechanismKind::kLaplace:
    case MechanismKind::kGaussian:
      if (!(s.sensitivity > 0.0) || !(s.scale > 0.0)) {
        throw std::invalid_argument("sensitivity and scale must be positive");
      }
      return;
  }
}

// Four outcomes {0, 1, 2, 3}:
//   P0 = (delta, (1-delta) e^eps/(1+e^eps), (1-delta)/(1+e^eps), 0)
//   P1 = P0 reversed.
inline DiscretePair canonical_pair(const EpsDelta& g) {
  validate(g);
  const double keep = 1.0 - g.delta;
  const double likely = keep * numeric::logistic(g.eps);
  const double unlikely = keep * numeric::logistic(-g.eps);
  return {{g.delta, likely, unlikely, 0.0}, {0.0, unlikely, likely, g.delta}};
}

// Double-geometric noise p(z) = tanh(eps/2) e^{-eps |z|} added to a counting
// query that is 0 under P0 and 1 under P1. Outcome index j is the value
// j - trunc on {-trunc, ..., trunc + 1}; mass beyond either end is folded
// onto the end point, which keeps P0(x) = e^eps P1(x) for x <= 0 and
// P1(x) = e^eps P0(x) for x >= 1 exact.
inline DiscretePair geometric_pair(double eps, int trunc = kDefaultGeometricTruncation) {
  validate(MechanismSpec::geometric(eps, trunc));
  const double c = std::tanh(0.5 * eps);
  // Tail sum over z >= m of c e^{-eps z}.
  const double tail_factor = c / -std::expm1(-eps);
  auto noise = [&](long z) { return c * std::exp(-eps * std::abs(static_cast<double>(z))); };
  auto tail = [&](long m) { return tail_factor * std::exp(-eps * static_cast<double>(m)); };

  const std::size_t n = 2 * static_cast<std::size_t>(trunc) + 2;
  DiscretePair pair{std::vector<double>(n), std::vector<double>(n)};
  for (std::size_t j = 0; j < n; ++j) {
    const long x = static_cast<long>(j) - trunc;
    if (x == -trunc) {
      pair.p0[j] = tail(trunc);
      pair.p1[j] = tail(trunc + 1);
    } else if (x == trunc + 1) {
      pair.p0[j] = tail(trunc + 1);
      pair.p1[j] = tail(trunc);
    } else {
      pair.p0[j] = noise(x);
      pair.p1[j] = noise(x - 1);
    }
  }
  return pair;
}

// eps of the (eps, 0)-DP Laplace mechanism with scale b.
inline double laplace_pair_eps(double sensitivity, double b) {
  if (!(sensitivity > 0.0) || !(b > 0.0)) {
    throw std::invalid_argument("sensitivity and scale must be positive");
  }
  return sensitivity / b;
}

// N(0, 1) against N(m, 1); k-fold Gaussian noise with sensitivity D and
// standard deviation sigma has m = D sqrt(k) / sigma.
struct GaussianCurve {
  double m = 1.0;

  static GaussianCurve of(double sensitivity, double sigma, int k = 1) {
    return {sensitivity * std::sqrt(static_cast<double>(k)) / sigma};
  }
};

// Exact hockey-stick divergence of the Gaussian pair:
//   Phi(m/2 - eps/m) - e^eps Phi(-m/2 - eps/m).
inline double gaussian_delta(const GaussianCurve& curve, double eps) {
  if (!(curve.m > 0.0)) throw std::invalid_argument("gaussian curve needs m > 0");
  const double m = curve.m;
  const double upper = numeric::normal_cdf(0.5 * m - eps / m);
  const double lower = std::exp(eps + numeric::log_normal_cdf(-0.5 * m - eps / m));
  return numeric::clamp01(upper - lower);
}

struct Grid {
  double lo = -8.0;
  double hi = 8.0;
  int bins = 1024;
};

namespace detail {
// cdf and survival function of the b-hypothesis output of a continuous spec.
struct ContinuousLaw {
  MechanismKind kind;
  double center;
  double scale;

  double cdf(double x) const {
    const double z = (x - center) / scale;
    if (kind == MechanismKind::kGaussian) return numeric::normal_cdf(z);
    return z < 0 ? 0.5 * std::exp(z) : 1.0 - 0.5 * std::exp(-z);
  }
  double sf(double x) const {
    const double z = (x - center) / scale;
    if (kind == MechanismKind::kGaussian) return numeric::normal_cdf(-z);
    return z > 0 ? 0.5 * std::exp(-z) : 1.0 - 0.5 * std::exp(z);
  }
  // Mass of [a, c), taking the difference on whichever side keeps precision.
  double mass(double a, double c) const {
    if (c <= center) return cdf(c) - cdf(a);
    if (a >= center) return sf(a) - sf(c);
    return 1.0 - sf(c) - cdf(a);
  }
};

inline ContinuousLaw law_of(const MechanismSpec& s, int b) {
  return {s.kind, b == 0 ? 0.0 : s.sensitivity, s.scale};
}
}  // namespace detail

// Bin masses of both hypotheses on [lo, hi) split into `bins` equal cells,
// plus one tail cell on each side. Coarsening is post-processing, so the
// hockey stick of the result never exceeds the continuous one.
inline DiscretePair discretize(const MechanismSpec& spec, const Grid& grid) {
  validate(spec);
  if (spec.is_discrete()) {
    throw std::invalid_argument("discretize needs a continuous mechanism");
  }
  if (!(grid.lo < grid.hi) || grid.bins < 8) {
    throw std::invalid_argument("grid needs lo < hi and at least 8 bins");
  }
  const std::size_t n = static_cast<std::size_t>(grid.bins) + 2;
  DiscretePair pair{std::vector<double>(n), std::vector<double>(n)};
  const double width = (grid.hi - grid.lo) / grid.bins;
  for (int b = 0; b < 2; ++b) {
    const detail::ContinuousLaw law = detail::law_of(spec, b);
    std::vector<double>& pmf = b == 0 ? pair.p0 : pair.p1;
    pmf.front() = law.cdf(grid.lo);
    pmf.back() = law.sf(grid.hi);
    for (int i = 0; i < grid.bins; ++i) {
      const double a = grid.lo + i * width;
      const double c = i + 1 == grid.bins ? grid.hi : grid.lo + (i + 1) * width;
      pmf[static_cast<std::size_t>(i) + 1] = std::max(law.mass(a, c), 0.0);
    }
  }
  return pair;
}

// The finite pair of a discrete spec.
inline DiscretePair pair_of(const MechanismSpec& spec) {
  validate(spec);
  switch (spec.kind) {
    case MechanismKind::kCanonical: return canonical_pair({spec.eps, spec.delta});
    case MechanismKind::kGeometric: return geometric_pair(spec.eps, spec.trunc);
    default: throw std::invalid_argument("pair_of needs a discrete mechanism");
  }
}

// One draw from the b-hypothesis output law.
inline double sample(const MechanismSpec& spec, int b, std::mt19937_64& rng) {
  if (b != 0 && b != 1) throw std::invalid_argument("hypothesis bit must be 0 or 1");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  switch (spec.kind) {
    case MechanismKind::kCanonical: {
      const DiscretePair pair = canonical_pair({spec.eps, spec.delta});
      const std::vector<double>& pmf = b == 0 ? pair.p0 : pair.p1;
      const double u = unit(rng);
      double cum = 0.0;
      int last = 0;
      for (int i = 0; i < 4; ++i) {
        if (pmf[i] <= 0.0) continue;
        last = i;
        cum += pmf[i];
        if (u < cum) return i;
      }
      return last;
    }
    case MechanismKind::kGeometric: {
      // Difference of two geometric counts is double-geometric; clamping
      // reproduces the folded tails.
      std::geometric_distribution<long> geo(-std::expm1(-spec.eps));
      const long x = b + geo(rng) - geo(rng);
      const long clamped = std::clamp<long>(x, -spec.trunc, spec.trunc + 1);
      return static_cast<double>(clamped + spec.trunc);
    }
    case MechanismKind::kLaplace: {
      const double u = unit(rng) - 0.5;
      const double z = -std::copysign(1.0, u) * std::log1p(-2.0 * std::abs(u));
      return (b == 0 ? 0.0 : spec.sensitivity) + spec.scale * z;
    }
    case MechanismKind::kGaussian: {
      std::normal_distribution<double> normal(0.0, spec.scale);
      return (b == 0 ? 0.0 : spec.sensitivity) + normal(rng);
    }
  }
  return 0.0;
}

// log(P0(y) / P1(y)) for an outcome of `spec`; +-inf where one side vanishes.
inline double log_likelihood_ratio(const MechanismSpec& spec, double y) {
  switch (spec.kind) {
    case MechanismKind::kCanonical: {
      const int i = static_cast<int>(y);
      if (i == 0) return spec.delta > 0.0 ? kInf : 0.0;
      if (i == 3) return spec.delta > 0.0 ? -kInf : 0.0;
      if (spec.delta >= 1.0) return 0.0;
      return i == 1 ? spec.eps : -spec.eps;
    }
    case MechanismKind::kGeometric:
      return y - spec.trunc <= 0.0 ? spec.eps : -spec.eps;
    case MechanismKind::kLaplace:
      return (std::abs(y - spec.sensitivity) - std::abs(y)) / spec.scale;
    case MechanismKind::kGaussian: {
      const double s2 = spec.scale * spec.scale;
      return spec.sensitivity * (spec.sensitivity - 2.0 * y) / (2.0 * s2);
    }
  }
  return 0.0;
}

}  // namespace dpcompozer

#endif  // DPCOMPOZER_MECHANISMS_HPP_
