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

// Privacy regions in the (missed detection, false alarm) unit square.
//
// An (eps, delta) guarantee constrains every test distinguishing two
// neighboring databases to the region
//
//   P_FA + e^eps P_MD >= 1 - delta   and   e^eps P_FA + P_MD >= 1 - delta.
//
// A general symmetric convex region is stored as the list of such supporting
// line pairs and its vertices are derived on demand. Construction always
// canonicalizes: lines that do not shape the region are dropped.

#ifndef DPCOMPOZER_REGION_HPP_
#define DPCOMPOZER_REGION_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dpcompozer/numeric.hpp"

namespace dpcompozer {

struct EpsDelta {
  double eps = 0.0;
  double delta = 0.0;

  friend bool operator==(const EpsDelta&, const EpsDelta&) = default;
};

inline void validate(const EpsDelta& g) {
  if (!(g.eps >= 0.0)) {
    throw std::invalid_argument("eps must be nonnegative, got " +
                                std::to_string(g.eps));
  }
  if (!(g.delta >= 0.0 && g.delta <= 1.0)) {
    throw std::invalid_argument("delta must lie in [0, 1], got " +
                                std::to_string(g.delta));
  }
}

struct PrivacyPoint {
  double pmd = 0.0;
  double pfa = 0.0;

  friend bool operator==(const PrivacyPoint&, const PrivacyPoint&) = default;
};

namespace detail {

// y = intercept + slope * x, tagged with the index of the EpsDelta it came
// from (-1 for the P_FA >= 0 floor).
struct EnvelopeLine {
  double slope;
  double intercept;
  int owner;

  double operator()(double x) const { return intercept + slope * x; }
};

inline double crossing(const EnvelopeLine& a, const EnvelopeLine& b) {
  return (b.intercept - a.intercept) / (a.slope - b.slope);
}

struct Envelope {
  std::vector<EnvelopeLine> lines;  // increasing slope
  std::vector<double> breaks;       // breaks[j]: where lines[j] takes over
};

inline std::vector<EnvelopeLine> boundary_lines(
    const std::vector<EpsDelta>& lines) {
  std::vector<EnvelopeLine> out;
  out.reserve(2 * lines.size() + 1);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const double a = 1.0 - lines[i].delta;
    const double shrink = std::exp(-lines[i].eps);
    const int owner = static_cast<int>(i);
    out.push_back({-1.0 / shrink, a, owner});
    if (lines[i].eps > 0.0) out.push_back({-shrink, a * shrink, owner});
  }
  out.push_back({0.0, 0.0, -1});
  return out;
}

// Upper envelope over the whole real line (convex hull trick).
inline Envelope upper_envelope(std::vector<EnvelopeLine> lines) {
  std::stable_sort(lines.begin(), lines.end(),
                   [](const EnvelopeLine& a, const EnvelopeLine& b) {
                     return a.slope < b.slope;
                   });
  Envelope env;
  for (const EnvelopeLine& l : lines) {
    if (!env.lines.empty() && env.lines.back().slope == l.slope) {
      if (env.lines.back().intercept >= l.intercept) continue;
      env.lines.pop_back();
      env.breaks.pop_back();
    }
    while (env.lines.size() >= 2) {
      const EnvelopeLine& prev = env.lines[env.lines.size() - 2];
      if (crossing(prev, l) <= env.breaks.back()) {
        env.lines.pop_back();
        env.breaks.pop_back();
      } else {
        break;
      }
    }
    env.breaks.push_back(env.lines.empty() ? -kInf
                                           : crossing(env.lines.back(), l));
    env.lines.push_back(l);
  }
  return env;
}

// Largest normalized amount by which each owner's pieces stick out above
// the neighbouring lines of other owners on x >= 0. Consecutive pieces of one
// owner count as a single chain; comparing a piece against its own sibling
// would report ~0 for near-parallel pieces. Owners absent from x >= 0 get 0.
inline std::vector<double> apex_heights(const Envelope& env,
                                        std::size_t n_owners) {
  std::vector<double> height(n_owners, 0.0);
  const std::size_t m = env.lines.size();
  for (std::size_t first = 0; first < m;) {
    std::size_t last = first;
    while (last + 1 < m && env.lines[last + 1].owner == env.lines[first].owner) ++last;
    const int owner = env.lines[first].owner;
    const std::size_t run_first = first;
    first = last + 1;
    if (owner < 0) continue;

    const double lo = std::max(env.breaks[run_first], 0.0);
    const double hi = last + 1 < m ? env.breaks[last + 1] : kInf;
    if (!(hi > lo)) continue;
    const EnvelopeLine* left = run_first > 0 ? &env.lines[run_first - 1] : nullptr;
    const EnvelopeLine* right = last + 1 < m ? &env.lines[last + 1] : nullptr;
    double steepest = 1.0;
    for (std::size_t j = run_first; j <= last; ++j) {
      steepest = std::max(steepest, -env.lines[j].slope);
    }
    auto gap = [&](double x) {
      double top = -kInf;
      for (std::size_t j = run_first; j <= last; ++j) top = std::max(top, env.lines[j](x));
      double below = -kInf;
      if (left) below = std::max(below, (*left)(x));
      if (right) below = std::max(below, (*right)(x));
      return top - below;
    };
    double h = std::max(gap(lo), std::isfinite(hi) ? gap(hi) : 0.0);
    for (std::size_t j = run_first + 1; j <= last; ++j) {
      const double x = env.breaks[j];
      if (x > lo && x < hi) h = std::max(h, gap(x));
    }
    if (left && right) {
      const double x = crossing(*left, *right);
      if (x > lo && x < hi) h = std::max(h, gap(x));
    }
    double& slot = height[static_cast<std::size_t>(owner)];
    slot = std::max(slot, h / steepest);
  }
  return height;
}

inline std::vector<EpsDelta> canonical_lines(std::vector<EpsDelta> lines) {
  for (EpsDelta& g : lines) {
    validate(g);
    g.eps = std::min(g.eps, kEpsCap);
  }
  // Sorting by eps makes "larger index" mean "larger eps" for tie-breaks.
  std::sort(lines.begin(), lines.end(), [](const EpsDelta& a, const EpsDelta& b) {
    return a.eps < b.eps || (a.eps == b.eps && a.delta < b.delta);
  });
  lines.erase(std::unique(lines.begin(), lines.end()), lines.end());

  while (lines.size() > 1) {
    const Envelope env = upper_envelope(boundary_lines(lines));
    const std::vector<double> h = apex_heights(env, lines.size());
    // Lines absent from the envelope can all go at once.
    if (std::count(h.begin(), h.end(), 0.0) > 0 &&
        std::count(h.begin(), h.end(), 0.0) < static_cast<std::ptrdiff_t>(h.size())) {
      std::vector<EpsDelta> kept;
      for (std::size_t i = 0; i < lines.size(); ++i) {
        if (h[i] != 0.0) kept.push_back(lines[i]);
      }
      lines = std::move(kept);
      continue;
    }
    std::size_t victim = lines.size();
    for (std::size_t i = lines.size(); i-- > 0;) {
      if (h[i] <= kContainTolerance && (victim == lines.size() || h[i] < h[victim])) {
        victim = i;
      }
    }
    if (victim == lines.size()) break;
    lines.erase(lines.begin() + static_cast<std::ptrdiff_t>(victim));
  }
  return lines;
}

}  // namespace detail

class PrivacyRegion {
 public:
  // Intersection of R(eps_j, delta_j) over the given lines, canonicalized.
  static PrivacyRegion from_lines(std::vector<EpsDelta> lines) {
    if (lines.empty()) {
      throw std::invalid_argument("a privacy region needs at least one line");
    }
    return PrivacyRegion(detail::canonical_lines(std::move(lines)));
  }

  // The whole unit square, R(0, 1).
  static PrivacyRegion full() { return PrivacyRegion({{0.0, 1.0}}); }

  // Canonical supporting lines, sorted by eps.
  const std::vector<EpsDelta>& lines() const { return lines_; }

 private:
  explicit PrivacyRegion(std::vector<EpsDelta> lines) : lines_(std::move(lines)) {}

  std::vector<EpsDelta> lines_;
};

inline PrivacyRegion region_from_eps_delta(const EpsDelta& g) {
  return PrivacyRegion::from_lines({g});
}

inline PrivacyRegion intersect(const PrivacyRegion& a, const PrivacyRegion& b) {
  std::vector<EpsDelta> lines = a.lines();
  lines.insert(lines.end(), b.lines().begin(), b.lines().end());
  return PrivacyRegion::from_lines(std::move(lines));
}

// Lower-left boundary from (0, y0) to (x0, 0), sorted by pmd. A region equal
// to the full square has the single vertex (0, 0).
inline std::vector<PrivacyPoint> boundary(const PrivacyRegion& r) {
  const detail::Envelope env =
      detail::upper_envelope(detail::boundary_lines(r.lines()));
  const std::size_t m = env.lines.size();
  std::size_t first = 0;
  while (first + 1 < m && env.breaks[first + 1] <= 0.0) ++first;

  std::vector<PrivacyPoint> out;
  out.push_back({0.0, numeric::clamp01(env.lines[first](0.0))});
  for (std::size_t j = first + 1; j < m; ++j) {
    const double x = env.breaks[j];
    const double y = env.lines[j].owner < 0 ? 0.0 : env.lines[j](x);
    out.push_back({numeric::clamp01(x), numeric::clamp01(y)});
  }
  return out;
}

namespace detail {
// Normalized residuals of both half-planes of one line; >= 0 means satisfied.
inline std::pair<double, double> residuals(const EpsDelta& g,
                                           const PrivacyPoint& p) {
  const double a = 1.0 - g.delta;
  const double shrink = std::exp(-g.eps);
  return {p.pmd + shrink * (p.pfa - a), p.pfa + shrink * (p.pmd - a)};
}
}  // namespace detail

inline bool contains_point(const PrivacyRegion& r, const PrivacyPoint& p) {
  constexpr double tol = kContainTolerance;
  if (p.pmd < -tol || p.pfa < -tol || p.pmd > 1 + tol || p.pfa > 1 + tol) {
    return false;
  }
  return std::all_of(r.lines().begin(), r.lines().end(), [&](const EpsDelta& g) {
    const auto [steep, shallow] = detail::residuals(g, p);
    return steep >= -tol && shallow >= -tol;
  });
}

inline bool contains_region(const PrivacyRegion& outer,
                            const PrivacyRegion& inner) {
  const std::vector<PrivacyPoint> vertices = boundary(inner);
  return std::all_of(vertices.begin(), vertices.end(), [&](const PrivacyPoint& v) {
    return contains_point(outer, v);
  });
}

// Mutual containment.
inline bool equivalent(const PrivacyRegion& a, const PrivacyRegion& b) {
  return contains_region(a, b) && contains_region(b, a);
}

// Smallest delta' such that R(g) is contained in R(target_eps, delta').
inline EpsDelta relax(const EpsDelta& g, double target_eps) {
  validate(g);
  if (!(target_eps >= g.eps)) {
    throw std::invalid_argument("relax: target eps " + std::to_string(target_eps) +
                                " is below the guarantee's eps " +
                                std::to_string(g.eps));
  }
  // (1 + e^t) / (1 + e^eps), formed in the log domain.
  const double ratio = std::exp(numeric::softplus(target_eps) - numeric::softplus(g.eps));
  const double corner = 1.0 - (1.0 - g.delta) * ratio;
  return {target_eps, numeric::clamp01(std::max(g.delta, corner))};
}

// Largest total variation distance any (eps, delta)-DP mechanism can have.
inline double tv_upper_bound(const EpsDelta& g) {
  validate(g);
  return 1.0 - 2.0 * (1.0 - g.delta) * numeric::logistic(-g.eps);
}

}  // namespace dpcompozer

#endif  // DPCOMPOZER_REGION_HPP_
