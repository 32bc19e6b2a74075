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

// Exact tradeoff curves of discrete distribution pairs.
//
// For output distributions P0 (null, b = 0) and P1 (alternative, b = 1) the
// hockey-stick divergence
//
//   d_eps(P0, P1) = max_S P0(S) - e^eps P1(S) = sum_x max(0, P0(x) - e^eps P1(x))
//
// is the offset of the supporting line of slope -e^eps, so the privacy region
// is the intersection of R(s, d_s) over the log-likelihood-ratio values s.
// Composition is handled on the distribution of the log-likelihood ratio,
// which stays small for lattice-valued ratios.

#ifndef DPCOMPOZER_TRADEOFF_HPP_
#define DPCOMPOZER_TRADEOFF_HPP_

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dpcompozer/numeric.hpp"
#include "dpcompozer/region.hpp"

namespace dpcompozer {

inline constexpr double kPmfSumTolerance = 1e-12;
inline constexpr double kLlrMergeTolerance = 1e-12;
inline constexpr std::size_t kMaxLlrAtoms = 1'000'000;
inline constexpr std::size_t kMaxBruteForceOutcomes = 20;

// Two pmfs over the same outcome indices 0..n-1.
struct DiscretePair {
  std::vector<double> p0;
  std::vector<double> p1;

  std::size_t size() const { return p0.size(); }
  DiscretePair swapped() const { return {p1, p0}; }
};

inline void validate(const DiscretePair& pair) {
  if (pair.p0.size() != pair.p1.size()) {
    throw std::invalid_argument("pmfs differ in length");
  }
  if (pair.p0.empty()) throw std::invalid_argument("empty outcome space");
  for (const auto* pmf : {&pair.p0, &pair.p1}) {
    for (double m : *pmf) {
      if (!(m >= 0.0)) throw std::invalid_argument("negative or NaN mass");
    }
    const double total = numeric::pairwise_sum(*pmf);
    if (std::abs(total - 1.0) > kPmfSumTolerance) {
      throw std::invalid_argument("pmf sums to " + std::to_string(total));
    }
  }
}

// True when some permutation pi has P0(x) = P1(pi(x)) and P1(x) = P0(pi(x)).
inline bool is_symmetric(const DiscretePair& pair) {
  std::vector<std::pair<double, double>> fwd, rev;
  for (std::size_t i = 0; i < pair.size(); ++i) {
    fwd.emplace_back(pair.p0[i], pair.p1[i]);
    rev.emplace_back(pair.p1[i], pair.p0[i]);
  }
  std::sort(fwd.begin(), fwd.end());
  std::sort(rev.begin(), rev.end());
  for (std::size_t i = 0; i < fwd.size(); ++i) {
    if (std::abs(fwd[i].first - rev[i].first) > kPmfSumTolerance ||
        std::abs(fwd[i].second - rev[i].second) > kPmfSumTolerance) {
      return false;
    }
  }
  return true;
}

// Sum over outcomes of max(0, p0 - e^eps p1). Negative eps is accepted and
// gives points of the tradeoff curve below the diagonal.
inline double hockey_stick(const DiscretePair& pair, double eps) {
  const double scale = std::exp(eps);
  std::vector<double> terms;
  terms.reserve(pair.size());
  for (std::size_t i = 0; i < pair.size(); ++i) {
    const double t = pair.p1[i] == 0.0 ? pair.p0[i] : pair.p0[i] - scale * pair.p1[i];
    if (t > 0.0) terms.push_back(t);
  }
  return numeric::pairwise_sum(terms);
}

namespace detail {
// Sorted, merged values within kLlrMergeTolerance of the cluster head.
inline std::vector<double> distinct_sorted(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  std::vector<double> out;
  for (double x : v) {
    // Rounding leaves balanced sums a few ulps away from zero.
    if (std::abs(x) <= kLlrMergeTolerance) x = 0.0;
    if (out.empty() || x - out.back() > kLlrMergeTolerance) out.push_back(x);
  }
  return out;
}
}  // namespace detail

// Distinct nonnegative log-likelihood ratios log(p0/p1) over outcomes where
// both masses are positive.
inline std::vector<double> slope_set(const DiscretePair& pair) {
  std::vector<double> llr;
  for (std::size_t i = 0; i < pair.size(); ++i) {
    if (pair.p0[i] > 0.0 && pair.p1[i] > 0.0) {
      const double s = std::log(pair.p0[i] / pair.p1[i]);
      if (s >= -kLlrMergeTolerance) llr.push_back(std::max(s, 0.0));
    }
  }
  return detail::distinct_sorted(std::move(llr));
}

// Distribution of L = log(P0(X)/P1(X)) for X ~ P0, with the masses the same
// outcomes carry under P1. sing0 is the P0-mass where P1 vanishes (L = +inf),
// sing1 the P1-mass where P0 vanishes (L = -inf).
struct LlrAtom {
  double llr;
  double m0;
  double m1;
};

struct LlrDistribution {
  std::vector<LlrAtom> atoms;  // increasing llr
  double sing0 = 0.0;
  double sing1 = 0.0;

  LlrDistribution swapped() const {
    LlrDistribution out{{}, sing1, sing0};
    out.atoms.reserve(atoms.size());
    for (auto it = atoms.rbegin(); it != atoms.rend(); ++it) {
      out.atoms.push_back({-it->llr, it->m1, it->m0});
    }
    return out;
  }
};

namespace detail {
inline std::vector<LlrAtom> merge_atoms(std::vector<LlrAtom> atoms) {
  std::stable_sort(atoms.begin(), atoms.end(),
                   [](const LlrAtom& a, const LlrAtom& b) { return a.llr < b.llr; });
  std::vector<LlrAtom> out;
  double head = -kInf;
  for (const LlrAtom& a : atoms) {
    if (!out.empty() && a.llr - head <= kLlrMergeTolerance) {
      out.back().m0 += a.m0;
      out.back().m1 += a.m1;
    } else {
      out.push_back(a);
      head = a.llr;
    }
  }
  return out;
}
}  // namespace detail

inline LlrDistribution llr_distribution(const DiscretePair& pair) {
  LlrDistribution d;
  std::vector<LlrAtom> atoms;
  std::vector<double> s0, s1;
  for (std::size_t i = 0; i < pair.size(); ++i) {
    const double a = pair.p0[i], b = pair.p1[i];
    if (a > 0.0 && b > 0.0) {
      atoms.push_back({std::log(a / b), a, b});
    } else if (a > 0.0) {
      s0.push_back(a);
    } else if (b > 0.0) {
      s1.push_back(b);
    }
  }
  d.atoms = detail::merge_atoms(std::move(atoms));
  d.sing0 = numeric::pairwise_sum(s0);
  d.sing1 = numeric::pairwise_sum(s1);
  return d;
}

// Law of the summed log-likelihood ratio over k independent uses of `pair`.
// Throws std::length_error when the merged support exceeds max_atoms.
inline LlrDistribution product_pair(const DiscretePair& pair, int k,
                                    std::size_t max_atoms = kMaxLlrAtoms) {
  validate(pair);
  if (k < 1) throw std::invalid_argument("product_pair needs k >= 1");
  const LlrDistribution step = llr_distribution(pair);

  std::vector<LlrAtom> acc = step.atoms;
  for (int layer = 1; layer < k; ++layer) {
    if (acc.size() * step.atoms.size() > 64 * max_atoms) {
      throw std::length_error(
          "log-likelihood support would exceed the atom cap; coarsen the "
          "outcome grid before composing");
    }
    std::vector<LlrAtom> next;
    next.reserve(acc.size() * step.atoms.size());
    for (const LlrAtom& a : acc) {
      for (const LlrAtom& s : step.atoms) {
        next.push_back({a.llr + s.llr, a.m0 * s.m0, a.m1 * s.m1});
      }
    }
    acc = detail::merge_atoms(std::move(next));
    if (acc.size() > max_atoms) {
      throw std::length_error("log-likelihood support has " +
                              std::to_string(acc.size()) +
                              " atoms, above the cap of " +
                              std::to_string(max_atoms) +
                              "; coarsen the outcome grid before composing");
    }
  }
  LlrDistribution out;
  out.atoms = std::move(acc);
  // 1 - (1 - s)^k, accurate for small s.
  out.sing0 = -std::expm1(k * std::log1p(-step.sing0));
  out.sing1 = -std::expm1(k * std::log1p(-step.sing1));
  return out;
}

// d_eps between the two laws described by `d`.
inline double hockey_stick_llr(const LlrDistribution& d, double eps) {
  const double scale = std::exp(eps);
  std::vector<double> terms;
  terms.reserve(d.atoms.size() + 1);
  terms.push_back(d.sing0);
  for (auto it = d.atoms.rbegin(); it != d.atoms.rend(); ++it) {
    const double t = it->m1 == 0.0 ? it->m0 : it->m0 - scale * it->m1;
    if (t > 0.0) terms.push_back(t);
  }
  return numeric::pairwise_sum(terms);
}

struct PairRegion {
  PrivacyRegion region;
  // Set when the pair had no symmetry permutation and both orderings were
  // folded into the region.
  bool symmetrized = false;
};

namespace detail {
template <typename Divergence>
PrivacyRegion region_from_slopes(std::vector<double> slopes, Divergence&& d) {
  if (slopes.empty()) slopes.push_back(0.0);
  std::vector<EpsDelta> lines;
  lines.reserve(slopes.size());
  for (double s : slopes) lines.push_back({s, numeric::clamp01(d(s))});
  return PrivacyRegion::from_lines(std::move(lines));
}

inline std::vector<double> nonnegative_slopes(const LlrDistribution& d) {
  std::vector<double> v;
  for (const LlrAtom& a : d.atoms) v.push_back(std::abs(a.llr));
  return distinct_sorted(std::move(v));
}
}  // namespace detail

// Privacy region of a pair: one supporting line per slope, offset by the
// hockey-stick divergence in the worse of the two directions.
inline PairRegion region_from_pair(const DiscretePair& pair) {
  validate(pair);
  const DiscretePair rev = pair.swapped();
  std::vector<double> slopes = slope_set(pair);
  const std::vector<double> back = slope_set(rev);
  slopes.insert(slopes.end(), back.begin(), back.end());
  PrivacyRegion region = detail::region_from_slopes(
      detail::distinct_sorted(std::move(slopes)), [&](double s) {
        return std::max(hockey_stick(pair, s), hockey_stick(rev, s));
      });
  return {std::move(region), !is_symmetric(pair)};
}

inline PrivacyRegion region_from_llr(const LlrDistribution& d) {
  const LlrDistribution rev = d.swapped();
  return detail::region_from_slopes(detail::nonnegative_slopes(d), [&](double s) {
    return std::max(hockey_stick_llr(d, s), hockey_stick_llr(rev, s));
  });
}

namespace detail {
inline double cross(const PrivacyPoint& o, const PrivacyPoint& a,
                    const PrivacyPoint& b) {
  return (a.pmd - o.pmd) * (b.pfa - o.pfa) - (a.pfa - o.pfa) * (b.pmd - o.pmd);
}
}  // namespace detail

// Lower-left convex hull of a point cloud, from the leftmost-lowest point to
// the first point at minimal pfa.
inline std::vector<PrivacyPoint> lower_left_hull(std::vector<PrivacyPoint> pts) {
  std::sort(pts.begin(), pts.end(), [](const PrivacyPoint& a, const PrivacyPoint& b) {
    return a.pmd < b.pmd || (a.pmd == b.pmd && a.pfa < b.pfa);
  });
  std::vector<PrivacyPoint> hull;
  for (const PrivacyPoint& p : pts) {
    while (hull.size() >= 2 &&
           detail::cross(hull[hull.size() - 2], hull.back(), p) <= 1e-15) {
      hull.pop_back();
    }
    hull.push_back(p);
  }
  double lowest = kInf;
  for (const PrivacyPoint& p : hull) lowest = std::min(lowest, p.pfa);
  std::vector<PrivacyPoint> out;
  for (const PrivacyPoint& p : hull) {
    out.push_back({numeric::clamp01(p.pmd), numeric::clamp01(p.pfa)});
    if (p.pfa <= lowest + 1e-15) break;
  }
  return out;
}

// Hull of (P1(S), 1 - P0(S)) over every acceptance set S. Exponential.
inline std::vector<PrivacyPoint> brute_force_region(const DiscretePair& pair) {
  validate(pair);
  const std::size_t n = pair.size();
  if (n > kMaxBruteForceOutcomes) {
    throw std::invalid_argument("brute_force_region handles at most " +
                                std::to_string(kMaxBruteForceOutcomes) +
                                " outcomes, got " + std::to_string(n));
  }
  const std::size_t count = std::size_t{1} << n;
  std::vector<double> mass0(count, 0.0), mass1(count, 0.0);
  std::vector<PrivacyPoint> pts(count);
  for (std::size_t s = 1; s < count; ++s) {
    const std::size_t bit = static_cast<std::size_t>(std::countr_zero(s));
    const std::size_t rest = s & (s - 1);
    mass0[s] = mass0[rest] + pair.p0[bit];
    mass1[s] = mass1[rest] + pair.p1[bit];
  }
  for (std::size_t s = 0; s < count; ++s) pts[s] = {mass1[s], 1.0 - mass0[s]};
  return lower_left_hull(std::move(pts));
}

// A randomized test: outcomes in cells[i] accept the null with probability
// accept[i]. The cells must partition the outcome space.
struct DecisionRule {
  std::vector<std::vector<std::size_t>> cells;
  std::vector<double> accept;
};

inline PrivacyPoint decision_rule_eval(const DiscretePair& pair,
                                       const DecisionRule& rule) {
  validate(pair);
  if (rule.cells.size() != rule.accept.size()) {
    throw std::invalid_argument("one accept probability per cell required");
  }
  std::vector<int> seen(pair.size(), 0);
  double pmd = 0.0, pfa = 0.0;
  for (std::size_t c = 0; c < rule.cells.size(); ++c) {
    const double a = rule.accept[c];
    if (!(a >= 0.0 && a <= 1.0)) {
      throw std::invalid_argument("accept probability outside [0, 1]");
    }
    for (std::size_t x : rule.cells[c]) {
      if (x >= pair.size() || seen[x]++) {
        throw std::invalid_argument("cells must partition the outcome space");
      }
      pmd += a * pair.p1[x];
      pfa += (1.0 - a) * pair.p0[x];
    }
  }
  if (std::count(seen.begin(), seen.end(), 0) != 0) {
    throw std::invalid_argument("cells must cover every outcome");
  }
  return {pmd, pfa};
}

// Both directions of the (eps, delta) condition.
inline bool verify_dp(const DiscretePair& pair, const EpsDelta& g) {
  validate(pair);
  validate(g);
  return hockey_stick(pair, g.eps) <= g.delta + kContainTolerance &&
         hockey_stick(pair.swapped(), g.eps) <= g.delta + kContainTolerance;
}

}  // namespace dpcompozer

#endif  // DPCOMPOZER_TRADEOFF_HPP_
