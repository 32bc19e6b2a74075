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

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include <gtest/gtest.h>

#include "dpcompozer/mechanisms.hpp"
#include "dpcompozer/region.hpp"

namespace dpcompozer {
namespace {

std::vector<EpsDelta> random_lines(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> e(0.0, 3.0), d(0.0, 0.4);
  std::vector<EpsDelta> v;
  for (int i = 0; i < n; ++i) v.push_back({e(rng), d(rng)});
  return v;
}

TEST(Region, SingleLineVertices) {
  // Corner of R(ln 2, 0.1): both half-planes tight at pmd = pfa = 0.9 / 3.
  const auto v = boundary(region_from_eps_delta({std::log(2.0), 0.1}));
  ASSERT_EQ(v.size(), 3u);
  EXPECT_NEAR(v[0].pmd, 0.0, 1e-15);
  EXPECT_NEAR(v[0].pfa, 0.9, 1e-15);
  EXPECT_NEAR(v[1].pmd, 0.3, 1e-15);
  EXPECT_NEAR(v[1].pfa, 0.3, 1e-15);
  EXPECT_NEAR(v[2].pmd, 0.9, 1e-15);
  EXPECT_NEAR(v[2].pfa, 0.0, 1e-15);
}

TEST(Region, ZeroEpsZeroDeltaIsTheAntiDiagonal) {
  const auto v = boundary(region_from_eps_delta({0.0, 0.0}));
  ASSERT_EQ(v.size(), 2u);
  EXPECT_EQ(v[0], (PrivacyPoint{0.0, 1.0}));
  EXPECT_EQ(v[1], (PrivacyPoint{1.0, 0.0}));
}

TEST(Region, FullSquare) {
  const PrivacyRegion r = PrivacyRegion::full();
  ASSERT_EQ(boundary(r).size(), 1u);
  EXPECT_EQ(boundary(r)[0], (PrivacyPoint{0.0, 0.0}));
  EXPECT_TRUE(contains_point(r, {0.0, 0.0}));
  EXPECT_TRUE(contains_point(r, {1.0, 1.0}));
  EXPECT_TRUE(equivalent(r, region_from_eps_delta({3.0, 1.0})));
}

TEST(Region, RejectsInvalidParameters) {
  EXPECT_THROW(region_from_eps_delta({-0.1, 0.0}), std::invalid_argument);
  EXPECT_THROW(region_from_eps_delta({0.1, 1.5}), std::invalid_argument);
  EXPECT_THROW(region_from_eps_delta({std::nan(""), 0.0}), std::invalid_argument);
  EXPECT_THROW(PrivacyRegion::from_lines({}), std::invalid_argument);
}

TEST(Region, RedundantLinesAreDropped) {
  EXPECT_EQ(PrivacyRegion::from_lines({{1.0, 0.0}, {1.0, 0.1}}).lines(),
            (std::vector<EpsDelta>{{1.0, 0.0}}));
  EXPECT_EQ(PrivacyRegion::from_lines({{0.5, 0.0}, {1.0, 0.0}}).lines(),
            (std::vector<EpsDelta>{{0.5, 0.0}}));
  // Neither dominates: both stay.
  EXPECT_EQ(PrivacyRegion::from_lines({{2.0, 0.0}, {0.0, 0.5}}).lines().size(), 2u);
}

TEST(Region, EpsIsCapped) {
  const PrivacyRegion r = region_from_eps_delta({1e6, 0.0});
  EXPECT_EQ(r.lines()[0].eps, kEpsCap);
}

TEST(Region, BoundaryIsMonotoneAndConvex) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const auto v = boundary(PrivacyRegion::from_lines(random_lines(rng, 1 + trial % 6)));
    for (std::size_t i = 1; i < v.size(); ++i) {
      EXPECT_GE(v[i].pmd, v[i - 1].pmd);
      EXPECT_LE(v[i].pfa, v[i - 1].pfa);
    }
    for (std::size_t i = 2; i < v.size(); ++i) {
      const double cross = (v[i - 1].pmd - v[i - 2].pmd) * (v[i].pfa - v[i - 2].pfa) -
                           (v[i - 1].pfa - v[i - 2].pfa) * (v[i].pmd - v[i - 2].pmd);
      EXPECT_GE(cross, -1e-12);
    }
  }
}

TEST(Region, VerticesAreOnTheBoundary) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    const PrivacyRegion r = PrivacyRegion::from_lines(random_lines(rng, 1 + trial % 5));
    for (const PrivacyPoint& p : boundary(r)) {
      EXPECT_TRUE(contains_point(r, p));
      if (p.pmd > 1e-6 && p.pfa > 1e-6) {
        EXPECT_FALSE(contains_point(r, {p.pmd - 1e-6, p.pfa - 1e-6}));
      }
    }
  }
}

TEST(Region, ContainmentIsSymmetricUnderSwap) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const PrivacyRegion r = PrivacyRegion::from_lines(random_lines(rng, 3));
    for (int j = 0; j < 50; ++j) {
      const PrivacyPoint p{u(rng), u(rng)};
      EXPECT_EQ(contains_point(r, p), contains_point(r, {p.pfa, p.pmd}));
    }
  }
}

TEST(Region, IntersectionIsInsideBothAndCommutes) {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 100; ++trial) {
    const PrivacyRegion a = PrivacyRegion::from_lines(random_lines(rng, 2));
    const PrivacyRegion b = PrivacyRegion::from_lines(random_lines(rng, 2));
    const PrivacyRegion ab = intersect(a, b);
    EXPECT_TRUE(contains_region(a, ab));
    EXPECT_TRUE(contains_region(b, ab));
    EXPECT_TRUE(equivalent(ab, intersect(b, a)));
  }
}

TEST(Region, NearlyFlatLineIsKept) {
  // Both pieces of the first line are almost parallel; it still cuts the corner.
  for (double tiny : {0.0, 4.4e-16, 1e-13, 1e-10}) {
    const PrivacyRegion r = PrivacyRegion::from_lines({{tiny, 0.245}, {1.0, 0.0}});
    ASSERT_EQ(r.lines().size(), 2u) << tiny;
    EXPECT_FALSE(contains_point(r, {0.3, 0.3}));
    EXPECT_TRUE(contains_point(r, {0.3775, 0.3775}));
  }
}

TEST(Region, LineOrderDoesNotMatter) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<EpsDelta> lines = random_lines(rng, 5);
    const PrivacyRegion a = PrivacyRegion::from_lines(lines);
    std::shuffle(lines.begin(), lines.end(), rng);
    EXPECT_EQ(a.lines(), PrivacyRegion::from_lines(lines).lines());
  }
}

TEST(Region, SmallerParametersGiveSmallerRegions) {
  EXPECT_TRUE(contains_region(region_from_eps_delta({1.0, 0.1}),
                              region_from_eps_delta({0.5, 0.05})));
  EXPECT_FALSE(contains_region(region_from_eps_delta({0.5, 0.05}),
                               region_from_eps_delta({1.0, 0.1})));
}

TEST(Relax, KeepsDeltaAndContains) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> e(0.0, 2.0), d(1e-5, 0.5), extra(0.0, 2.0);
  for (int trial = 0; trial < 100; ++trial) {
    const EpsDelta g{e(rng), d(rng)};
    const EpsDelta r = relax(g, g.eps + extra(rng));
    EXPECT_DOUBLE_EQ(r.delta, g.delta);
    EXPECT_TRUE(contains_region(region_from_eps_delta(r), region_from_eps_delta(g)));
    const EpsDelta tighter{r.eps, r.delta - 1e-6};
    EXPECT_FALSE(contains_region(region_from_eps_delta(tighter), region_from_eps_delta(g)));
  }
}

TEST(Relax, RejectsSmallerTarget) {
  EXPECT_THROW(relax({1.0, 0.1}, 0.5), std::invalid_argument);
}

TEST(TvUpperBound, MatchesCornerAndCanonicalPair) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> e(0.0, 4.0), d(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const EpsDelta g{e(rng), d(rng)};
    const double tv = tv_upper_bound(g);
    EXPECT_NEAR(tv, g.delta + (1.0 - g.delta) * std::tanh(0.5 * g.eps), 1e-12);
    const double corner = (1.0 - g.delta) / (1.0 + std::exp(g.eps));
    EXPECT_NEAR(tv, 1.0 - 2.0 * corner, 1e-12);
    const DiscretePair p = canonical_pair(g);
    double half_l1 = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) half_l1 += 0.5 * std::abs(p.p0[i] - p.p1[i]);
    EXPECT_NEAR(tv, half_l1, 1e-12);
  }
}

}  // namespace
}  // namespace dpcompozer
