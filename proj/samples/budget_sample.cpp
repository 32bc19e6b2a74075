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

// Splits a total budget across 25 queries, then compares the composition
// methods for the resulting per-query guarantee.

#include <cstdio>

#include "dpcompozer.hpp"

int main() {
  using namespace dpcompozer;
  const EpsDelta target{0.5, 0.01};
  const int k = 25;

  const EpsDelta q = per_query_budget(target, k);
  std::printf("closed-form split: eps0 %.6f delta0 %.6g\n", q.eps, q.delta);
  std::printf("bisected eps0:     %.6f\n", calibrate_eps0(target, k));

  const Comparison c =
      compare({HomogeneousSteps{q, k}, remaining_slack(target.delta, q.delta, k)});
  std::printf("slack %.6f\n", c.slack);
  for (const CompositionReport& r : c.reports) {
    std::printf("  %-12s eps %.6f delta %.6g\n", std::string(to_string(r.method)).c_str(),
                r.result_eps, r.result_delta);
  }
  return 0;
}
