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


// Umbrella header.

#ifndef DPCOMPOZER_HPP_
#define DPCOMPOZER_HPP_

#include "dpcompozer/numeric.hpp"
#include "dpcompozer/region.hpp"
#include "dpcompozer/tradeoff.hpp"
#include "dpcompozer/composition.hpp"
#include "dpcompozer/mechanisms.hpp"
#include "dpcompozer/calibration.hpp"
#include "dpcompozer/experiment.hpp"

#endif  // DPCOMPOZER_HPP_
