// Copyright 2026 The dmsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <stdexcept>

namespace dms {

/// Frame-global multiplicative intensity error plus an additive background,
/// averaged over `trials` exposures. Applies equally to camera frames and to
/// directly-measured moments.
struct NoiseModel {
  double relative_sigma = 0.05;
  int trials = 10;
  std::uint64_t seed = 0;
  double background_level = 0.0;
};

inline void validate(const NoiseModel& noise) {
  if (noise.relative_sigma < 0.0) throw std::invalid_argument("noise relative_sigma must be >= 0");
  if (noise.trials < 1) throw std::invalid_argument("noise trials must be >= 1");
}

}  // namespace dms
