// Copyright 2026 The contsched Authors
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
#include <random>

namespace contsched {

using Rng = std::mt19937_64;

// Independent random streams inside one simulation. Each purpose gets its
// own generator so adding draws to one consumer never shifts another.
enum class StreamPurpose : std::uint32_t {
  kWorkload = 1,
  kRequestedTime = 2,
  kArrivals = 3,
  kTasks = 4,
  kCalibration = 5,
};

inline Rng make_stream(std::uint64_t seed, StreamPurpose purpose) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(purpose), 0x636f6e74u};
  return Rng(seq);
}

}  // namespace contsched
