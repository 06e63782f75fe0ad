// Copyright 2026 The qexpect Authors
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

namespace qexpect {

// Counter-based generator: the n-th draw is a pure function of
// (seed, a, b, c, n), so an agent's stream never depends on how agents are
// scheduled across threads. Mixing is SplitMix64's finalizer.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0)
      : key_(derive(seed, a, b, c)) {}

  std::uint64_t next_u64() { return mix(key_ + kGamma * ++counter_); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  std::uint64_t draws() const { return counter_; }

  static constexpr std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

  static constexpr std::uint64_t derive(std::uint64_t seed, std::uint64_t a, std::uint64_t b,
                                        std::uint64_t c) {
    std::uint64_t k = mix(seed + kGamma);
    k = mix(k ^ (a + 1 * kGamma));
    k = mix(k ^ (b + 2 * kGamma));
    k = mix(k ^ (c + 3 * kGamma));
    return k;
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace qexpect
