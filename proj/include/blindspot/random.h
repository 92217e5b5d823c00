/*
 * Copyright 2026 The Blindspot Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef BLINDSPOT_RANDOM_H_
#define BLINDSPOT_RANDOM_H_

#include <cstdint>
#include <random>
#include <string_view>

namespace blindspot {

// SplitMix64 finalizer (Steele, Lea & Flood 2014).
inline uint64_t SplitMix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Seed for trial `trial` of grid cell `cell`. Independent of scheduling, so
// trials can run in any order or in parallel.
inline uint64_t DeriveSeed(uint64_t master_seed, uint64_t cell, uint64_t trial) {
  return SplitMix64(SplitMix64(SplitMix64(master_seed) ^ cell) ^ trial);
}

// std::mt19937_64 (its output sequence is fixed by the standard) with a
// portable uniform double. std::uniform_real_distribution is avoided because
// its output is implementation-defined.
class Rng {
 public:
  static constexpr std::string_view kAlgorithm =
      "mt19937_64, seeded by splitmix64(master_seed, cell, trial)";

  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t NextU64() { return engine_(); }
  // Uniform on [0, 1) with 53 random bits.
  double Uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace blindspot

#endif  // BLINDSPOT_RANDOM_H_
