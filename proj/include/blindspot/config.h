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

#ifndef BLINDSPOT_CONFIG_H_
#define BLINDSPOT_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <istream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "blindspot/abstraction.h"
#include "blindspot/simulator.h"

namespace blindspot {

// Flat "key = value" text. '#' starts a comment line; keys may repeat.
struct KeyValue {
  std::string key;
  std::string value;
  size_t line = 0;
};

std::vector<KeyValue> ParseKeyValues(std::istream& in);
std::vector<KeyValue> ReadKeyValues(const std::filesystem::path& path);

// Recognized keys: preset, factors, tilt_bins, energy_bins, rate_bins,
// energy_edges, rate_edges, refinement_tag. "preset" is applied before any
// other key regardless of its position. Throws DataError on unknown keys or
// bad values.
AbstractionConfig ParseAbstractionConfig(const std::vector<KeyValue>& kv);

// Inverse of ParseAbstractionConfig; edges written with 17 significant
// digits.
std::string FormatAbstractionConfig(const AbstractionConfig& config);

struct SweepSpec {
  std::vector<SweepCell> cells;
  uint64_t trials = 200;
  uint64_t seed = 0;
};

// Keys: trials, seed, and one or more
//   cell = <family> K=<k> n=<n> tau=<t>[,<t>...] [s=<exp> | ratio=<r> |
//          weights=<w>;<w>;...]
// A tau list expands into one cell per threshold.
SweepSpec ParseSweepSpec(const std::vector<KeyValue>& kv);

}  // namespace blindspot

#endif  // BLINDSPOT_CONFIG_H_
