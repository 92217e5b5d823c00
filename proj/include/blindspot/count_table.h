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

#ifndef BLINDSPOT_COUNT_TABLE_H_
#define BLINDSPOT_COUNT_TABLE_H_

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "blindspot/state_key.h"

namespace blindspot {

// Observed support N_n(x) for every state seen at least once, plus the total
// sample count n. Unseen states have no entry. Immutable once built.
class CountTable {
 public:
  const std::vector<std::string>& schema() const { return schema_; }
  const std::map<StateKey, uint64_t>& counts() const { return counts_; }
  uint64_t n() const { return n_; }
  // Number of distinct observed states (K_eff under this abstraction).
  size_t distinct() const { return counts_.size(); }
  // Zero for unseen states.
  uint64_t count(const StateKey& key) const;

  friend bool operator==(const CountTable&, const CountTable&) = default;

 private:
  friend CountTable BuildCountTable(std::span<const StateKey>,
                                    std::vector<std::string>);
  friend CountTable CountTableFromCounts(
      std::span<const std::pair<StateKey, uint64_t>>, std::vector<std::string>);
  friend CountTable Coarsen(const CountTable&, std::span<const std::string>);

  CountTable() = default;

  std::vector<std::string> schema_;
  std::map<StateKey, uint64_t> counts_;
  uint64_t n_ = 0;
};

// Counts the multiplicity of every sample. Throws InvalidArgument on empty
// input or when a sample does not conform to `schema` (the message names the
// sample index and the offending factor).
CountTable BuildCountTable(std::span<const StateKey> samples,
                           std::vector<std::string> schema);

// Builds a table from precomputed (state, count) pairs. Zero counts are
// dropped; duplicate states and an all-zero table are rejected.
CountTable CountTableFromCounts(
    std::span<const std::pair<StateKey, uint64_t>> entries,
    std::vector<std::string> schema);

// Projects every key onto `projection` (a non-empty subset of the schema, in
// the order given) and sums the counts of keys that collide. n is unchanged.
CountTable Coarsen(const CountTable& table,
                   std::span<const std::string> projection);

// f_r: the number of states observed exactly r times.
struct FreqOfFreqs {
  std::map<uint64_t, uint64_t> f;
  uint64_t n = 0;
  uint64_t k_observed = 0;

  uint64_t at(uint64_t r) const {
    auto it = f.find(r);
    return it == f.end() ? 0 : it->second;
  }
};

FreqOfFreqs ComputeFreqOfFreqs(const CountTable& table);

enum class DistributionSource { kPlugIn, kKnownTruth };

std::string_view SourceName(DistributionSource source);

// A probability mass function over states. Absent states have probability 0.
class EmpiricalDistribution {
 public:
  // P(x) = N_n(x) / n.
  static EmpiricalDistribution PlugIn(const CountTable& table);

  // A known ground-truth distribution (simulator oracle). Throws
  // InvalidArgument unless every probability is in [0,1] and they sum to
  // 1 within 1e-9.
  static EmpiricalDistribution KnownTruth(std::map<StateKey, double> probs);

  const std::map<StateKey, double>& probs() const { return probs_; }
  DistributionSource source() const { return source_; }
  double prob(const StateKey& key) const;

 private:
  EmpiricalDistribution(std::map<StateKey, double> probs,
                        DistributionSource source)
      : probs_(std::move(probs)), source_(source) {}

  std::map<StateKey, double> probs_;
  DistributionSource source_;
};

}  // namespace blindspot

#endif  // BLINDSPOT_COUNT_TABLE_H_
