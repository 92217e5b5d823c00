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

#include "blindspot/count_table.h"

#include <cmath>
#include <set>

#include "blindspot/errors.h"

namespace blindspot {
namespace {

void CheckConforms(const StateKey& key, std::span<const std::string> schema,
                   std::string_view what) {
  if (key.Conforms(schema)) return;
  const auto& factors = key.factors();
  size_t i = 0;
  while (i < factors.size() && i < schema.size() && factors[i].first == schema[i]) {
    ++i;
  }
  std::string factor = i < factors.size() ? factors[i].first
                                          : "<missing " + schema[i] + ">";
  throw InvalidArgument(std::string(what) + ": factor '" + factor +
                        "' does not match schema position " +
                        std::to_string(i));
}

}  // namespace

uint64_t CountTable::count(const StateKey& key) const {
  auto it = counts_.find(key);
  return it == counts_.end() ? 0 : it->second;
}

CountTable BuildCountTable(std::span<const StateKey> samples,
                           std::vector<std::string> schema) {
  ValidateSchema(schema);
  if (samples.empty()) {
    throw InvalidArgument("cannot build a count table from zero samples");
  }
  CountTable table;
  for (size_t i = 0; i < samples.size(); ++i) {
    CheckConforms(samples[i], schema, "sample " + std::to_string(i));
    ++table.counts_[samples[i]];
  }
  table.n_ = samples.size();
  table.schema_ = std::move(schema);
  return table;
}

CountTable CountTableFromCounts(
    std::span<const std::pair<StateKey, uint64_t>> entries,
    std::vector<std::string> schema) {
  ValidateSchema(schema);
  CountTable table;
  for (size_t i = 0; i < entries.size(); ++i) {
    const auto& [key, count] = entries[i];
    CheckConforms(key, schema, "entry " + std::to_string(i));
    if (table.counts_.contains(key)) {
      throw InvalidArgument("duplicate state '" + key.ToString() + "'");
    }
    if (count == 0) continue;
    table.counts_.emplace(key, count);
    table.n_ += count;
  }
  if (table.n_ == 0) throw InvalidArgument("count table has total n = 0");
  table.schema_ = std::move(schema);
  return table;
}

CountTable Coarsen(const CountTable& table,
                   std::span<const std::string> projection) {
  ValidateSchema(projection);
  const std::set<std::string_view> known(table.schema().begin(),
                                         table.schema().end());
  for (const auto& name : projection) {
    if (!known.contains(name)) {
      throw InvalidArgument("projection names unknown factor '" + name + "'");
    }
  }
  CountTable out;
  out.schema_.assign(projection.begin(), projection.end());
  for (const auto& [key, count] : table.counts()) {
    out.counts_[key.Project(projection)] += count;
  }
  out.n_ = table.n();
  return out;
}

FreqOfFreqs ComputeFreqOfFreqs(const CountTable& table) {
  FreqOfFreqs fof;
  for (const auto& [key, count] : table.counts()) ++fof.f[count];
  fof.n = table.n();
  fof.k_observed = table.distinct();
  return fof;
}

std::string_view SourceName(DistributionSource source) {
  return source == DistributionSource::kPlugIn ? "plug-in" : "known-truth";
}

EmpiricalDistribution EmpiricalDistribution::PlugIn(const CountTable& table) {
  std::map<StateKey, double> probs;
  const double n = static_cast<double>(table.n());
  for (const auto& [key, count] : table.counts()) {
    probs.emplace(key, static_cast<double>(count) / n);
  }
  return EmpiricalDistribution(std::move(probs), DistributionSource::kPlugIn);
}

EmpiricalDistribution EmpiricalDistribution::KnownTruth(
    std::map<StateKey, double> probs) {
  double total = 0.0;
  for (const auto& [key, p] : probs) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw InvalidArgument("probability of '" + key.ToString() +
                            "' is outside [0,1]");
    }
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw InvalidArgument("known-truth probabilities sum to " +
                          std::to_string(total));
  }
  return EmpiricalDistribution(std::move(probs),
                               DistributionSource::kKnownTruth);
}

double EmpiricalDistribution::prob(const StateKey& key) const {
  auto it = probs_.find(key);
  return it == probs_.end() ? 0.0 : it->second;
}

}  // namespace blindspot
