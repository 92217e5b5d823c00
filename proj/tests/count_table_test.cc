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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "blindspot/errors.h"
#include "blindspot/simulator.h"
#include "test_util.h"

namespace blindspot {
namespace {

using testing::FactorSchema;
using testing::RandomSamples;
using testing::RandomTable;

const std::vector<std::string> kActivity = {"activity"};

std::vector<StateKey> Repeat(const std::string& value, size_t times) {
  return std::vector<StateKey>(times, StateKey("activity", value));
}

// The published in-house activity counts, expanded back into samples.
std::vector<StateKey> InHouseSamples() {
  std::vector<StateKey> samples;
  for (const auto& [name, count] :
       std::vector<std::pair<std::string, size_t>>{{"Walking", 307},
                                                   {"Stairs up", 134},
                                                   {"Stairs down", 144},
                                                   {"Front fall", 122},
                                                   {"Backward fall", 122},
                                                   {"Other", 845}}) {
    auto part = Repeat(name, count);
    samples.insert(samples.end(), part.begin(), part.end());
  }
  return samples;
}

TEST(BuildCountTable, InHouseCounts) {
  const CountTable t = BuildCountTable(InHouseSamples(), kActivity);
  EXPECT_EQ(t.n(), 1674u);
  EXPECT_EQ(t.count(StateKey("activity", "Walking")), 307u);
  EXPECT_EQ(t.count(StateKey("activity", "Stairs up")), 134u);
  EXPECT_EQ(t.count(StateKey("activity", "Running")), 0u);
}

TEST(BuildCountTable, SingleRepeatedSample) {
  const CountTable t = BuildCountTable(Repeat("sit", 5), kActivity);
  EXPECT_EQ(t.n(), 5u);
  ASSERT_EQ(t.distinct(), 1u);
  EXPECT_EQ(t.counts().begin()->second, 5u);
}

TEST(BuildCountTable, MatchesLinearScanOracle) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> pick(0, 9);
  std::vector<StateKey> samples;
  for (int i = 0; i < 200; ++i) samples.emplace_back("s", "k" + std::to_string(pick(rng)));
  const CountTable t = BuildCountTable(samples, {"s"});
  uint64_t total = 0;
  for (int v = 0; v < 10; ++v) {
    const StateKey key("s", "k" + std::to_string(v));
    uint64_t scan = 0;
    for (const auto& s : samples) scan += (s == key);
    EXPECT_EQ(t.count(key), scan) << key.ToString();
    total += scan;
  }
  EXPECT_EQ(t.n(), total);
}

TEST(BuildCountTable, RejectsEmptyInput) {
  EXPECT_THROW(BuildCountTable(std::vector<StateKey>{}, kActivity), InvalidArgument);
}

TEST(BuildCountTable, SchemaMismatchNamesSampleAndFactor) {
  std::vector<StateKey> samples = {StateKey(std::vector<StateKey::Factor>{{"activity", "a"}, {"tilt", "1"}}),
                                   StateKey(std::vector<StateKey::Factor>{{"activity", "a"}, {"energy", "1"}})};
  try {
    BuildCountTable(samples, {"activity", "tilt"});
    FAIL() << "expected rejection";
  } catch (const InvalidArgument& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("sample 1"), std::string::npos) << msg;
    EXPECT_NE(msg.find("energy"), std::string::npos) << msg;
  }
}

TEST(BuildCountTable, IndependentOfSampleOrder) {
  std::mt19937_64 rng(11);
  auto samples = RandomSamples(rng, 500, {4, 3});
  const CountTable a = BuildCountTable(samples, FactorSchema(2));
  std::shuffle(samples.begin(), samples.end(), rng);
  const CountTable b = BuildCountTable(samples, FactorSchema(2));
  EXPECT_EQ(a, b);
}

TEST(CountTableFromCounts, DropsZerosRejectsDuplicates) {
  std::vector<std::pair<StateKey, uint64_t>> entries = {
      {StateKey("a", "x"), 3}, {StateKey("a", "y"), 0}};
  const CountTable t = CountTableFromCounts(entries, {"a"});
  EXPECT_EQ(t.distinct(), 1u);
  EXPECT_EQ(t.n(), 3u);
  entries.push_back({StateKey("a", "x"), 1});
  EXPECT_THROW(CountTableFromCounts(entries, {"a"}), InvalidArgument);
  std::vector<std::pair<StateKey, uint64_t>> zeros = {{StateKey("a", "x"), 0}};
  EXPECT_THROW(CountTableFromCounts(zeros, {"a"}), InvalidArgument);
}

TEST(FreqOfFreqs, HandCounted) {
  std::vector<StateKey> samples = {StateKey("s", "a"), StateKey("s", "b"),
                                   StateKey("s", "c"), StateKey("s", "c"),
                                   StateKey("s", "c")};
  const FreqOfFreqs f = ComputeFreqOfFreqs(BuildCountTable(samples, {"s"}));
  EXPECT_EQ(f.f, (std::map<uint64_t, uint64_t>{{1, 2}, {3, 1}}));
  EXPECT_EQ(f.n, 5u);
  EXPECT_EQ(f.k_observed, 3u);
}

TEST(FreqOfFreqs, SingleState) {
  const FreqOfFreqs f = ComputeFreqOfFreqs(BuildCountTable(Repeat("a", 5), kActivity));
  EXPECT_EQ(f.f, (std::map<uint64_t, uint64_t>{{5, 1}}));
}

TEST(FreqOfFreqs, IdentitiesHoldOnZipfSample) {
  const auto dist = SyntheticDistribution::Zipf(1000, 1.2);
  const FreqOfFreqs f = ComputeFreqOfFreqs(TableFromIndices(SampleIndices(dist, 10000, 3)));
  uint64_t mass = 0, states = 0;
  for (const auto& [r, fr] : f.f) {
    EXPECT_GE(fr, 1u);
    mass += r * fr;
    states += fr;
  }
  EXPECT_EQ(mass, 10000u);
  EXPECT_EQ(states, f.k_observed);
}

TEST(PlugInDistribution, InHouseProbabilities) {
  const auto d = EmpiricalDistribution::PlugIn(BuildCountTable(InHouseSamples(), kActivity));
  EXPECT_EQ(d.source(), DistributionSource::kPlugIn);
  EXPECT_NEAR(d.prob(StateKey("activity", "Walking")), 307.0 / 1674.0, 1e-15);
  EXPECT_NEAR(std::round(d.prob(StateKey("activity", "Walking")) * 1000) / 1000, 0.183, 1e-12);
  EXPECT_NEAR(std::round(d.prob(StateKey("activity", "Stairs up")) * 1000) / 1000, 0.080, 1e-12);
}

TEST(PlugInDistribution, SingleStateIsCertain) {
  const auto d = EmpiricalDistribution::PlugIn(BuildCountTable(Repeat("a", 5), kActivity));
  EXPECT_DOUBLE_EQ(d.prob(StateKey("activity", "a")), 1.0);
}

TEST(PlugInDistribution, NormalizedOnRandomTables) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 100; ++i) {
    const auto d = EmpiricalDistribution::PlugIn(RandomTable(rng, 2000, 3, 6));
    double total = 0.0;
    for (const auto& [k, p] : d.probs()) {
      EXPECT_GE(p, 0.0);
      EXPECT_LE(p, 1.0);
      total += p;
    }
    EXPECT_NEAR(total, 1.0, 1e-9);
  }
}

TEST(KnownTruth, ValidatesMass) {
  EXPECT_THROW(EmpiricalDistribution::KnownTruth({{StateKey("s", "a"), 0.6}}),
               InvalidArgument);
  EXPECT_THROW(EmpiricalDistribution::KnownTruth(
                   {{StateKey("s", "a"), 1.5}, {StateKey("s", "b"), -0.5}}),
               InvalidArgument);
  EXPECT_NO_THROW(EmpiricalDistribution::KnownTruth(
      {{StateKey("s", "a"), 0.5}, {StateKey("s", "b"), 0.5}}));
}

TEST(Coarsen, IdentityProjection) {
  std::mt19937_64 rng(2);
  const CountTable t = RandomTable(rng, 300, 3, 4);
  EXPECT_EQ(Coarsen(t, t.schema()), t);
}

TEST(Coarsen, MatchesPreimageSumOracle) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    const CountTable fine = RandomTable(rng, 1000, 3, 5);
    const std::vector<std::string> proj = {"f2", "f0"};
    const CountTable coarse = Coarsen(fine, proj);
    EXPECT_EQ(coarse.n(), fine.n());
    EXPECT_EQ(coarse.schema(), proj);
    for (const auto& [ckey, ccount] : coarse.counts()) {
      uint64_t preimage = 0;
      for (const auto& [fkey, fcount] : fine.counts()) {
        if (fkey.value("f2") == ckey.value("f2") && fkey.value("f0") == ckey.value("f0")) {
          preimage += fcount;
        }
      }
      EXPECT_EQ(ccount, preimage);
    }
  }
}

TEST(Coarsen, RejectsUnknownFactor) {
  std::mt19937_64 rng(1);
  const CountTable t = RandomTable(rng, 50, 2, 3);
  const std::vector<std::string> proj = {"f0", "user"};
  EXPECT_THROW(Coarsen(t, proj), InvalidArgument);
  EXPECT_THROW(Coarsen(t, std::vector<std::string>{}), InvalidArgument);
}

TEST(Coarsen, ConservesTotal) {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 200; ++i) {
    const CountTable t = RandomTable(rng, 500, 3, 4);
    const std::vector<std::string> proj = {"f1"};
    EXPECT_EQ(Coarsen(t, proj).n(), t.n());
  }
}

}  // namespace
}  // namespace blindspot
