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

#include "blindspot/simulator.h"

#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>

#include "blindspot/errors.h"

namespace blindspot {
namespace {

TEST(SyntheticDistribution, Families) {
  const auto z = SyntheticDistribution::Zipf(4, 1.0);
  const double h = 1 + 1.0 / 2 + 1.0 / 3 + 1.0 / 4;
  EXPECT_NEAR(z.probs()[0], 1 / h, 1e-15);
  EXPECT_NEAR(z.probs()[3], 0.25 / h, 1e-15);
  const auto g = SyntheticDistribution::Geometric(3, 0.5);
  EXPECT_NEAR(g.probs()[0], 4.0 / 7, 1e-15);
  EXPECT_NEAR(g.probs()[2], 1.0 / 7, 1e-15);
  const auto u = SyntheticDistribution::Uniform(5);
  for (double p : u.probs()) EXPECT_DOUBLE_EQ(p, 0.2);
  const auto c = SyntheticDistribution::Custom({1, 0, 3});
  EXPECT_DOUBLE_EQ(c.probs()[2], 0.75);
  for (const auto* d : {&z, &g, &u, &c}) {
    double s = 0;
    for (double p : d->probs()) s += p;
    EXPECT_NEAR(s, 1.0, 1e-12);
  }
  EXPECT_THROW(SyntheticDistribution::Zipf(0, 1.0), InvalidArgument);
  EXPECT_THROW(SyntheticDistribution::Zipf(3, -1.0), InvalidArgument);
  EXPECT_THROW(SyntheticDistribution::Geometric(3, 1.0), InvalidArgument);
  EXPECT_THROW(SyntheticDistribution::Custom({0, 0}), InvalidArgument);
  EXPECT_THROW(SyntheticDistribution::Custom({1, -1}), InvalidArgument);
}

TEST(Sample, UniformFrequencies) {
  const auto idx = SampleIndices(SyntheticDistribution::Uniform(2), 1000000, 7);
  uint64_t zeros = 0;
  for (size_t i : idx) zeros += (i == 0);
  const double f = static_cast<double>(zeros) / 1e6;
  EXPECT_GE(f, 0.498);
  EXPECT_LE(f, 0.502);
}

TEST(Sample, SingleStateAndDeterminism) {
  const auto one = Sample(SyntheticDistribution::Uniform(1), 50, 3);
  for (const auto& k : one) EXPECT_EQ(k, one[0]);
  EXPECT_EQ(one[0].ToString(), "s0");
  const auto z = SyntheticDistribution::Zipf(100, 1.1);
  EXPECT_EQ(SampleIndices(z, 1000, 5), SampleIndices(z, 1000, 5));
  EXPECT_NE(SampleIndices(z, 1000, 5), SampleIndices(z, 1000, 6));
}

TEST(Sample, ZipfRankFrequencySlope) {
  const auto idx = SampleIndices(SyntheticDistribution::Zipf(100, 1.0), 10000, 11);
  std::vector<double> counts(100, 0.0);
  for (size_t i : idx) counts[i] += 1;
  double sx = 0, sy = 0, sxx = 0, sxy = 0, m = 0;
  for (size_t r = 0; r < 100; ++r) {
    if (counts[r] == 0) continue;
    const double x = std::log(static_cast<double>(r + 1));
    const double y = std::log(counts[r]);
    sx += x, sy += y, sxx += x * x, sxy += x * y, m += 1;
  }
  const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  EXPECT_NEAR(slope, -1.0, 0.15);
}

TEST(StateNames, RoundTrip) {
  EXPECT_EQ(StateIndex(SimulatedState(42)), 42u);
  EXPECT_THROW(StateIndex(StateKey("state", "x1")), InvalidArgument);
  EXPECT_THROW(StateIndex(StateKey("other", "s1")), InvalidArgument);
}

TEST(TrueBlindMass, Examples) {
  const auto u = SyntheticDistribution::Uniform(4);
  const std::vector<size_t> all = {0, 1, 2, 3};
  EXPECT_EQ(TrueBlindMass(u, TableFromIndices(all), 1), 0.0);
  const std::vector<size_t> one = {0};
  EXPECT_DOUBLE_EQ(TrueBlindMass(u, TableFromIndices(one), 1), 0.75);
  const std::vector<size_t> bad = {7};
  EXPECT_THROW(TrueBlindMass(u, TableFromIndices(bad), 1), InvalidArgument);
  EXPECT_THROW(TrueBlindMass(u, TableFromIndices(one), 0), InvalidArgument);
}

// Second implementation: works from the raw index sequence and the family
// formula directly, never touching the CountTable or the cached probs.
double BruteForceBlindMass(Family family, double param, size_t k,
                           const std::vector<size_t>& indices, uint64_t tau) {
  std::vector<double> w(k);
  for (size_t i = 0; i < k; ++i) {
    w[i] = family == Family::kZipf ? std::pow(static_cast<double>(i + 1), -param)
                                   : std::pow(param, static_cast<double>(i));
  }
  double z = 0;
  for (double x : w) z += x;
  double mass = 0;
  for (size_t i = 0; i < k; ++i) {
    uint64_t c = 0;
    for (size_t j : indices) c += (j == i);
    if (c < tau) mass += w[i] / z;
  }
  return mass;
}

TEST(TrueBlindMass, MatchesBruteForce) {
  std::mt19937_64 rng(77);
  for (int i = 0; i < 40; ++i) {
    const bool zipf = i % 2 == 0;
    const size_t k = 1 + rng() % 300;
    const double param = zipf ? 0.5 + (rng() % 100) / 50.0 : 0.5 + (rng() % 49) / 100.0;
    const auto dist = zipf ? SyntheticDistribution::Zipf(k, param)
                           : SyntheticDistribution::Geometric(k, param);
    const auto idx = SampleIndices(dist, 1 + rng() % 2000, rng());
    const uint64_t tau = 1 + rng() % 10;
    EXPECT_NEAR(TrueBlindMass(dist, TableFromIndices(idx), tau),
                BruteForceBlindMass(dist.family(), param, k, idx, tau), 1e-12);
  }
}

TEST(TrueBlindMass, NonincreasingAsSamplesAccumulate) {
  const auto dist = SyntheticDistribution::Zipf(200, 1.2);
  const auto idx = SampleIndices(dist, 3000, 9);
  for (uint64_t tau : {1, 3, 10}) {
    double prev = 1.0;
    for (size_t n = 100; n <= idx.size(); n += 100) {
      const double m = TrueBlindMass(
          dist, TableFromIndices(std::span<const size_t>(idx.data(), n)), tau);
      EXPECT_LE(m, prev);
      prev = m;
    }
  }
}

TEST(RunSweep, ReproducibleAndOrdered) {
  const std::vector<SweepCell> cells = {
      {Family::kZipf, 1.2, 300, 500, 1, {}},
      {Family::kGeometric, 0.9, 100, 200, 3, {}},
      {Family::kCustom, 0, 3, 50, 2, {5, 1, 0.1}}};
  const auto a = RunSweep(cells, 20, 42);
  const auto b = RunSweep(cells, 20, 42);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, RunSweep(cells, 20, 43));
  EXPECT_EQ(a.generator, Rng::kAlgorithm);
  for (const auto& c : a.cells) {
    ASSERT_EQ(c.modes.size(), 3u);
    EXPECT_LE(c.Mode(EstimatorMode::kPlugin).estimate.mean,
              c.Mode(EstimatorMode::kPluginPlusUnseen).estimate.mean);
    for (const auto& m : c.modes) {
      EXPECT_GE(m.estimate.mean, 0.0);
      EXPECT_LE(m.estimate.mean, 1.0);
    }
  }
}

TEST(RunSweep, Rejections) {
  const std::vector<SweepCell> cells = {{Family::kZipf, 1.0, 10, 0, 1, {}}};
  EXPECT_THROW(RunSweep(cells, 5, 1), InvalidArgument);
  const std::vector<SweepCell> ok = {{Family::kZipf, 1.0, 10, 10, 1, {}}};
  EXPECT_THROW(RunSweep(ok, 0, 1), InvalidArgument);
}

TEST(RunSweep, UniformTwoStatesNeverBlind) {
  const std::vector<SweepCell> cells = {{Family::kUniform, 0, 2, 1000000, 1, {}}};
  const auto r = RunSweep(cells, 10, 5);
  EXPECT_EQ(r.cells[0].true_mass.mean, 0.0);
}

TEST(RunSweep, GoodTuringCalibration) {
  for (double s : {1.0, 1.5}) {
    const std::vector<SweepCell> cells = {{Family::kZipf, s, 1000, 5000, 1, {}}};
    const auto r = RunSweep(cells, 200, 2026);
    const auto& c = r.cells[0];
    EXPECT_NEAR(c.Mode(EstimatorMode::kPluginPlusUnseen).estimate.mean, c.true_mass.mean, 0.01)
        << "s=" << s;
  }
}

// With K = 1000 and n = 5000, mean unseen mass rises from s = 0 to s = 1.
TEST(RunSweep, HeavierTailLeavesMoreUnseenMass) {
  std::vector<SweepCell> cells;
  for (double s : {0.0, 0.5, 1.0}) cells.push_back({Family::kZipf, s, 1000, 5000, 1, {}});
  const auto r = RunSweep(cells, 200, 3);
  EXPECT_LE(r.cells[0].true_mass.mean, r.cells[1].true_mass.mean);
  EXPECT_LE(r.cells[1].true_mass.mean, r.cells[2].true_mass.mean);
}

}  // namespace
}  // namespace blindspot
