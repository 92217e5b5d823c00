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

#include "blindspot/abstraction.h"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "blindspot/count_table.h"
#include "blindspot/errors.h"
#include "blindspot/estimators.h"

namespace blindspot {
namespace {

constexpr double kPi = std::numbers::pi;

std::vector<ImuSample> Stream(size_t len, double rate, const std::string& label,
                              double t0 = 0.0) {
  std::vector<ImuSample> s(len);
  for (size_t i = 0; i < len; ++i) {
    s[i].timestamp = t0 + static_cast<double>(i) / rate;
    s[i].label = label;
    s[i].acc = {0.0, 0.0, 9.81};
  }
  return s;
}

SensorWindow ConstantWindow(Vec3 acc, Vec3 gyro = {0, 0, 0}, size_t len = 10) {
  SensorWindow w;
  w.label = "walk";
  w.sample_rate_hz = 100;
  w.acc.assign(len, acc);
  w.gyro.assign(len, gyro);
  return w;
}

SensorWindow RandomWindow(std::mt19937_64& rng, size_t len = 50) {
  std::normal_distribution<double> g(0.0, 3.0);
  SensorWindow w;
  w.label = std::string(1, static_cast<char>('a' + rng() % 4));
  w.sample_rate_hz = 100;
  for (size_t i = 0; i < len; ++i) {
    w.acc.push_back({g(rng), g(rng), 9.81 + g(rng)});
    w.gyro.push_back({g(rng), g(rng), g(rng)});
  }
  return w;
}

TEST(MakeWindows, HundredHertzFiveSecondWindows) {
  const auto stream = Stream(1000, 100.0, "walk");
  const auto windows = MakeWindows(stream, 100.0, 5.0, 2.5);
  ASSERT_EQ(windows.size(), 3u);
  EXPECT_EQ(windows[0].size(), 500u);
  EXPECT_EQ(windows[0].start_index, 0u);
  EXPECT_EQ(windows[1].start_index, 250u);
  EXPECT_EQ(windows[2].start_index, 500u);
}

TEST(MakeWindows, ShortStreamYieldsNothing) {
  EXPECT_TRUE(MakeWindows(Stream(499, 100.0, "walk"), 100.0, 5.0, 2.5).empty());
}

TEST(MakeWindows, TwentySecondStream) {
  const auto windows = MakeWindows(Stream(2000, 100.0, "walk"), 100.0, 5.0, 2.5);
  ASSERT_EQ(windows.size(), 7u);
  EXPECT_EQ(windows.back().start_index, 1500u);
}

TEST(MakeWindows, LabelChangeAndGapsRestartTheGrid) {
  auto stream = Stream(600, 100.0, "walk");
  const auto run = Stream(600, 100.0, "run", 6.0);
  stream.insert(stream.end(), run.begin(), run.end());
  // A 1 s gap inside the "run" block splits it into 300 + 300 samples.
  for (size_t i = 900; i < stream.size(); ++i) stream[i].timestamp += 1.0;
  const auto windows = MakeWindows(stream, 100.0, 3.0, 1.5);
  // walk: starts 0, 150, 300; run (600..899): start 600; run (900..1199): 900.
  ASSERT_EQ(windows.size(), 5u);
  EXPECT_EQ(windows[3].start_index, 600u);
  EXPECT_EQ(windows[3].label, "run");
  EXPECT_EQ(windows[4].start_index, 900u);
}

TEST(MakeWindows, RejectsBadParameters) {
  const auto stream = Stream(10, 100.0, "walk");
  EXPECT_THROW(MakeWindows(stream, 0.0, 5.0, 2.5), InvalidArgument);
  EXPECT_THROW(MakeWindows(stream, 100.0, 5.0, 6.0), InvalidArgument);
  EXPECT_THROW(MakeWindows(stream, 100.0, -1.0, 0.5), InvalidArgument);
}

TEST(MakeWindows, Deterministic) {
  std::mt19937_64 rng(4);
  auto stream = Stream(3000, 50.0, "a");
  for (auto& s : stream) {
    s.acc = {static_cast<double>(rng() % 100), 1.0, 2.0};
    s.label = (rng() % 500 == 0) ? "b" : "a";
  }
  const auto a = MakeWindows(stream, 50.0, 2.0, 1.0);
  const auto b = MakeWindows(stream, 50.0, 2.0, 1.0);
  ASSERT_EQ(a.size(), b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].start_index, b[i].start_index);
    EXPECT_EQ(a[i].label, b[i].label);
    EXPECT_EQ(a[i].acc, b[i].acc);
    EXPECT_EQ(a[i].gyro, b[i].gyro);
  }
}

TEST(TiltBin, ClosedFormCases) {
  EXPECT_EQ(TiltBin(ConstantWindow({0, 0, 9.81}), 6), 0);
  EXPECT_EQ(TiltBin(ConstantWindow({0, 0, -9.81}), 6), 0);
  EXPECT_EQ(TiltBin(ConstantWindow({9.81, 0, 0}), 6), 5);
  const double c = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(TiltAngle(ConstantWindow({c, 0, c})), kPi / 4, 1e-12);
  EXPECT_EQ(TiltBin(ConstantWindow({c, 0, c}), 6), 3);
  EXPECT_EQ(TiltBin(ConstantWindow({c, 0, c}), 12), 6);
}

TEST(TiltBin, ZeroMeanRejectedWithWindowName) {
  SensorWindow w = ConstantWindow({1, 0, 0}, {0, 0, 0}, 2);
  w.acc[1] = {-1, 0, 0};
  w.start_index = 42;
  try {
    TiltBin(w, 6);
    FAIL() << "expected rejection";
  } catch (const InvalidArgument& e) {
    EXPECT_NE(std::string(e.what()).find("walk"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("42"), std::string::npos);
  }
}

TEST(TiltBin, RangeAndScaleInvariance) {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> scale(1e-3, 1e3);
  for (int i = 0; i < 1000; ++i) {
    SensorWindow w = RandomWindow(rng, 20);
    const double phi = TiltAngle(w);
    EXPECT_GE(phi, 0.0);
    EXPECT_LE(phi, kPi / 2);
    for (int p : {1, 6, 7, 12}) {
      const int bin = TiltBin(w, p);
      EXPECT_GE(bin, 0);
      EXPECT_LT(bin, p);
      SensorWindow scaled = w;
      const double s = scale(rng);
      for (auto& a : scaled.acc) {
        for (double& x : a) x *= s;
      }
      EXPECT_EQ(TiltBin(scaled, p), bin);
    }
  }
}

TEST(GyroEnergy, Examples) {
  EXPECT_EQ(GyroEnergy(ConstantWindow({0, 0, 1}, {0, 0, 0})), 0.0);
  EXPECT_DOUBLE_EQ(GyroEnergy(ConstantWindow({0, 0, 1}, {1, 0, 0})), 1.0);
  EXPECT_DOUBLE_EQ(MeanAngularRate(ConstantWindow({0, 0, 1}, {3, 4, 0})), 5.0);
}

TEST(GyroEnergy, MatchesLoop) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 200; ++i) {
    const SensorWindow w = RandomWindow(rng, 1 + rng() % 100);
    double sq = 0.0;
    for (const auto& g : w.gyro) sq += g[0] * g[0] + g[1] * g[1] + g[2] * g[2];
    EXPECT_NEAR(GyroEnergy(w), sq / static_cast<double>(w.size()), 1e-9);
  }
}

TEST(QuantileEdges, Examples) {
  const std::vector<double> v = {3, 1, 0, 2};
  EXPECT_EQ(FitQuantileEdges(v, 3), (std::vector<double>{0, 1, 2, 3}));
  const std::vector<double> same(5, 2.5);
  EXPECT_EQ(FitQuantileEdges(same, 3), (std::vector<double>(4, 2.5)));
  const std::vector<double> w = {4, 9, 1, 7};
  EXPECT_EQ(FitQuantileEdges(w, 1), (std::vector<double>{1, 9}));
  // Linear interpolation: levels 0, .5, 1 over {1, 2, 4, 8} give 1, 3, 8.
  const std::vector<double> x = {8, 4, 2, 1};
  EXPECT_EQ(FitQuantileEdges(x, 2), (std::vector<double>{1, 3, 8}));
  EXPECT_THROW(FitQuantileEdges(std::vector<double>{}, 3), InvalidArgument);
  EXPECT_THROW(FitQuantileEdges(v, 0), InvalidArgument);
}

TEST(QuantileBin, BoundaryConventions) {
  const std::vector<double> edges = {0, 1, 2, 3};
  EXPECT_EQ(QuantileBin(1.0, edges), 0);
  EXPECT_EQ(QuantileBin(0.0, edges), 0);
  EXPECT_EQ(QuantileBin(1.5, edges), 1);
  EXPECT_EQ(QuantileBin(2.0, edges), 1);
  EXPECT_EQ(QuantileBin(3.0, edges), 2);
  EXPECT_EQ(QuantileBin(7.0, edges), 2);
  EXPECT_EQ(QuantileBin(-1.0, edges), 0);
  const std::vector<double> flat(4, 2.0);
  for (double e : {0.0, 2.0, 5.0}) EXPECT_EQ(QuantileBin(e, flat), 0);
}

TEST(QuantileBin, PartitionProperty) {
  std::mt19937_64 rng(12);
  std::exponential_distribution<double> ex(1.0);
  for (int i = 0; i < 200; ++i) {
    std::vector<double> vals(1 + rng() % 50);
    for (double& v : vals) v = std::round(ex(rng) * 4) / 4;  // ties on purpose
    const int q = 1 + static_cast<int>(rng() % 8);
    const auto edges = FitQuantileEdges(vals, q);
    for (int j = 0; j < 100; ++j) {
      const double e = ex(rng) * 2;
      const int bin = QuantileBin(e, edges);
      ASSERT_GE(bin, 0);
      ASSERT_LT(bin, q);
      // Out-of-range values clamp to the end bins; in range, exactly one
      // bin's half-open interval (first bin closed) holds e.
      if (edges.front() == edges.back() || e < edges.front()) {
        EXPECT_EQ(bin, 0);
        continue;
      }
      if (e > edges.back()) {
        EXPECT_EQ(bin, q - 1);
        continue;
      }
      int matches = 0;
      for (int b = 0; b < q; ++b) {
        const bool in = (b == 0) ? (e >= edges[0] && e <= edges[1])
                                 : (e > edges[b] && e <= edges[b + 1]);
        if (in) {
          ++matches;
          EXPECT_EQ(b, bin);
        }
      }
      EXPECT_EQ(matches, 1);
    }
  }
}

TEST(AbstractionConfig, PresetsAndValidation) {
  EXPECT_EQ(AbstractionConfig::Preset("a").Schema(), (std::vector<std::string>{"activity"}));
  EXPECT_EQ(AbstractionConfig::Preset("a,p,e").Schema(),
            (std::vector<std::string>{"activity", "tilt", "energy"}));
  const auto dr = AbstractionConfig::Preset("deployment-refined");
  EXPECT_EQ(dr.tilt_bins, 12);
  EXPECT_EQ(dr.energy_bins, 8);
  EXPECT_EQ(dr.rate_bins, 8);
  EXPECT_TRUE(dr.Uses(Factor::kAngularRate));
  EXPECT_FALSE(dr.Fitted());
  EXPECT_THROW(AbstractionConfig::Preset("a,e"), InvalidArgument);
  AbstractionConfig bad = AbstractionConfig::ActivityTiltEnergy();
  bad.energy_edges = {0, 2, 1, 3};
  EXPECT_THROW(bad.Validate(), InvalidArgument);
  bad.energy_edges = {0, 1};
  EXPECT_THROW(bad.Validate(), InvalidArgument);
  EXPECT_EQ(ParseFactor(FactorName(Factor::kAngularRate)), Factor::kAngularRate);
}

TEST(AbstractWindow, KeysAndFitting) {
  const SensorWindow w = ConstantWindow({0, 0, 9.81}, {1, 0, 0});
  const StateKey a = AbstractWindow(w, AbstractionConfig::Activity());
  EXPECT_EQ(a.ToString(), "walk");
  EXPECT_THROW(AbstractWindow(w, AbstractionConfig::ActivityTiltEnergy()), InvalidArgument);
  const std::vector<SensorWindow> ws = {w};
  const auto fitted = FitAbstraction(AbstractionConfig::ActivityTiltEnergy(), ws);
  EXPECT_EQ(AbstractWindow(w, fitted).ToString(), "walk|0|0");
}

// Adding factors refines the partition: more distinct keys, more blind mass.
TEST(AbstractWindow, RefinementMonotonicity) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<SensorWindow> ws;
    for (int i = 0; i < 300; ++i) ws.push_back(RandomWindow(rng, 20));
    std::vector<CountTable> tables;
    for (const char* preset : {"a", "a,p", "a,p,e", "deployment-refined"}) {
      const auto config = FitAbstraction(AbstractionConfig::Preset(preset), ws);
      tables.push_back(BuildCountTable(AbstractWindows(ws, config), config.Schema()));
    }
    // a < a,p < a,p,e are nested; deployment-refined uses different bin
    // counts, so it is only compared to the activity-only abstraction.
    for (size_t i = 1; i < tables.size(); ++i) {
      const auto& coarse = (i == 3) ? tables[0] : tables[i - 1];
      EXPECT_GE(tables[i].distinct(), coarse.distinct());
      const auto fc = ComputeBlindSpotCurve(tables[i], EstimatorMode::kPlugin, 30);
      const auto cc = ComputeBlindSpotCurve(coarse, EstimatorMode::kPlugin, 30);
      for (size_t j = 0; j < fc.points.size(); ++j) {
        EXPECT_GE(fc.points[j].mass, cc.points[j].mass);
      }
    }
  }
}

TEST(IcdPrefixState, Examples) {
  Admission adm{"1", {{2, "E119"}, {1, "I2510"}, {1, "Z000"}}};
  EXPECT_EQ(IcdPrefixState(adm)->ToString(), "I251");
  EXPECT_EQ(IcdPrefixState(Admission{"2", {{1, "A41"}}})->ToString(), "A41");
  EXPECT_FALSE(IcdPrefixState(Admission{"3", {{2, "A41"}}}).has_value());
}

}  // namespace
}  // namespace blindspot
