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

#ifndef BLINDSPOT_ABSTRACTION_H_
#define BLINDSPOT_ABSTRACTION_H_

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "blindspot/state_key.h"

namespace blindspot {

using Vec3 = std::array<double, 3>;

// One time step of a labeled IMU stream.
struct ImuSample {
  double timestamp = 0.0;  // seconds
  std::string label;
  Vec3 acc{};
  Vec3 gyro{};
};

// A fixed-length slice of a single-label stream.
struct SensorWindow {
  std::string label;
  double sample_rate_hz = 0.0;
  size_t start_index = 0;  // position of the first sample in the stream
  std::vector<Vec3> acc;
  std::vector<Vec3> gyro;

  size_t size() const { return acc.size(); }
};

// Cuts `stream` into windows of round(window_s * rate) samples every
// round(stride_s * rate) samples.
//
// The stream is first split into runs at label changes, at timestamp gaps
// larger than 1.5 sample periods (rows removed during ingestion), and where
// timestamps fail to increase (concatenated recordings); the stride
// grid restarts at the beginning of each run, so every emitted window is
// contiguous and carries one label. Trailing partial windows are dropped.
//
// Throws InvalidArgument unless rate > 0, window_s > 0 and
// 0 < stride_s <= window_s.
std::vector<SensorWindow> MakeWindows(std::span<const ImuSample> stream,
                                      double sample_rate_hz, double window_s,
                                      double stride_s);

// Angle in [0, pi/2] between the window-mean acceleration and the sensor z
// axis (sign-insensitive). Throws InvalidArgument when the mean vector has
// zero norm.
double TiltAngle(const SensorWindow& window);

// min(P-1, floor(P * phi / (pi/2))).
int TiltBin(const SensorWindow& window, int tilt_bins);

// (1/L) sum_t |w_t|^2.
double GyroEnergy(const SensorWindow& window);

// (1/L) sum_t |w_t|.
double MeanAngularRate(const SensorWindow& window);

// Empirical quantiles at levels 0, 1/Q, ..., 1 with linear interpolation
// between order statistics. Throws InvalidArgument on empty input or Q < 1.
std::vector<double> FitQuantileEdges(std::span<const double> values, int bins);

// Bin j such that edges[j] < value <= edges[j+1]; the first bin is closed at
// both ends. Values outside the fitted range clamp to the end bins, and
// degenerate (all-equal) edges put everything in bin 0.
int QuantileBin(double value, std::span<const double> edges);

enum class Factor { kActivity, kTilt, kEnergy, kAngularRate };

std::string_view FactorName(Factor factor);
Factor ParseFactor(std::string_view name);

struct AbstractionConfig {
  int tilt_bins = 6;
  int energy_bins = 3;
  int rate_bins = 3;
  std::vector<double> energy_edges;  // energy_bins + 1 values once fitted
  std::vector<double> rate_edges;    // rate_bins + 1 values once fitted
  std::vector<Factor> factors{Factor::kActivity};
  std::string refinement_tag = "a";

  // Factor names in key order.
  std::vector<std::string> Schema() const;
  bool Uses(Factor factor) const;
  bool Fitted() const;
  // Throws InvalidArgument on non-positive bin counts, an empty or duplicated
  // factor list, or edges of the wrong size / not nondecreasing.
  void Validate() const;

  // x = a
  static AbstractionConfig Activity();
  // x = (a, p), P = 6
  static AbstractionConfig ActivityTilt();
  // x = (a, p, e), P = 6, Q = 3
  static AbstractionConfig ActivityTiltEnergy();
  // x = (a, p, e, r) with P = 12, Q = 8 and 8 angular-rate bins. The bin
  // counts are an interpretation; tune via config when replicating.
  static AbstractionConfig DeploymentRefined();
  // "a", "a,p", "a,p,e" or "deployment-refined".
  static AbstractionConfig Preset(std::string_view name);
};

// Fits the quantile edges of every enabled intensity factor on `windows`.
AbstractionConfig FitAbstraction(AbstractionConfig config,
                                 std::span<const SensorWindow> windows);

// Maps a window to its state key (factors in activity, tilt, energy, rate
// order). Requires a fitted config when intensity factors are enabled.
StateKey AbstractWindow(const SensorWindow& window,
                        const AbstractionConfig& config);

std::vector<StateKey> AbstractWindows(std::span<const SensorWindow> windows,
                                      const AbstractionConfig& config);

struct Diagnosis {
  int seq_num = 0;
  std::string icd_code;
};

struct Admission {
  std::string id;
  std::vector<Diagnosis> diagnoses;  // file order
};

inline constexpr std::string_view kIcdFactor = "icd4";

// Single-factor key holding the first four characters of the admission's
// primary (seq_num == 1) ICD code. Empty when there is no primary diagnosis;
// the first primary code in file order wins.
std::optional<StateKey> IcdPrefixState(const Admission& admission);

}  // namespace blindspot

#endif  // BLINDSPOT_ABSTRACTION_H_
