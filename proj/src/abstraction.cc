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

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "blindspot/errors.h"

namespace blindspot {
namespace {

double Norm(const Vec3& v) {
  return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
}

void CheckEdges(const std::vector<double>& edges, int bins, const char* what) {
  if (edges.empty()) return;
  if (edges.size() != static_cast<size_t>(bins) + 1) {
    throw InvalidArgument(std::string(what) + " edges must have bins + 1 values");
  }
  if (!std::is_sorted(edges.begin(), edges.end())) {
    throw InvalidArgument(std::string(what) + " edges must be nondecreasing");
  }
}

// Timestamps must advance by at most `max_gap`; a backwards step marks the
// start of another recording.
bool SameRun(double prev, double next, double max_gap) {
  const double dt = next - prev;
  return dt > 0.0 && dt <= max_gap;
}

}  // namespace

std::vector<SensorWindow> MakeWindows(std::span<const ImuSample> stream,
                                      double sample_rate_hz, double window_s,
                                      double stride_s) {
  if (!(sample_rate_hz > 0.0)) throw InvalidArgument("sample rate must be > 0");
  if (!(window_s > 0.0)) throw InvalidArgument("window length must be > 0");
  if (!(stride_s > 0.0 && stride_s <= window_s)) {
    throw InvalidArgument("stride must be in (0, window length]");
  }
  const auto length = static_cast<size_t>(std::llround(window_s * sample_rate_hz));
  const auto stride = static_cast<size_t>(std::llround(stride_s * sample_rate_hz));
  if (length == 0 || stride == 0) {
    throw InvalidArgument("window or stride is shorter than one sample");
  }
  const double max_gap = 1.5 / sample_rate_hz;

  std::vector<SensorWindow> windows;
  size_t run_begin = 0;
  while (run_begin < stream.size()) {
    size_t run_end = run_begin + 1;
    while (run_end < stream.size() &&
           stream[run_end].label == stream[run_begin].label &&
           SameRun(stream[run_end - 1].timestamp, stream[run_end].timestamp,
                   max_gap)) {
      ++run_end;
    }
    for (size_t start = run_begin; start + length <= run_end; start += stride) {
      SensorWindow w;
      w.label = stream[start].label;
      w.sample_rate_hz = sample_rate_hz;
      w.start_index = start;
      w.acc.reserve(length);
      w.gyro.reserve(length);
      for (size_t i = start; i < start + length; ++i) {
        w.acc.push_back(stream[i].acc);
        w.gyro.push_back(stream[i].gyro);
      }
      windows.push_back(std::move(w));
    }
    run_begin = run_end;
  }
  return windows;
}

double TiltAngle(const SensorWindow& window) {
  if (window.acc.empty()) throw InvalidArgument("window has no samples");
  Vec3 mean{};
  for (const auto& a : window.acc) {
    for (int k = 0; k < 3; ++k) mean[k] += a[k];
  }
  for (auto& m : mean) m /= static_cast<double>(window.acc.size());
  const double norm = Norm(mean);
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw InvalidArgument("window '" + window.label + "' at sample " +
                          std::to_string(window.start_index) +
                          " has a zero mean acceleration; tilt is undefined");
  }
  const double cos_z = std::min(1.0, std::abs(mean[2]) / norm);
  return std::acos(cos_z);
}

int TiltBin(const SensorWindow& window, int tilt_bins) {
  if (tilt_bins < 1) throw InvalidArgument("tilt bins must be >= 1");
  const double phi = TiltAngle(window);
  const auto bin = static_cast<int>(
      std::floor(tilt_bins * phi / (std::numbers::pi / 2.0)));
  return std::clamp(bin, 0, tilt_bins - 1);
}

double GyroEnergy(const SensorWindow& window) {
  if (window.gyro.empty()) throw InvalidArgument("window has no samples");
  double sum = 0.0;
  for (const auto& w : window.gyro) sum += w[0] * w[0] + w[1] * w[1] + w[2] * w[2];
  return sum / static_cast<double>(window.gyro.size());
}

double MeanAngularRate(const SensorWindow& window) {
  if (window.gyro.empty()) throw InvalidArgument("window has no samples");
  double sum = 0.0;
  for (const auto& w : window.gyro) sum += Norm(w);
  return sum / static_cast<double>(window.gyro.size());
}

std::vector<double> FitQuantileEdges(std::span<const double> values, int bins) {
  if (values.empty()) throw InvalidArgument("cannot fit quantiles on no values");
  if (bins < 1) throw InvalidArgument("bin count must be >= 1");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const size_t last = sorted.size() - 1;
  std::vector<double> edges;
  edges.reserve(bins + 1);
  for (int j = 0; j <= bins; ++j) {
    const double h = static_cast<double>(last * j) / bins;
    const auto lo = static_cast<size_t>(std::floor(h));
    const size_t hi = std::min(lo + 1, last);
    const double frac = h - static_cast<double>(lo);
    edges.push_back(sorted[lo] + frac * (sorted[hi] - sorted[lo]));
  }
  return edges;
}

int QuantileBin(double value, std::span<const double> edges) {
  if (edges.size() < 2) throw InvalidArgument("need at least two bin edges");
  if (edges.front() == edges.back()) return 0;
  const int bins = static_cast<int>(edges.size()) - 1;
  for (int j = 0; j < bins; ++j) {
    if (value <= edges[j + 1]) return j;
  }
  return bins - 1;
}

std::string_view FactorName(Factor factor) {
  switch (factor) {
    case Factor::kActivity:
      return "activity";
    case Factor::kTilt:
      return "tilt";
    case Factor::kEnergy:
      return "energy";
    case Factor::kAngularRate:
      return "rate";
  }
  return "unknown";
}

Factor ParseFactor(std::string_view name) {
  for (Factor f : {Factor::kActivity, Factor::kTilt, Factor::kEnergy,
                   Factor::kAngularRate}) {
    if (FactorName(f) == name) return f;
  }
  throw InvalidArgument("unknown abstraction factor '" + std::string(name) + "'");
}

std::vector<std::string> AbstractionConfig::Schema() const {
  std::vector<std::string> schema;
  for (Factor f : factors) schema.emplace_back(FactorName(f));
  return schema;
}

bool AbstractionConfig::Uses(Factor factor) const {
  return std::find(factors.begin(), factors.end(), factor) != factors.end();
}

bool AbstractionConfig::Fitted() const {
  return (!Uses(Factor::kEnergy) || !energy_edges.empty()) &&
         (!Uses(Factor::kAngularRate) || !rate_edges.empty());
}

void AbstractionConfig::Validate() const {
  if (tilt_bins < 1 || energy_bins < 1 || rate_bins < 1) {
    throw InvalidArgument("bin counts must be >= 1");
  }
  if (factors.empty()) throw InvalidArgument("abstraction has no factors");
  std::set<Factor> seen(factors.begin(), factors.end());
  if (seen.size() != factors.size()) {
    throw InvalidArgument("abstraction lists a factor twice");
  }
  CheckEdges(energy_edges, energy_bins, "energy");
  CheckEdges(rate_edges, rate_bins, "angular-rate");
}

AbstractionConfig AbstractionConfig::Activity() { return AbstractionConfig{}; }

AbstractionConfig AbstractionConfig::ActivityTilt() {
  AbstractionConfig c;
  c.factors = {Factor::kActivity, Factor::kTilt};
  c.refinement_tag = "a,p";
  return c;
}

AbstractionConfig AbstractionConfig::ActivityTiltEnergy() {
  AbstractionConfig c;
  c.factors = {Factor::kActivity, Factor::kTilt, Factor::kEnergy};
  c.refinement_tag = "a,p,e";
  return c;
}

AbstractionConfig AbstractionConfig::DeploymentRefined() {
  AbstractionConfig c;
  c.tilt_bins = 12;
  c.energy_bins = 8;
  c.rate_bins = 8;
  c.factors = {Factor::kActivity, Factor::kTilt, Factor::kEnergy,
               Factor::kAngularRate};
  c.refinement_tag = "deployment-refined";
  return c;
}

AbstractionConfig AbstractionConfig::Preset(std::string_view name) {
  if (name == "a") return Activity();
  if (name == "a,p") return ActivityTilt();
  if (name == "a,p,e") return ActivityTiltEnergy();
  if (name == "deployment-refined") return DeploymentRefined();
  throw InvalidArgument("unknown abstraction preset '" + std::string(name) + "'");
}

AbstractionConfig FitAbstraction(AbstractionConfig config,
                                 std::span<const SensorWindow> windows) {
  config.Validate();
  if (config.Uses(Factor::kEnergy)) {
    std::vector<double> energies;
    energies.reserve(windows.size());
    for (const auto& w : windows) energies.push_back(GyroEnergy(w));
    config.energy_edges = FitQuantileEdges(energies, config.energy_bins);
  }
  if (config.Uses(Factor::kAngularRate)) {
    std::vector<double> rates;
    rates.reserve(windows.size());
    for (const auto& w : windows) rates.push_back(MeanAngularRate(w));
    config.rate_edges = FitQuantileEdges(rates, config.rate_bins);
  }
  return config;
}

StateKey AbstractWindow(const SensorWindow& window,
                        const AbstractionConfig& config) {
  if (!config.Fitted()) {
    throw InvalidArgument("abstraction quantile edges have not been fitted");
  }
  std::vector<StateKey::Factor> factors;
  for (Factor f : config.factors) {
    std::string value;
    switch (f) {
      case Factor::kActivity:
        value = window.label;
        break;
      case Factor::kTilt:
        value = std::to_string(TiltBin(window, config.tilt_bins));
        break;
      case Factor::kEnergy:
        value = std::to_string(QuantileBin(GyroEnergy(window), config.energy_edges));
        break;
      case Factor::kAngularRate:
        value = std::to_string(QuantileBin(MeanAngularRate(window), config.rate_edges));
        break;
    }
    factors.emplace_back(std::string(FactorName(f)), std::move(value));
  }
  return StateKey(std::move(factors));
}

std::vector<StateKey> AbstractWindows(std::span<const SensorWindow> windows,
                                      const AbstractionConfig& config) {
  config.Validate();
  std::vector<StateKey> keys;
  keys.reserve(windows.size());
  for (const auto& w : windows) keys.push_back(AbstractWindow(w, config));
  return keys;
}

std::optional<StateKey> IcdPrefixState(const Admission& admission) {
  for (const auto& d : admission.diagnoses) {
    if (d.seq_num == 1) {
      return StateKey(std::string(kIcdFactor), d.icd_code.substr(0, 4));
    }
  }
  return std::nullopt;
}

}  // namespace blindspot
