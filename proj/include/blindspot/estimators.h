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

#ifndef BLINDSPOT_ESTIMATORS_H_
#define BLINDSPOT_ESTIMATORS_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string_view>
#include <vector>

#include "blindspot/count_table.h"
#include "blindspot/state_key.h"

namespace blindspot {

// How a blind-spot curve is estimated from a count table.
//
//   kPlugin               sum of N(x)/n over observed states with N(x) < tau.
//                         Identically 0 at tau = 1.
//   kPluginPlusUnseen     kPlugin plus the Good-Turing unseen mass f1/n,
//                         capped at 1.
//   kGeneralizedGoodTuring  sum_{r<tau} (r+1) f_{r+1} / n. Not part of the
//                         original method; reported as an extension.
enum class EstimatorMode { kPlugin, kPluginPlusUnseen, kGeneralizedGoodTuring };

inline constexpr EstimatorMode kAllModes[] = {
    EstimatorMode::kPlugin, EstimatorMode::kPluginPlusUnseen,
    EstimatorMode::kGeneralizedGoodTuring};

std::string_view ModeName(EstimatorMode mode);
// Throws InvalidArgument for unknown names.
EstimatorMode ParseMode(std::string_view name);
bool IsExtension(EstimatorMode mode);

struct CurvePoint {
  uint64_t tau = 0;
  double mass = 0.0;
};

struct BlindSpotCurve {
  EstimatorMode mode = EstimatorMode::kPlugin;
  uint64_t n = 0;
  uint64_t k_observed = 0;
  std::vector<CurvePoint> points;  // tau = 1, 2, ..., tau_max

  // Throws InvalidArgument if tau is not on the curve.
  double At(uint64_t tau) const;
};

// sum_x P(x) 1{N_n(x) < tau}. States absent from `table` have N = 0, so with
// a known-truth distribution unseen states contribute their true mass; with a
// plug-in distribution they carry no mass at all.
//
// Throws InvalidArgument when tau == 0, or when a known-truth distribution
// does not cover every observed state.
double BlindSpotMass(const CountTable& table, const EmpiricalDistribution& dist,
                     uint64_t tau);

BlindSpotCurve ComputeBlindSpotCurve(const CountTable& table,
                                     EstimatorMode mode, uint64_t tau_max);

// f1 / n.
double GoodTuringUnseenMass(const FreqOfFreqs& fof);

// Per-state consequence weights. Unlisted states get the default weight.
class RiskWeights {
 public:
  RiskWeights() = default;
  // Throws InvalidArgument for a negative or non-finite weight.
  RiskWeights(std::map<StateKey, double> weights, double default_weight);

  double weight(const StateKey& key) const;
  double default_weight() const { return default_weight_; }
  const std::map<StateKey, double>& weights() const { return weights_; }

 private:
  std::map<StateKey, double> weights_;
  double default_weight_ = 1.0;
};

struct DecompositionEntry {
  StateKey state;
  uint64_t count = 0;
  double prob = 0.0;
  double weight = 1.0;
  double contribution = 0.0;
};

// Observed blind states (count < tau) ranked by contribution, descending,
// ties broken by key order. `total` is the sum over all blind observed states
// even when `entries` has been truncated.
struct BlindnessDecomposition {
  uint64_t tau = 0;
  std::vector<DecompositionEntry> entries;
  double total = 0.0;
};

struct RiskWeightedResult {
  // sum_x P(x) w(x) 1{N(x) < tau}, including unseen states when `dist` is a
  // known-truth distribution.
  double total = 0.0;
  // Observed contributors only.
  BlindnessDecomposition decomposition;
};

RiskWeightedResult RiskWeightedBlindness(const CountTable& table,
                                         const EmpiricalDistribution& dist,
                                         const RiskWeights& weights,
                                         uint64_t tau);

// Unweighted plug-in decomposition, optionally truncated to the top_k
// contributors.
BlindnessDecomposition DecomposeBlindness(
    const CountTable& table, uint64_t tau,
    std::optional<size_t> top_k = std::nullopt);

}  // namespace blindspot

#endif  // BLINDSPOT_ESTIMATORS_H_
