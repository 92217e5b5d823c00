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

#ifndef BLINDSPOT_SIMULATOR_H_
#define BLINDSPOT_SIMULATOR_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "blindspot/count_table.h"
#include "blindspot/estimators.h"
#include "blindspot/random.h"
#include "blindspot/state_key.h"

namespace blindspot {

enum class Family { kZipf, kGeometric, kUniform, kCustom };

std::string_view FamilyName(Family family);
Family ParseFamily(std::string_view name);

// A fully materialized distribution over K states s0 .. s{K-1}.
class SyntheticDistribution {
 public:
  // p_i proportional to 1/(i+1)^s, s >= 0 (s = 0 is uniform).
  static SyntheticDistribution Zipf(size_t k, double exponent);
  // p_i proportional to ratio^i, ratio in (0,1).
  static SyntheticDistribution Geometric(size_t k, double ratio);
  static SyntheticDistribution Uniform(size_t k);
  // Nonnegative weights, normalized to sum to 1.
  static SyntheticDistribution Custom(std::vector<double> weights);

  Family family() const { return family_; }
  double param() const { return param_; }
  size_t k() const { return probs_.size(); }
  const std::vector<double>& probs() const { return probs_; }

  // Known-truth distribution keyed by StateName(i).
  EmpiricalDistribution AsKnownTruth() const;

  // Inverse-CDF lookup for u in [0,1).
  size_t Quantile(double u) const;

 private:
  SyntheticDistribution(Family family, double param, std::vector<double> weights);

  Family family_;
  double param_;
  std::vector<double> probs_;
  std::vector<double> cdf_;
};

inline constexpr std::string_view kSimulatedFactor = "state";

// "s<i>".
std::string StateName(size_t index);
StateKey SimulatedState(size_t index);
// Inverse of StateName; throws InvalidArgument for malformed names.
size_t StateIndex(const StateKey& key);

// n i.i.d. state indices. Deterministic in (dist, n, seed).
std::vector<size_t> SampleIndices(const SyntheticDistribution& dist, uint64_t n,
                                  uint64_t seed);
std::vector<StateKey> Sample(const SyntheticDistribution& dist, uint64_t n,
                             uint64_t seed);

// Count table over the single "state" factor, built from sampled indices.
CountTable TableFromIndices(std::span<const size_t> indices);

// Exact B_n(tau) = sum over all K states of p_i 1{N(s_i) < tau}. Throws
// InvalidArgument when the table holds a state outside 0..K-1.
double TrueBlindMass(const SyntheticDistribution& dist, const CountTable& table,
                     uint64_t tau);

struct SweepCell {
  Family family = Family::kZipf;
  double param = 1.0;  // zipf exponent or geometric ratio
  size_t k = 0;
  uint64_t n = 0;
  uint64_t tau = 1;
  // Only used for Family::kCustom.
  std::vector<double> weights;

  friend bool operator==(const SweepCell&, const SweepCell&) = default;
};

SyntheticDistribution MakeDistribution(const SweepCell& cell);

struct Moments {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation, 0 when T = 1

  friend bool operator==(const Moments&, const Moments&) = default;
};

struct ModeStats {
  EstimatorMode mode = EstimatorMode::kPlugin;
  Moments estimate;
  double mean_abs_error = 0.0;  // against the true blind mass, per trial

  friend bool operator==(const ModeStats&, const ModeStats&) = default;
};

struct CellResult {
  SweepCell cell;
  Moments true_mass;
  std::vector<ModeStats> modes;  // one per EstimatorMode, kAllModes order

  const ModeStats& Mode(EstimatorMode mode) const;

  friend bool operator==(const CellResult&, const CellResult&) = default;
};

struct SweepResult {
  uint64_t master_seed = 0;
  uint64_t trials = 0;
  std::string generator{Rng::kAlgorithm};
  std::vector<CellResult> cells;

  friend bool operator==(const SweepResult&, const SweepResult&) = default;
};

// Runs `trials` independent samples per cell. Trial t of cell c uses seed
// DeriveSeed(master_seed, c, t). Throws InvalidArgument for invalid cells or
// trials == 0; throws InvariantViolation if a trial breaks
// plugin <= plugin+unseen.
SweepResult RunSweep(std::span<const SweepCell> cells, uint64_t trials,
                     uint64_t master_seed);

}  // namespace blindspot

#endif  // BLINDSPOT_SIMULATOR_H_
