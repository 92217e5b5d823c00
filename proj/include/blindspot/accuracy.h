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

#ifndef BLINDSPOT_ACCURACY_H_
#define BLINDSPOT_ACCURACY_H_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "blindspot/count_table.h"
#include "blindspot/estimators.h"
#include "blindspot/state_key.h"

namespace blindspot {

// Best achievable accuracy when supported states are classified perfectly
// and blind states at `assumed_blind_accuracy`:
//   (1 - blind_mass) * 1 + blind_mass * assumed_blind_accuracy.
// Throws InvalidArgument when an input is outside [0,1].
double AccuracyCeiling(double blind_mass, double assumed_blind_accuracy);

// Chance-level accuracy 1/num_classes, a common preset for the blind region.
double ChanceAccuracy(uint64_t num_classes);

struct CeilingPoint {
  uint64_t tau = 0;
  double blind_mass = 0.0;
  double ceiling = 0.0;
};

struct CeilingCurve {
  double assumed_blind_accuracy = 0.0;
  std::vector<CeilingPoint> points;
};

CeilingCurve ComputeCeilingCurve(const BlindSpotCurve& curve,
                                 double assumed_blind_accuracy);

struct Outcome {
  StateKey state;
  bool correct = false;
};

// Accuracy split by support. Conditional accuracies are empty when no
// outcome falls in the corresponding region.
struct MixtureResult {
  double acc = 0.0;
  std::optional<double> acc_sup;
  std::optional<double> acc_blind;
  // Fraction of outcomes whose state has N_n(state) < tau.
  double blind_mass_empirical = 0.0;
  uint64_t supported_count = 0;
  uint64_t blind_count = 0;

  // (1 - b) acc_sup + b acc_blind, dropping an empty branch.
  double Recombined() const;
};

// Throws InvalidArgument on empty outcomes, tau == 0, or an outcome whose
// state does not conform to the table schema.
MixtureResult MixtureDecomposition(std::span<const Outcome> outcomes,
                                   const CountTable& table, uint64_t tau);

// Standard normal quantile function. Acklam's rational approximation refined
// by one Halley step; absolute error below 1e-12 on (0,1).
double InverseNormalCdf(double p);

struct Interval {
  double lower = 0.0;
  double upper = 0.0;
};

// Wilson score interval for a binomial proportion at the given two-sided
// confidence level.
Interval WilsonInterval(uint64_t successes, uint64_t trials, double confidence);

}  // namespace blindspot

#endif  // BLINDSPOT_ACCURACY_H_
