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

#include "blindspot/estimators.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "blindspot/errors.h"

namespace blindspot {
namespace {

void CheckTau(uint64_t tau) {
  if (tau == 0) {
    throw InvalidArgument("support threshold tau must be at least 1");
  }
}

void SortEntries(std::vector<DecompositionEntry>& entries) {
  std::sort(entries.begin(), entries.end(),
            [](const DecompositionEntry& a, const DecompositionEntry& b) {
              if (a.contribution != b.contribution) {
                return a.contribution > b.contribution;
              }
              return a.state < b.state;
            });
}

}  // namespace

std::string_view ModeName(EstimatorMode mode) {
  switch (mode) {
    case EstimatorMode::kPlugin:
      return "plugin";
    case EstimatorMode::kPluginPlusUnseen:
      return "plugin+unseen";
    case EstimatorMode::kGeneralizedGoodTuring:
      return "generalized-gt";
  }
  return "unknown";
}

EstimatorMode ParseMode(std::string_view name) {
  for (EstimatorMode mode : kAllModes) {
    if (ModeName(mode) == name) return mode;
  }
  throw InvalidArgument("unknown estimator mode '" + std::string(name) + "'");
}

bool IsExtension(EstimatorMode mode) {
  return mode == EstimatorMode::kGeneralizedGoodTuring;
}

double BlindSpotCurve::At(uint64_t tau) const {
  for (const auto& p : points) {
    if (p.tau == tau) return p.mass;
  }
  throw InvalidArgument("tau " + std::to_string(tau) + " is not on the curve");
}

double BlindSpotMass(const CountTable& table, const EmpiricalDistribution& dist,
                     uint64_t tau) {
  CheckTau(tau);
  if (dist.source() == DistributionSource::kKnownTruth) {
    for (const auto& [key, count] : table.counts()) {
      if (!dist.probs().contains(key)) {
        throw InvalidArgument("observed state '" + key.ToString() +
                              "' is outside the known distribution's support");
      }
    }
  }
  double mass = 0.0;
  for (const auto& [key, p] : dist.probs()) {
    if (table.count(key) < tau) mass += p;
  }
  return mass;
}

BlindSpotCurve ComputeBlindSpotCurve(const CountTable& table,
                                     EstimatorMode mode, uint64_t tau_max) {
  CheckTau(tau_max);
  const FreqOfFreqs fof = ComputeFreqOfFreqs(table);
  const double n = static_cast<double>(fof.n);
  const double unseen = GoodTuringUnseenMass(fof);

  BlindSpotCurve curve;
  curve.mode = mode;
  curve.n = fof.n;
  curve.k_observed = fof.k_observed;
  curve.points.reserve(tau_max);

  // Exact integer mass of observed states with support below the threshold.
  // below[tau] = sum_{r < tau} r f_r.
  uint64_t below = 0;
  for (uint64_t tau = 1; tau <= tau_max; ++tau) {
    double mass = 0.0;
    switch (mode) {
      case EstimatorMode::kPlugin:
        mass = static_cast<double>(below) / n;
        break;
      case EstimatorMode::kPluginPlusUnseen:
        mass = std::min(1.0, static_cast<double>(below) / n + unseen);
        break;
      case EstimatorMode::kGeneralizedGoodTuring:
        // sum_{r=0}^{tau-1} (r+1) f_{r+1} = below[tau + 1].
        mass = static_cast<double>(below + tau * fof.at(tau)) / n;
        break;
    }
    curve.points.push_back({tau, mass});
    below += tau * fof.at(tau);
  }
  return curve;
}

double GoodTuringUnseenMass(const FreqOfFreqs& fof) {
  if (fof.n == 0) throw InvalidArgument("frequency table has n = 0");
  return static_cast<double>(fof.at(1)) / static_cast<double>(fof.n);
}

RiskWeights::RiskWeights(std::map<StateKey, double> weights,
                         double default_weight)
    : weights_(std::move(weights)), default_weight_(default_weight) {
  if (!(std::isfinite(default_weight_) && default_weight_ >= 0.0)) {
    throw InvalidArgument("default risk weight must be finite and >= 0");
  }
  for (const auto& [key, w] : weights_) {
    if (!(std::isfinite(w) && w >= 0.0)) {
      throw InvalidArgument("risk weight of '" + key.ToString() +
                            "' must be finite and >= 0");
    }
  }
}

double RiskWeights::weight(const StateKey& key) const {
  auto it = weights_.find(key);
  return it == weights_.end() ? default_weight_ : it->second;
}

RiskWeightedResult RiskWeightedBlindness(const CountTable& table,
                                         const EmpiricalDistribution& dist,
                                         const RiskWeights& weights,
                                         uint64_t tau) {
  // Validates tau and known-truth support.
  BlindSpotMass(table, dist, tau);

  RiskWeightedResult result;
  result.decomposition.tau = tau;
  for (const auto& [key, p] : dist.probs()) {
    const uint64_t count = table.count(key);
    if (count >= tau) continue;
    const double w = weights.weight(key);
    result.total += p * w;
    if (count > 0) {
      result.decomposition.entries.push_back({key, count, p, w, p * w});
    }
  }
  SortEntries(result.decomposition.entries);
  for (const auto& e : result.decomposition.entries) {
    result.decomposition.total += e.contribution;
  }
  return result;
}

BlindnessDecomposition DecomposeBlindness(const CountTable& table,
                                          uint64_t tau,
                                          std::optional<size_t> top_k) {
  CheckTau(tau);
  BlindnessDecomposition out;
  out.tau = tau;
  const double n = static_cast<double>(table.n());
  for (const auto& [key, count] : table.counts()) {
    if (count >= tau) continue;
    const double p = static_cast<double>(count) / n;
    out.entries.push_back({key, count, p, 1.0, p});
  }
  SortEntries(out.entries);
  for (const auto& e : out.entries) out.total += e.contribution;
  if (top_k && out.entries.size() > *top_k) {
    out.entries.erase(out.entries.begin() + static_cast<std::ptrdiff_t>(*top_k),
                      out.entries.end());
  }
  return out;
}

}  // namespace blindspot
