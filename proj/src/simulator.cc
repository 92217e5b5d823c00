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

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>

#include "blindspot/errors.h"

namespace blindspot {
namespace {

Moments Summarize(std::span<const double> xs) {
  Moments m;
  m.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - m.mean) * (x - m.mean);
    m.stddev = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  }
  return m;
}

}  // namespace

std::string_view FamilyName(Family family) {
  switch (family) {
    case Family::kZipf:
      return "zipf";
    case Family::kGeometric:
      return "geometric";
    case Family::kUniform:
      return "uniform";
    case Family::kCustom:
      return "custom";
  }
  return "unknown";
}

Family ParseFamily(std::string_view name) {
  for (Family f : {Family::kZipf, Family::kGeometric, Family::kUniform,
                   Family::kCustom}) {
    if (FamilyName(f) == name) return f;
  }
  throw InvalidArgument("unknown distribution family '" + std::string(name) + "'");
}

SyntheticDistribution::SyntheticDistribution(Family family, double param,
                                             std::vector<double> weights)
    : family_(family), param_(param), probs_(std::move(weights)) {
  if (probs_.empty()) throw InvalidArgument("distribution needs K >= 1 states");
  double total = 0.0;
  for (double w : probs_) {
    if (!(std::isfinite(w) && w >= 0.0)) {
      throw InvalidArgument("distribution weights must be finite and >= 0");
    }
    total += w;
  }
  if (!(total > 0.0)) throw InvalidArgument("distribution weights sum to 0");
  for (double& p : probs_) p /= total;
  cdf_.resize(probs_.size());
  std::partial_sum(probs_.begin(), probs_.end(), cdf_.begin());
}

SyntheticDistribution SyntheticDistribution::Zipf(size_t k, double exponent) {
  if (!(exponent >= 0.0 && std::isfinite(exponent))) {
    throw InvalidArgument("zipf exponent must be >= 0");
  }
  std::vector<double> w(k);
  for (size_t i = 0; i < k; ++i) {
    w[i] = 1.0 / std::pow(static_cast<double>(i + 1), exponent);
  }
  return SyntheticDistribution(Family::kZipf, exponent, std::move(w));
}

SyntheticDistribution SyntheticDistribution::Geometric(size_t k, double ratio) {
  if (!(ratio > 0.0 && ratio < 1.0)) {
    throw InvalidArgument("geometric ratio must be in (0,1)");
  }
  std::vector<double> w(k);
  double term = 1.0;
  for (size_t i = 0; i < k; ++i, term *= ratio) w[i] = term;
  return SyntheticDistribution(Family::kGeometric, ratio, std::move(w));
}

SyntheticDistribution SyntheticDistribution::Uniform(size_t k) {
  return SyntheticDistribution(Family::kUniform, 0.0, std::vector<double>(k, 1.0));
}

SyntheticDistribution SyntheticDistribution::Custom(std::vector<double> weights) {
  return SyntheticDistribution(Family::kCustom, 0.0, std::move(weights));
}

EmpiricalDistribution SyntheticDistribution::AsKnownTruth() const {
  std::map<StateKey, double> probs;
  for (size_t i = 0; i < probs_.size(); ++i) {
    probs.emplace(SimulatedState(i), probs_[i]);
  }
  return EmpiricalDistribution::KnownTruth(std::move(probs));
}

size_t SyntheticDistribution::Quantile(double u) const {
  auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  // Rounding can leave cdf_.back() slightly below 1; the draw then belongs to
  // the last state with positive mass.
  if (it == cdf_.end()) {
    size_t i = probs_.size() - 1;
    while (i > 0 && probs_[i] == 0.0) --i;
    return i;
  }
  return static_cast<size_t>(it - cdf_.begin());
}

std::string StateName(size_t index) { return "s" + std::to_string(index); }

StateKey SimulatedState(size_t index) {
  return StateKey(std::string(kSimulatedFactor), StateName(index));
}

size_t StateIndex(const StateKey& key) {
  auto v = key.value(kSimulatedFactor);
  if (key.size() != 1 || !v || v->size() < 2 || v->front() != 's') {
    throw InvalidArgument("'" + key.ToString() + "' is not a simulated state");
  }
  size_t index = 0;
  auto [ptr, ec] = std::from_chars(v->data() + 1, v->data() + v->size(), index);
  if (ec != std::errc() || ptr != v->data() + v->size()) {
    throw InvalidArgument("'" + key.ToString() + "' is not a simulated state");
  }
  return index;
}

std::vector<size_t> SampleIndices(const SyntheticDistribution& dist, uint64_t n,
                                  uint64_t seed) {
  Rng rng(seed);
  std::vector<size_t> out(n);
  for (auto& x : out) x = dist.Quantile(rng.Uniform());
  return out;
}

std::vector<StateKey> Sample(const SyntheticDistribution& dist, uint64_t n,
                             uint64_t seed) {
  std::vector<StateKey> out;
  out.reserve(n);
  for (size_t i : SampleIndices(dist, n, seed)) out.push_back(SimulatedState(i));
  return out;
}

CountTable TableFromIndices(std::span<const size_t> indices) {
  std::map<size_t, uint64_t> counts;
  for (size_t i : indices) ++counts[i];
  std::vector<std::pair<StateKey, uint64_t>> entries;
  entries.reserve(counts.size());
  for (const auto& [i, c] : counts) entries.emplace_back(SimulatedState(i), c);
  return CountTableFromCounts(entries, {std::string(kSimulatedFactor)});
}

double TrueBlindMass(const SyntheticDistribution& dist, const CountTable& table,
                     uint64_t tau) {
  if (tau == 0) throw InvalidArgument("support threshold tau must be at least 1");
  std::vector<uint64_t> counts(dist.k(), 0);
  for (const auto& [key, c] : table.counts()) {
    const size_t i = StateIndex(key);
    if (i >= dist.k()) {
      throw InvalidArgument("state '" + key.ToString() + "' is outside 0.." +
                            std::to_string(dist.k() - 1));
    }
    counts[i] = c;
  }
  double mass = 0.0;
  for (size_t i = 0; i < dist.k(); ++i) {
    if (counts[i] < tau) mass += dist.probs()[i];
  }
  return mass;
}

SyntheticDistribution MakeDistribution(const SweepCell& cell) {
  switch (cell.family) {
    case Family::kZipf:
      return SyntheticDistribution::Zipf(cell.k, cell.param);
    case Family::kGeometric:
      return SyntheticDistribution::Geometric(cell.k, cell.param);
    case Family::kUniform:
      return SyntheticDistribution::Uniform(cell.k);
    case Family::kCustom:
      return SyntheticDistribution::Custom(cell.weights);
  }
  throw InvalidArgument("unknown distribution family");
}

const ModeStats& CellResult::Mode(EstimatorMode mode) const {
  for (const auto& m : modes) {
    if (m.mode == mode) return m;
  }
  throw InvalidArgument("mode not present in sweep result");
}

SweepResult RunSweep(std::span<const SweepCell> cells, uint64_t trials,
                     uint64_t master_seed) {
  if (trials == 0) throw InvalidArgument("sweep needs at least one trial");
  SweepResult result;
  result.master_seed = master_seed;
  result.trials = trials;

  constexpr size_t kModes = std::size(kAllModes);
  for (size_t c = 0; c < cells.size(); ++c) {
    const SweepCell& cell = cells[c];
    if (cell.n == 0) throw InvalidArgument("sweep cell has n = 0");
    if (cell.tau == 0) throw InvalidArgument("sweep cell has tau = 0");
    const SyntheticDistribution dist = MakeDistribution(cell);

    std::vector<double> truth(trials);
    std::vector<std::vector<double>> estimates(kModes, std::vector<double>(trials));
    for (uint64_t t = 0; t < trials; ++t) {
      const auto indices = SampleIndices(dist, cell.n, DeriveSeed(master_seed, c, t));
      const CountTable table = TableFromIndices(indices);
      truth[t] = TrueBlindMass(dist, table, cell.tau);
      for (size_t m = 0; m < kModes; ++m) {
        estimates[m][t] = ComputeBlindSpotCurve(table, kAllModes[m], cell.tau)
                              .points.back()
                              .mass;
      }
      if (estimates[0][t] > estimates[1][t]) {
        throw InvariantViolation("plugin estimate exceeds plugin+unseen");
      }
    }

    CellResult cr;
    cr.cell = cell;
    cr.true_mass = Summarize(truth);
    for (size_t m = 0; m < kModes; ++m) {
      ModeStats ms;
      ms.mode = kAllModes[m];
      ms.estimate = Summarize(estimates[m]);
      double abs_err = 0.0;
      for (uint64_t t = 0; t < trials; ++t) {
        abs_err += std::abs(estimates[m][t] - truth[t]);
      }
      ms.mean_abs_error = abs_err / static_cast<double>(trials);
      cr.modes.push_back(ms);
    }
    result.cells.push_back(std::move(cr));
  }
  return result;
}

}  // namespace blindspot
