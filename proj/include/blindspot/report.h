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

#ifndef BLINDSPOT_REPORT_H_
#define BLINDSPOT_REPORT_H_

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "blindspot/abstraction.h"
#include "blindspot/accuracy.h"
#include "blindspot/count_table.h"
#include "blindspot/estimators.h"
#include "blindspot/ingest.h"
#include "blindspot/simulator.h"
#include "json.hpp"

namespace blindspot {

inline constexpr std::string_view kToolVersion = "0.1.0";

using Json = nlohmann::ordered_json;

// Observed states with their counts, most supported first (ties by key).
std::vector<std::pair<StateKey, uint64_t>> SupportHistogram(
    const CountTable& table);

struct ReportOptions {
  std::string dataset_id;
  uint64_t tau_max = 20;
  std::vector<EstimatorMode> modes{std::begin(kAllModes), std::end(kAllModes)};
  std::vector<uint64_t> decompose_taus;
  std::optional<size_t> top_k;
  double assumed_blind_accuracy = 0.0;
  // Mode whose curve feeds the ceiling.
  EstimatorMode ceiling_mode = EstimatorMode::kPlugin;
  std::optional<AbstractionConfig> abstraction;
};

struct ReportBundle {
  std::string dataset_id;
  std::optional<AbstractionConfig> abstraction;
  std::vector<std::string> schema;
  uint64_t n = 0;
  uint64_t k_eff = 0;
  std::vector<BlindSpotCurve> curves;
  std::vector<BlindnessDecomposition> decompositions;
  EstimatorMode ceiling_mode = EstimatorMode::kPlugin;
  CeilingCurve ceiling;
  std::vector<std::pair<StateKey, uint64_t>> histogram;
};

ReportBundle BuildReport(const CountTable& table, const ReportOptions& options);

// Throws InvariantViolation when the bundle is internally inconsistent
// (curve bounds or monotonicity, decomposition totals vs the plug-in curve,
// K_eff vs histogram rows, ceiling formula).
void CheckReport(const ReportBundle& bundle);

// Field order is fixed: tool, version, dataset, schema, n, k_eff,
// abstraction, curves, decompositions, ceiling, histogram. Doubles are
// written as shortest round-trip decimals.
Json ReportToJson(const ReportBundle& bundle);

// Display CSVs; reals with 6 decimals.
void WriteCurvesCsv(std::ostream& out, std::span<const BlindSpotCurve> curves);
void WriteDecompositionCsv(std::ostream& out,
                           std::span<const DecompositionEntry> entries);
void WriteCeilingCsv(std::ostream& out, const CeilingCurve& ceiling);
void WriteHistogramCsv(std::ostream& out,
                       std::span<const std::pair<StateKey, uint64_t>> histogram);

// Zero-contribution rows for observed states with N(x) >= tau, in key order.
std::vector<DecompositionEntry> SupportedEntries(
    const CountTable& table, const EmpiricalDistribution& dist,
    const RiskWeights& weights, uint64_t tau);

struct AccuracyRow {
  std::string label;
  uint64_t successes = 0;
  uint64_t trials = 0;
};

// CSV with header class,successes,trials. Throws DataError on malformed rows
// or successes > trials.
std::vector<AccuracyRow> ReadAccuracyRows(std::istream& in, std::string_view source);
void WriteWilsonCsv(std::ostream& out, std::span<const AccuracyRow> rows,
                    double confidence);

void WriteSweepCsv(std::ostream& out, const SweepResult& result);
Json SweepToJson(const SweepResult& result);

Json SummaryToJson(const IngestionSummary& summary);

// "%.6f".
std::string FormatFixed(double x);

}  // namespace blindspot

#endif  // BLINDSPOT_REPORT_H_
