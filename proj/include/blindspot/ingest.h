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

#ifndef BLINDSPOT_INGEST_H_
#define BLINDSPOT_INGEST_H_

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "blindspot/abstraction.h"
#include "blindspot/count_table.h"
#include "blindspot/estimators.h"
#include "blindspot/state_key.h"

namespace blindspot {

namespace drop_reason {
inline constexpr std::string_view kMissingLabel = "missing-label";
inline constexpr std::string_view kNanAfterImpute = "nan-after-impute";
inline constexpr std::string_view kTransientActivity = "transient-activity";
inline constexpr std::string_view kNoPrimaryDiagnosis = "no-seq1-diagnosis";
inline constexpr std::string_view kNonPrimaryDiagnosis = "non-primary-diagnosis";
inline constexpr std::string_view kDuplicatePrimary = "duplicate-seq1";
}  // namespace drop_reason

// Row accounting for one ingestion run: rows_read = rows_kept + every drop
// tally.
struct IngestionSummary {
  uint64_t rows_read = 0;
  uint64_t rows_kept = 0;
  std::map<std::string, uint64_t, std::less<>> dropped;
  // "windows" for IMU sources, "samples" otherwise.
  std::string unit = "samples";
  uint64_t emitted = 0;
  // Admissions without a primary diagnosis (diagnoses source only).
  uint64_t admissions_skipped = 0;
  std::vector<std::string> sources;

  uint64_t rows_dropped() const;
  void Drop(std::string_view reason, uint64_t rows = 1);
  // Throws InvariantViolation when the row tallies do not add up.
  void Check() const;
};

enum class Placement { kHand, kChest, kAnkle };
Placement ParsePlacement(std::string_view name);

struct ImuStream {
  std::vector<ImuSample> samples;
  double sample_rate_hz = 0.0;
  IngestionSummary summary;
};

inline constexpr double kPamap2RateHz = 100.0;

// Reads PAMAP2 Protocol/Optional .dat files (54 space-separated columns).
// Keeps the timestamp, the activity id as label, and the chosen IMU's
// +-16 g accelerometer and gyroscope. Rows with activityID 0 are dropped.
// Missing sensor values are forward-filled within a contiguous activity
// segment; rows that stay incomplete are dropped.
//
// `inputs` may name files (subject<id>.dat) or directories holding them.
// When `subjects` is empty every subject file found is read. Throws
// DataError for malformed rows (with file and line), unknown or missing
// subjects.
ImuStream IngestPamap2(std::span<const std::filesystem::path> inputs,
                       std::span<const int> subjects, Placement placement);

// Parses one PAMAP2 file body; `source` names it in diagnostics.
void ParsePamap2(std::istream& in, std::string_view source, Placement placement,
                 ImuStream& stream);

// Generic IMU CSV with header timestamp,label,ax,ay,az,gx,gy,gz (extra
// columns ignored). Empty labels are dropped; NaN/empty sensor cells are
// handled as for PAMAP2.
ImuStream IngestImuCsv(std::istream& in, std::string_view source,
                       double sample_rate_hz);
ImuStream IngestImuCsv(const std::filesystem::path& path, double sample_rate_hz);

struct IngestedSamples {
  std::vector<std::string> schema;
  std::vector<StateKey> samples;
  IngestionSummary summary;
};

// One sample per data row, built from `key_columns` in the given order.
// Rows with an empty key cell are dropped.
IngestedSamples IngestSamplesCsv(std::istream& in, std::string_view source,
                                 std::span<const std::string> key_columns);
IngestedSamples IngestSamplesCsv(const std::filesystem::path& path,
                                 std::span<const std::string> key_columns);

struct DiagnosisColumns {
  std::string admission = "hadm_id";
  std::string seq_num = "seq_num";
  std::string icd_code = "icd_code";
};

// One "icd4" sample per admission (first-appearance order) from a
// diagnoses table.
IngestedSamples IngestDiagnoses(std::istream& in, std::string_view source,
                                const DiagnosisColumns& columns = {});
IngestedSamples IngestDiagnoses(const std::filesystem::path& path,
                                const DiagnosisColumns& columns = {});

// Canonical samples file: header of "factor:<name>" columns, one row per
// sample, LF line endings.
void WriteSamples(std::ostream& out, std::span<const std::string> schema,
                  std::span<const StateKey> samples);
IngestedSamples ReadSamples(std::istream& in, std::string_view source);
IngestedSamples ReadSamples(const std::filesystem::path& path);

// (state, count) table: factor columns (optionally "factor:"-prefixed)
// followed by a final "count" column.
CountTable ReadCounts(std::istream& in, std::string_view source);
CountTable ReadCounts(const std::filesystem::path& path);

// Lines of "<state><TAB><weight>" where <state> is StateKey::ToString();
// a "*" state sets the default weight (1 when absent). Blank lines and
// lines starting with '#' are ignored.
RiskWeights ReadRiskWeights(std::istream& in, std::string_view source,
                            std::span<const std::string> schema);
RiskWeights ReadRiskWeights(const std::filesystem::path& path,
                            std::span<const std::string> schema);

}  // namespace blindspot

#endif  // BLINDSPOT_INGEST_H_
