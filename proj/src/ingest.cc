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

#include "blindspot/ingest.h"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "blindspot/csv.h"
#include "blindspot/errors.h"

namespace blindspot {
namespace {

namespace fs = std::filesystem;

constexpr size_t kPamap2Columns = 54;
constexpr size_t kPamap2ImuWidth = 17;

std::string Where(std::string_view source, size_t line) {
  return std::string(source) + ":" + std::to_string(line);
}

std::ifstream OpenOrThrow(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  return in;
}

// Parses a finite or NaN double; "NaN"/"nan" and empty cells become NaN.
bool ParseDouble(std::string_view token, double& out) {
  if (token.empty() || token == "NaN" || token == "nan" || token == "NAN") {
    out = std::numeric_limits<double>::quiet_NaN();
    return true;
  }
  if (token.front() == '+') token.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), out);
  return ec == std::errc() && ptr == token.data() + token.size() &&
         !std::isinf(out);
}

bool ParseUint(std::string_view token, uint64_t& out) {
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), out);
  return !token.empty() && ec == std::errc() &&
         ptr == token.data() + token.size();
}

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

// Carries the last finite value of each sensor channel forward inside one
// contiguous segment.
class ForwardFill {
 public:
  void Reset() { has_.fill(false); }

  // Fills NaNs in place; returns false if a channel is still missing.
  bool Apply(std::array<double, 6>& values) {
    bool complete = true;
    for (size_t i = 0; i < values.size(); ++i) {
      if (std::isnan(values[i])) {
        if (has_[i]) {
          values[i] = last_[i];
        } else {
          complete = false;
        }
      } else {
        last_[i] = values[i];
        has_[i] = true;
      }
    }
    return complete;
  }

 private:
  std::array<double, 6> last_{};
  std::array<bool, 6> has_{};
};

// Tracks segment boundaries and appends filled rows to the stream.
class SegmentBuilder {
 public:
  explicit SegmentBuilder(ImuStream& stream) : stream_(stream) {}

  void Break() { open_ = false; }

  void Add(double timestamp, const std::string& label,
           std::array<double, 6> values) {
    if (!open_ || label != label_) {
      fill_.Reset();
      label_ = label;
      open_ = true;
    }
    if (!fill_.Apply(values)) {
      stream_.summary.Drop(drop_reason::kNanAfterImpute);
      return;
    }
    ImuSample s;
    s.timestamp = timestamp;
    s.label = label;
    s.acc = {values[0], values[1], values[2]};
    s.gyro = {values[3], values[4], values[5]};
    stream_.samples.push_back(std::move(s));
    ++stream_.summary.rows_kept;
  }

 private:
  ImuStream& stream_;
  ForwardFill fill_;
  std::string label_;
  bool open_ = false;
};

size_t PlacementOffset(Placement placement) {
  switch (placement) {
    case Placement::kHand:
      return 3;
    case Placement::kChest:
      return 3 + kPamap2ImuWidth;
    case Placement::kAnkle:
      return 3 + 2 * kPamap2ImuWidth;
  }
  return 3;
}

// subject<id>.dat -> id, or -1.
int SubjectId(const fs::path& path) {
  const std::string stem = path.stem().string();
  constexpr std::string_view kPrefix = "subject";
  if (path.extension() != ".dat" || !stem.starts_with(kPrefix)) return -1;
  uint64_t id = 0;
  if (!ParseUint(std::string_view(stem).substr(kPrefix.size()), id)) return -1;
  return static_cast<int>(id);
}

std::map<std::string, size_t, std::less<>> HeaderIndex(
    const std::vector<std::string>& header) {
  std::map<std::string, size_t, std::less<>> index;
  for (size_t i = 0; i < header.size(); ++i) {
    index.emplace(std::string(Trim(header[i])), i);
  }
  return index;
}

size_t RequireColumn(const std::map<std::string, size_t, std::less<>>& index,
                     std::string_view name, std::string_view source) {
  auto it = index.find(name);
  if (it == index.end()) {
    throw DataError(std::string(source) + ": missing column '" +
                    std::string(name) + "'");
  }
  return it->second;
}

std::vector<std::string> ReadHeader(CsvReader& reader, std::string_view source) {
  auto header = reader.Next();
  if (!header) throw DataError(std::string(source) + ": missing header row");
  return *header;
}

void CheckWidth(const std::vector<std::string>& row, size_t width,
                std::string_view source, size_t line) {
  if (row.size() != width) {
    throw DataError(Where(source, line) + ": expected " + std::to_string(width) +
                    " columns, found " + std::to_string(row.size()));
  }
}

bool IsBlankRow(const std::vector<std::string>& row) {
  return row.size() == 1 && Trim(row[0]).empty();
}

StateKey MakeKey(std::vector<StateKey::Factor> factors, std::string_view source,
                 size_t line) {
  try {
    return StateKey(std::move(factors));
  } catch (const InvalidArgument& e) {
    throw DataError(Where(source, line) + ": " + e.what());
  }
}

}  // namespace

uint64_t IngestionSummary::rows_dropped() const {
  uint64_t total = 0;
  for (const auto& [reason, rows] : dropped) total += rows;
  return total;
}

void IngestionSummary::Drop(std::string_view reason, uint64_t rows) {
  if (rows == 0) return;
  auto it = dropped.find(reason);
  if (it == dropped.end()) {
    dropped.emplace(std::string(reason), rows);
  } else {
    it->second += rows;
  }
}

void IngestionSummary::Check() const {
  if (rows_read != rows_kept + rows_dropped()) {
    throw InvariantViolation(
        "ingestion tallies do not add up: read " + std::to_string(rows_read) +
        ", kept " + std::to_string(rows_kept) + ", dropped " +
        std::to_string(rows_dropped()));
  }
}

Placement ParsePlacement(std::string_view name) {
  if (name == "hand") return Placement::kHand;
  if (name == "chest") return Placement::kChest;
  if (name == "ankle") return Placement::kAnkle;
  throw InvalidArgument("unknown placement '" + std::string(name) + "'");
}

void ParsePamap2(std::istream& in, std::string_view source, Placement placement,
                 ImuStream& stream) {
  stream.sample_rate_hz = kPamap2RateHz;
  stream.summary.unit = "windows";
  stream.summary.sources.emplace_back(source);
  const size_t offset = PlacementOffset(placement);
  // Within an IMU block: temperature, acc16 (3), acc6 (3), gyro (3), ...
  const std::array<size_t, 6> channels = {offset + 1, offset + 2, offset + 3,
                                          offset + 7, offset + 8, offset + 9};
  SegmentBuilder segments(stream);
  std::string line;
  std::vector<double> values(kPamap2Columns);
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (Trim(line).empty()) continue;
    std::istringstream tokens(line);
    std::string token;
    size_t col = 0;
    while (tokens >> token) {
      if (col < kPamap2Columns && !ParseDouble(token, values[col])) {
        throw DataError(Where(source, line_no) + ": non-numeric token '" +
                        token + "'");
      }
      ++col;
    }
    if (col != kPamap2Columns) {
      throw DataError(Where(source, line_no) + ": expected " +
                      std::to_string(kPamap2Columns) + " columns, found " +
                      std::to_string(col));
    }
    ++stream.summary.rows_read;
    const double activity = values[1];
    if (std::isnan(values[0]) || std::isnan(activity) ||
        activity != std::floor(activity) || activity < 0) {
      throw DataError(Where(source, line_no) +
                      ": timestamp and activityID must be present");
    }
    if (activity == 0) {
      stream.summary.Drop(drop_reason::kTransientActivity);
      segments.Break();
      continue;
    }
    std::array<double, 6> sensors;
    for (size_t i = 0; i < channels.size(); ++i) sensors[i] = values[channels[i]];
    segments.Add(values[0], std::to_string(static_cast<int>(activity)), sensors);
  }
}

ImuStream IngestPamap2(std::span<const fs::path> inputs,
                       std::span<const int> subjects, Placement placement) {
  for (int id : subjects) {
    if (id < 101 || id > 109) {
      throw DataError("unknown PAMAP2 subject id " + std::to_string(id));
    }
  }
  std::map<int, fs::path> files;
  auto consider = [&](const fs::path& p) {
    const int id = SubjectId(p);
    if (id < 0) return;
    if (!files.emplace(id, p).second) {
      throw DataError("subject " + std::to_string(id) + " appears twice: " +
                      files[id].string() + ", " + p.string());
    }
  };
  for (const auto& input : inputs) {
    if (fs::is_directory(input)) {
      std::vector<fs::path> entries;
      for (const auto& e : fs::directory_iterator(input)) entries.push_back(e.path());
      std::sort(entries.begin(), entries.end());
      for (const auto& e : entries) consider(e);
    } else if (fs::exists(input)) {
      if (SubjectId(input) < 0) {
        throw DataError(input.string() + " is not named subject<id>.dat");
      }
      consider(input);
    } else {
      throw DataError("cannot open " + input.string());
    }
  }
  std::vector<int> wanted(subjects.begin(), subjects.end());
  if (wanted.empty()) {
    for (const auto& [id, path] : files) wanted.push_back(id);
  }
  if (wanted.empty()) throw DataError("no PAMAP2 subject files found");

  ImuStream stream;
  stream.sample_rate_hz = kPamap2RateHz;
  for (int id : wanted) {
    auto it = files.find(id);
    if (it == files.end()) {
      throw DataError("no data file for PAMAP2 subject " + std::to_string(id));
    }
    auto in = OpenOrThrow(it->second);
    ParsePamap2(in, it->second.string(), placement, stream);
  }
  return stream;
}

ImuStream IngestImuCsv(std::istream& in, std::string_view source,
                       double sample_rate_hz) {
  if (!(sample_rate_hz > 0.0)) throw InvalidArgument("sample rate must be > 0");
  ImuStream stream;
  stream.sample_rate_hz = sample_rate_hz;
  stream.summary.unit = "windows";
  stream.summary.sources.emplace_back(source);
  CsvReader reader(in);
  const auto header = ReadHeader(reader, source);
  const auto index = HeaderIndex(header);
  const size_t ts_col = RequireColumn(index, "timestamp", source);
  const size_t label_col = RequireColumn(index, "label", source);
  std::array<size_t, 6> channels;
  const std::array<std::string_view, 6> names = {"ax", "ay", "az", "gx", "gy", "gz"};
  for (size_t i = 0; i < names.size(); ++i) {
    channels[i] = RequireColumn(index, names[i], source);
  }

  SegmentBuilder segments(stream);
  while (auto row = reader.Next()) {
    if (IsBlankRow(*row)) continue;
    CheckWidth(*row, header.size(), source, reader.line());
    ++stream.summary.rows_read;
    const std::string label(Trim((*row)[label_col]));
    if (label.empty()) {
      stream.summary.Drop(drop_reason::kMissingLabel);
      segments.Break();
      continue;
    }
    if (!IsValidFactorValue(label)) {
      throw DataError(Where(source, reader.line()) + ": invalid label");
    }
    double ts;
    if (!ParseDouble(Trim((*row)[ts_col]), ts) || std::isnan(ts)) {
      throw DataError(Where(source, reader.line()) + ": bad timestamp");
    }
    std::array<double, 6> sensors;
    for (size_t i = 0; i < channels.size(); ++i) {
      if (!ParseDouble(Trim((*row)[channels[i]]), sensors[i])) {
        throw DataError(Where(source, reader.line()) + ": non-numeric value '" +
                        (*row)[channels[i]] + "'");
      }
    }
    segments.Add(ts, label, sensors);
  }
  return stream;
}

ImuStream IngestImuCsv(const fs::path& path, double sample_rate_hz) {
  auto in = OpenOrThrow(path);
  return IngestImuCsv(in, path.string(), sample_rate_hz);
}

IngestedSamples IngestSamplesCsv(std::istream& in, std::string_view source,
                                 std::span<const std::string> key_columns) {
  ValidateSchema(key_columns);
  IngestedSamples out;
  out.schema.assign(key_columns.begin(), key_columns.end());
  out.summary.sources.emplace_back(source);
  CsvReader reader(in);
  const auto header = ReadHeader(reader, source);
  const auto index = HeaderIndex(header);
  std::vector<size_t> cols;
  for (const auto& name : key_columns) cols.push_back(RequireColumn(index, name, source));

  while (auto row = reader.Next()) {
    if (IsBlankRow(*row)) continue;
    CheckWidth(*row, header.size(), source, reader.line());
    ++out.summary.rows_read;
    std::vector<StateKey::Factor> factors;
    bool empty = false;
    for (size_t i = 0; i < cols.size(); ++i) {
      std::string value(Trim((*row)[cols[i]]));
      empty |= value.empty();
      factors.emplace_back(key_columns[i], std::move(value));
    }
    if (empty) {
      out.summary.Drop(drop_reason::kMissingLabel);
      continue;
    }
    out.samples.push_back(MakeKey(std::move(factors), source, reader.line()));
    ++out.summary.rows_kept;
  }
  out.summary.emitted = out.samples.size();
  return out;
}

IngestedSamples IngestSamplesCsv(const fs::path& path,
                                 std::span<const std::string> key_columns) {
  auto in = OpenOrThrow(path);
  return IngestSamplesCsv(in, path.string(), key_columns);
}

IngestedSamples IngestDiagnoses(std::istream& in, std::string_view source,
                                const DiagnosisColumns& columns) {
  IngestedSamples out;
  out.schema = {std::string(kIcdFactor)};
  out.summary.sources.emplace_back(source);
  CsvReader reader(in);
  const auto header = ReadHeader(reader, source);
  const auto index = HeaderIndex(header);
  const size_t adm_col = RequireColumn(index, columns.admission, source);
  const size_t seq_col = RequireColumn(index, columns.seq_num, source);
  const size_t code_col = RequireColumn(index, columns.icd_code, source);

  std::vector<Admission> admissions;
  std::map<std::string, size_t, std::less<>> position;
  while (auto row = reader.Next()) {
    if (IsBlankRow(*row)) continue;
    CheckWidth(*row, header.size(), source, reader.line());
    ++out.summary.rows_read;
    const std::string id(Trim((*row)[adm_col]));
    uint64_t seq = 0;
    if (id.empty() || !ParseUint(Trim((*row)[seq_col]), seq)) {
      throw DataError(Where(source, reader.line()) +
                      ": admission id and numeric seq_num required");
    }
    auto [it, inserted] = position.try_emplace(id, admissions.size());
    if (inserted) admissions.push_back({id, {}});
    admissions[it->second].diagnoses.push_back(
        {static_cast<int>(seq), std::string(Trim((*row)[code_col]))});
  }

  for (const auto& adm : admissions) {
    const auto state = IcdPrefixState(adm);
    const auto rows = static_cast<uint64_t>(adm.diagnoses.size());
    if (!state || state->factors()[0].second.empty()) {
      out.summary.Drop(drop_reason::kNoPrimaryDiagnosis, rows);
      ++out.summary.admissions_skipped;
      continue;
    }
    out.samples.push_back(*state);
    ++out.summary.rows_kept;
    uint64_t primaries = 0;
    for (const auto& d : adm.diagnoses) primaries += d.seq_num == 1;
    out.summary.Drop(drop_reason::kDuplicatePrimary, primaries - 1);
    out.summary.Drop(drop_reason::kNonPrimaryDiagnosis, rows - primaries);
  }
  out.summary.emitted = out.samples.size();
  return out;
}

IngestedSamples IngestDiagnoses(const fs::path& path,
                                const DiagnosisColumns& columns) {
  auto in = OpenOrThrow(path);
  return IngestDiagnoses(in, path.string(), columns);
}

void WriteSamples(std::ostream& out, std::span<const std::string> schema,
                  std::span<const StateKey> samples) {
  ValidateSchema(schema);
  std::vector<std::string> fields;
  for (const auto& name : schema) fields.push_back("factor:" + name);
  out << CsvLine(fields) << '\n';
  for (const auto& key : samples) {
    if (!key.Conforms(schema)) {
      throw InvalidArgument("sample '" + key.ToString() +
                            "' does not conform to the schema");
    }
    fields.clear();
    for (const auto& f : key.factors()) fields.push_back(f.second);
    out << CsvLine(fields) << '\n';
  }
}

IngestedSamples ReadSamples(std::istream& in, std::string_view source) {
  IngestedSamples out;
  out.summary.sources.emplace_back(source);
  CsvReader reader(in);
  const auto header = ReadHeader(reader, source);
  for (const auto& h : header) {
    if (!h.starts_with("factor:")) {
      throw DataError(std::string(source) + ": header column '" + h +
                      "' is not of the form factor:<name>");
    }
    out.schema.push_back(h.substr(7));
  }
  try {
    ValidateSchema(out.schema);
  } catch (const InvalidArgument& e) {
    throw DataError(std::string(source) + ": " + e.what());
  }
  while (auto row = reader.Next()) {
    if (IsBlankRow(*row) && header.size() > 1) continue;
    CheckWidth(*row, header.size(), source, reader.line());
    ++out.summary.rows_read;
    std::vector<StateKey::Factor> factors;
    for (size_t i = 0; i < row->size(); ++i) {
      if ((*row)[i].empty()) {
        throw DataError(Where(source, reader.line()) + ": empty factor value");
      }
      factors.emplace_back(out.schema[i], (*row)[i]);
    }
    out.samples.push_back(MakeKey(std::move(factors), source, reader.line()));
    ++out.summary.rows_kept;
  }
  out.summary.emitted = out.samples.size();
  return out;
}

IngestedSamples ReadSamples(const fs::path& path) {
  auto in = OpenOrThrow(path);
  return ReadSamples(in, path.string());
}

CountTable ReadCounts(std::istream& in, std::string_view source) {
  CsvReader reader(in);
  const auto header = ReadHeader(reader, source);
  if (header.size() < 2 || Trim(header.back()) != "count") {
    throw DataError(std::string(source) +
                    ": expected factor columns followed by a 'count' column");
  }
  std::vector<std::string> schema;
  for (size_t i = 0; i + 1 < header.size(); ++i) {
    std::string name(Trim(header[i]));
    if (name.starts_with("factor:")) name = name.substr(7);
    schema.push_back(std::move(name));
  }
  std::vector<std::pair<StateKey, uint64_t>> entries;
  while (auto row = reader.Next()) {
    if (IsBlankRow(*row)) continue;
    CheckWidth(*row, header.size(), source, reader.line());
    std::vector<StateKey::Factor> factors;
    for (size_t i = 0; i < schema.size(); ++i) {
      std::string value(Trim((*row)[i]));
      if (value.empty()) {
        throw DataError(Where(source, reader.line()) + ": empty factor value");
      }
      factors.emplace_back(schema[i], std::move(value));
    }
    uint64_t count = 0;
    if (!ParseUint(Trim(row->back()), count)) {
      throw DataError(Where(source, reader.line()) + ": count '" + row->back() +
                      "' is not a nonnegative integer");
    }
    entries.emplace_back(MakeKey(std::move(factors), source, reader.line()), count);
  }
  try {
    return CountTableFromCounts(entries, std::move(schema));
  } catch (const InvalidArgument& e) {
    throw DataError(std::string(source) + ": " + e.what());
  }
}

CountTable ReadCounts(const fs::path& path) {
  auto in = OpenOrThrow(path);
  return ReadCounts(in, path.string());
}

RiskWeights ReadRiskWeights(std::istream& in, std::string_view source,
                            std::span<const std::string> schema) {
  std::map<StateKey, double> weights;
  double default_weight = 1.0;
  bool saw_default = false;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (Trim(line).empty() || line.front() == '#') continue;
    const size_t tab = line.rfind('\t');
    if (tab == std::string::npos) {
      throw DataError(Where(source, line_no) + ": expected <state>\\t<weight>");
    }
    double w;
    const std::string_view weight_text = Trim(std::string_view(line).substr(tab + 1));
    if (!ParseDouble(weight_text, w) || std::isnan(w)) {
      throw DataError(Where(source, line_no) + ": weight '" +
                      std::string(weight_text) + "' is not a number");
    }
    if (w < 0) {
      throw DataError(Where(source, line_no) + ": negative risk weight");
    }
    const std::string state = line.substr(0, tab);
    if (state == "*") {
      if (saw_default) throw DataError(Where(source, line_no) + ": second '*' row");
      saw_default = true;
      default_weight = w;
      continue;
    }
    try {
      if (!weights.emplace(StateKey::Parse(state, schema), w).second) {
        throw DataError(Where(source, line_no) + ": duplicate state '" + state + "'");
      }
    } catch (const InvalidArgument& e) {
      throw DataError(Where(source, line_no) + ": " + e.what());
    }
  }
  return RiskWeights(std::move(weights), default_weight);
}

RiskWeights ReadRiskWeights(const fs::path& path,
                            std::span<const std::string> schema) {
  auto in = OpenOrThrow(path);
  return ReadRiskWeights(in, path.string(), schema);
}

}  // namespace blindspot
