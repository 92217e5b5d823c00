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

#include "blindspot/config.h"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "blindspot/errors.h"

namespace blindspot {
namespace {

std::string_view Trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

[[noreturn]] void Fail(const KeyValue& kv, const std::string& what) {
  throw DataError("line " + std::to_string(kv.line) + " (" + kv.key + "): " + what);
}

std::vector<std::string_view> Split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  size_t begin = 0;
  while (true) {
    size_t end = s.find(sep, begin);
    parts.push_back(Trim(s.substr(begin, end - begin)));
    if (end == std::string_view::npos) break;
    begin = end + 1;
  }
  return parts;
}

template <typename T>
T ParseNumber(std::string_view text, const KeyValue& kv) {
  T value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    Fail(kv, "'" + std::string(text) + "' is not a valid number");
  }
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(value)) Fail(kv, "value must be finite");
  }
  return value;
}

std::vector<double> ParseList(std::string_view text, char sep, const KeyValue& kv) {
  std::vector<double> out;
  for (auto part : Split(text, sep)) out.push_back(ParseNumber<double>(part, kv));
  return out;
}

std::string FormatDouble(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string JoinDoubles(const std::vector<double>& xs) {
  std::string out;
  for (size_t i = 0; i < xs.size(); ++i) {
    if (i > 0) out += ',';
    out += FormatDouble(xs[i]);
  }
  return out;
}

}  // namespace

std::vector<KeyValue> ParseKeyValues(std::istream& in) {
  std::vector<KeyValue> out;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view s = Trim(line);
    if (s.empty() || s.front() == '#') continue;
    const size_t eq = s.find('=');
    if (eq == std::string_view::npos) {
      throw DataError("line " + std::to_string(line_no) + ": expected key = value");
    }
    std::string key(Trim(s.substr(0, eq)));
    if (key.empty()) {
      throw DataError("line " + std::to_string(line_no) + ": empty key");
    }
    out.push_back({std::move(key), std::string(Trim(s.substr(eq + 1))), line_no});
  }
  return out;
}

std::vector<KeyValue> ReadKeyValues(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  try {
    return ParseKeyValues(in);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

AbstractionConfig ParseAbstractionConfig(const std::vector<KeyValue>& kv) {
  AbstractionConfig config;
  for (const auto& e : kv) {
    if (e.key != "preset") continue;
    try {
      config = AbstractionConfig::Preset(e.value);
    } catch (const InvalidArgument& err) {
      Fail(e, err.what());
    }
  }
  for (const auto& e : kv) {
    try {
      if (e.key == "preset") {
        continue;
      } else if (e.key == "factors") {
        config.factors.clear();
        for (auto name : Split(e.value, ',')) config.factors.push_back(ParseFactor(name));
      } else if (e.key == "tilt_bins") {
        config.tilt_bins = ParseNumber<int>(e.value, e);
      } else if (e.key == "energy_bins") {
        config.energy_bins = ParseNumber<int>(e.value, e);
      } else if (e.key == "rate_bins") {
        config.rate_bins = ParseNumber<int>(e.value, e);
      } else if (e.key == "energy_edges") {
        config.energy_edges = ParseList(e.value, ',', e);
      } else if (e.key == "rate_edges") {
        config.rate_edges = ParseList(e.value, ',', e);
      } else if (e.key == "refinement_tag") {
        config.refinement_tag = e.value;
      } else {
        Fail(e, "unknown abstraction key");
      }
    } catch (const InvalidArgument& err) {
      Fail(e, err.what());
    }
  }
  try {
    config.Validate();
  } catch (const InvalidArgument& err) {
    throw DataError(std::string("abstraction config: ") + err.what());
  }
  return config;
}

std::string FormatAbstractionConfig(const AbstractionConfig& config) {
  std::ostringstream out;
  out << "refinement_tag = " << config.refinement_tag << '\n';
  out << "factors = ";
  for (size_t i = 0; i < config.factors.size(); ++i) {
    if (i > 0) out << ',';
    out << FactorName(config.factors[i]);
  }
  out << '\n';
  out << "tilt_bins = " << config.tilt_bins << '\n';
  out << "energy_bins = " << config.energy_bins << '\n';
  out << "rate_bins = " << config.rate_bins << '\n';
  if (!config.energy_edges.empty()) {
    out << "energy_edges = " << JoinDoubles(config.energy_edges) << '\n';
  }
  if (!config.rate_edges.empty()) {
    out << "rate_edges = " << JoinDoubles(config.rate_edges) << '\n';
  }
  return out.str();
}

SweepSpec ParseSweepSpec(const std::vector<KeyValue>& kv) {
  SweepSpec spec;
  for (const auto& e : kv) {
    if (e.key == "trials") {
      spec.trials = ParseNumber<uint64_t>(e.value, e);
      if (spec.trials == 0) Fail(e, "trials must be >= 1");
    } else if (e.key == "seed") {
      spec.seed = ParseNumber<uint64_t>(e.value, e);
    } else if (e.key == "cell") {
      std::istringstream tokens(e.value);
      std::string family;
      tokens >> family;
      SweepCell cell;
      try {
        cell.family = ParseFamily(family);
      } catch (const InvalidArgument& err) {
        Fail(e, err.what());
      }
      bool has_k = false, has_n = false, has_param = false;
      std::vector<uint64_t> taus;
      std::string token;
      while (tokens >> token) {
        const size_t eq = token.find('=');
        if (eq == std::string::npos) Fail(e, "expected name=value, got '" + token + "'");
        const std::string_view name = std::string_view(token).substr(0, eq);
        const std::string_view value = std::string_view(token).substr(eq + 1);
        if (name == "K") {
          cell.k = ParseNumber<size_t>(value, e);
          has_k = true;
        } else if (name == "n") {
          cell.n = ParseNumber<uint64_t>(value, e);
          has_n = true;
        } else if (name == "tau") {
          for (auto t : Split(value, ',')) taus.push_back(ParseNumber<uint64_t>(t, e));
        } else if (name == "s" || name == "ratio") {
          cell.param = ParseNumber<double>(value, e);
          has_param = true;
        } else if (name == "weights") {
          cell.weights = ParseList(value, ';', e);
        } else {
          Fail(e, "unknown cell parameter '" + std::string(name) + "'");
        }
      }
      if (cell.family == Family::kCustom) {
        if (cell.weights.empty()) Fail(e, "custom cell needs weights=");
        cell.k = cell.weights.size();
        has_k = true;
      }
      if (!has_k || cell.k == 0) Fail(e, "cell needs K >= 1");
      if (!has_n || cell.n == 0) Fail(e, "cell needs n >= 1");
      if (taus.empty()) Fail(e, "cell needs tau=");
      if ((cell.family == Family::kZipf || cell.family == Family::kGeometric) &&
          !has_param) {
        Fail(e, "zipf cells need s=, geometric cells need ratio=");
      }
      try {
        MakeDistribution(cell);
      } catch (const InvalidArgument& err) {
        Fail(e, err.what());
      }
      for (uint64_t t : taus) {
        if (t == 0) Fail(e, "tau must be >= 1");
        cell.tau = t;
        spec.cells.push_back(cell);
      }
    } else {
      Fail(e, "unknown sweep key");
    }
  }
  if (spec.cells.empty()) throw DataError("sweep spec defines no cells");
  return spec;
}

}  // namespace blindspot
