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

#include "blindspot/report.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>

#include "blindspot/csv.h"
#include "blindspot/errors.h"

namespace blindspot {
namespace {

constexpr double kConsistencyTol = 1e-12;

Json KeyToJson(const StateKey& key) {
  Json j = Json::object();
  for (const auto& [name, value] : key.factors()) j[name] = value;
  return j;
}

Json AbstractionToJson(const AbstractionConfig& c) {
  Json j;
  j["refinement_tag"] = c.refinement_tag;
  Json factors = Json::array();
  for (Factor f : c.factors) factors.push_back(std::string(FactorName(f)));
  j["factors"] = factors;
  j["tilt_bins"] = c.tilt_bins;
  j["energy_bins"] = c.energy_bins;
  j["rate_bins"] = c.rate_bins;
  j["energy_edges"] = c.energy_edges;
  j["rate_edges"] = c.rate_edges;
  return j;
}

Json MomentsToJson(const Moments& m) {
  Json j;
  j["mean"] = m.mean;
  j["stddev"] = m.stddev;
  return j;
}

}  // namespace

std::string FormatFixed(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", x);
  return buf;
}

std::vector<std::pair<StateKey, uint64_t>> SupportHistogram(
    const CountTable& table) {
  std::vector<std::pair<StateKey, uint64_t>> rows(table.counts().begin(),
                                                  table.counts().end());
  std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    return a.second > b.second;
  });
  return rows;
}

ReportBundle BuildReport(const CountTable& table, const ReportOptions& options) {
  ReportBundle b;
  b.dataset_id = options.dataset_id;
  b.abstraction = options.abstraction;
  b.schema = table.schema();
  b.n = table.n();
  b.k_eff = table.distinct();
  for (EstimatorMode mode : options.modes) {
    b.curves.push_back(ComputeBlindSpotCurve(table, mode, options.tau_max));
  }
  for (uint64_t tau : options.decompose_taus) {
    b.decompositions.push_back(DecomposeBlindness(table, tau, options.top_k));
  }
  b.ceiling_mode = options.ceiling_mode;
  b.ceiling = ComputeCeilingCurve(
      ComputeBlindSpotCurve(table, options.ceiling_mode, options.tau_max),
      options.assumed_blind_accuracy);
  b.histogram = SupportHistogram(table);
  return b;
}

void CheckReport(const ReportBundle& b) {
  auto fail = [](const std::string& what) {
    throw InvariantViolation("report: " + what);
  };
  if (b.k_eff != b.histogram.size()) fail("K_eff differs from histogram rows");
  uint64_t total = 0;
  for (const auto& [key, count] : b.histogram) total += count;
  if (total != b.n) fail("histogram counts do not sum to n");

  const BlindSpotCurve* plugin = nullptr;
  for (const auto& curve : b.curves) {
    if (curve.n != b.n || curve.k_observed != b.k_eff) fail("curve metadata mismatch");
    for (size_t i = 0; i < curve.points.size(); ++i) {
      const auto& p = curve.points[i];
      if (!(p.mass >= 0.0 && p.mass <= 1.0)) fail("curve mass outside [0,1]");
      if (i > 0 && (p.tau <= curve.points[i - 1].tau ||
                    p.mass < curve.points[i - 1].mass)) {
        fail("curve is not monotone");
      }
    }
    if (curve.mode == EstimatorMode::kPlugin) plugin = &curve;
  }
  for (const auto& d : b.decompositions) {
    for (const auto& e : d.entries) {
      if (e.count >= d.tau) fail("decomposition lists a supported state");
    }
    if (plugin && d.tau <= plugin->points.size() &&
        std::abs(d.total - plugin->At(d.tau)) > kConsistencyTol) {
      fail("decomposition total differs from the plug-in curve at tau " +
           std::to_string(d.tau));
    }
  }
  for (const auto& p : b.ceiling.points) {
    const double expect = (1.0 - p.blind_mass) +
                          p.blind_mass * b.ceiling.assumed_blind_accuracy;
    if (std::abs(p.ceiling - expect) > kConsistencyTol) fail("ceiling formula");
  }
}

Json ReportToJson(const ReportBundle& b) {
  Json j;
  j["tool"] = "blindspot";
  j["version"] = std::string(kToolVersion);
  j["dataset"] = b.dataset_id;
  j["schema"] = b.schema;
  j["n"] = b.n;
  j["k_eff"] = b.k_eff;
  j["abstraction"] = b.abstraction ? AbstractionToJson(*b.abstraction) : Json();

  Json curves = Json::array();
  for (const auto& c : b.curves) {
    Json cj;
    cj["mode"] = std::string(ModeName(c.mode));
    cj["extension"] = IsExtension(c.mode);
    cj["n"] = c.n;
    cj["k_observed"] = c.k_observed;
    Json pts = Json::array();
    for (const auto& p : c.points) pts.push_back({{"tau", p.tau}, {"mass", p.mass}});
    cj["points"] = pts;
    curves.push_back(cj);
  }
  j["curves"] = curves;

  Json decomps = Json::array();
  for (const auto& d : b.decompositions) {
    Json dj;
    dj["tau"] = d.tau;
    dj["total"] = d.total;
    Json entries = Json::array();
    for (const auto& e : d.entries) {
      Json ej;
      ej["state"] = KeyToJson(e.state);
      ej["count"] = e.count;
      ej["prob"] = e.prob;
      ej["weight"] = e.weight;
      ej["contribution"] = e.contribution;
      entries.push_back(ej);
    }
    dj["entries"] = entries;
    decomps.push_back(dj);
  }
  j["decompositions"] = decomps;

  Json ceiling;
  ceiling["mode"] = std::string(ModeName(b.ceiling_mode));
  ceiling["assumed_blind_accuracy"] = b.ceiling.assumed_blind_accuracy;
  Json cpts = Json::array();
  for (const auto& p : b.ceiling.points) {
    cpts.push_back({{"tau", p.tau}, {"blind_mass", p.blind_mass}, {"ceiling", p.ceiling}});
  }
  ceiling["points"] = cpts;
  j["ceiling"] = ceiling;

  Json hist = Json::array();
  for (const auto& [key, count] : b.histogram) {
    hist.push_back({{"state", KeyToJson(key)}, {"count", count}});
  }
  j["histogram"] = hist;
  return j;
}

void WriteCurvesCsv(std::ostream& out, std::span<const BlindSpotCurve> curves) {
  out << "tau,mode,mass\n";
  for (const auto& c : curves) {
    for (const auto& p : c.points) {
      out << p.tau << ',' << ModeName(c.mode) << ',' << FormatFixed(p.mass) << '\n';
    }
  }
}

void WriteDecompositionCsv(std::ostream& out,
                           std::span<const DecompositionEntry> entries) {
  out << "state,count,prob,weight,contribution\n";
  for (const auto& e : entries) {
    out << CsvEscape(e.state.ToString()) << ',' << e.count << ','
        << FormatFixed(e.prob) << ',' << FormatFixed(e.weight) << ','
        << FormatFixed(e.contribution) << '\n';
  }
}

void WriteCeilingCsv(std::ostream& out, const CeilingCurve& ceiling) {
  out << "tau,blind_mass,ceiling\n";
  for (const auto& p : ceiling.points) {
    out << p.tau << ',' << FormatFixed(p.blind_mass) << ','
        << FormatFixed(p.ceiling) << '\n';
  }
}

void WriteHistogramCsv(std::ostream& out,
                       std::span<const std::pair<StateKey, uint64_t>> histogram) {
  out << "state,count\n";
  for (const auto& [key, count] : histogram) {
    out << CsvEscape(key.ToString()) << ',' << count << '\n';
  }
}

std::vector<DecompositionEntry> SupportedEntries(
    const CountTable& table, const EmpiricalDistribution& dist,
    const RiskWeights& weights, uint64_t tau) {
  std::vector<DecompositionEntry> out;
  for (const auto& [key, count] : table.counts()) {
    if (count < tau) continue;
    out.push_back({key, count, dist.prob(key), weights.weight(key), 0.0});
  }
  return out;
}

std::vector<AccuracyRow> ReadAccuracyRows(std::istream& in,
                                          std::string_view source) {
  CsvReader reader(in);
  auto header = reader.Next();
  if (!header || header->size() != 3 || (*header)[0] != "class" ||
      (*header)[1] != "successes" || (*header)[2] != "trials") {
    throw DataError(std::string(source) +
                    ": expected header class,successes,trials");
  }
  std::vector<AccuracyRow> rows;
  while (auto row = reader.Next()) {
    const std::string where = std::string(source) + ":" + std::to_string(reader.line());
    if (row->size() != 3) throw DataError(where + ": expected 3 columns");
    AccuracyRow r;
    r.label = (*row)[0];
    auto parse = [&](const std::string& text, uint64_t& v) {
      auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
      if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
        throw DataError(where + ": '" + text + "' is not a nonnegative integer");
      }
    };
    parse((*row)[1], r.successes);
    parse((*row)[2], r.trials);
    if (r.trials == 0 || r.successes > r.trials) {
      throw DataError(where + ": need 0 <= successes <= trials and trials >= 1");
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

void WriteWilsonCsv(std::ostream& out, std::span<const AccuracyRow> rows,
                    double confidence) {
  out << "class,successes,trials,accuracy,lower,upper\n";
  for (const auto& r : rows) {
    const Interval ci = WilsonInterval(r.successes, r.trials, confidence);
    out << CsvEscape(r.label) << ',' << r.successes << ',' << r.trials << ','
        << FormatFixed(static_cast<double>(r.successes) / static_cast<double>(r.trials))
        << ',' << FormatFixed(ci.lower) << ',' << FormatFixed(ci.upper) << '\n';
  }
}

void WriteSweepCsv(std::ostream& out, const SweepResult& result) {
  out << "family,param,K,n,tau,trials,true_mean,true_stddev";
  for (EstimatorMode m : kAllModes) {
    out << ',' << ModeName(m) << "_mean," << ModeName(m) << "_stddev,"
        << ModeName(m) << "_mae";
  }
  out << '\n';
  for (const auto& c : result.cells) {
    out << FamilyName(c.cell.family) << ',' << FormatFixed(c.cell.param) << ','
        << c.cell.k << ',' << c.cell.n << ',' << c.cell.tau << ','
        << result.trials << ',' << FormatFixed(c.true_mass.mean) << ','
        << FormatFixed(c.true_mass.stddev);
    for (EstimatorMode m : kAllModes) {
      const ModeStats& s = c.Mode(m);
      out << ',' << FormatFixed(s.estimate.mean) << ','
          << FormatFixed(s.estimate.stddev) << ',' << FormatFixed(s.mean_abs_error);
    }
    out << '\n';
  }
}

Json SweepToJson(const SweepResult& result) {
  Json j;
  j["tool"] = "blindspot";
  j["version"] = std::string(kToolVersion);
  j["generator"] = result.generator;
  j["master_seed"] = result.master_seed;
  j["trials"] = result.trials;
  Json cells = Json::array();
  for (const auto& c : result.cells) {
    Json cj;
    cj["family"] = std::string(FamilyName(c.cell.family));
    cj["param"] = c.cell.param;
    cj["K"] = c.cell.k;
    cj["n"] = c.cell.n;
    cj["tau"] = c.cell.tau;
    cj["true_mass"] = MomentsToJson(c.true_mass);
    Json modes = Json::array();
    for (const auto& m : c.modes) {
      Json mj;
      mj["mode"] = std::string(ModeName(m.mode));
      mj["extension"] = IsExtension(m.mode);
      mj["estimate"] = MomentsToJson(m.estimate);
      mj["mean_abs_error"] = m.mean_abs_error;
      modes.push_back(mj);
    }
    cj["modes"] = modes;
    cells.push_back(cj);
  }
  j["cells"] = cells;
  return j;
}

Json SummaryToJson(const IngestionSummary& s) {
  Json j;
  j["rows_read"] = s.rows_read;
  j["rows_kept"] = s.rows_kept;
  j["rows_dropped"] = s.rows_dropped();
  Json drops = Json::object();
  for (const auto& [reason, rows] : s.dropped) drops[reason] = rows;
  j["dropped"] = drops;
  j["unit"] = s.unit;
  j["emitted"] = s.emitted;
  j["admissions_skipped"] = s.admissions_skipped;
  j["sources"] = s.sources;
  return j;
}

}  // namespace blindspot
