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

#include "cli.h"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "blindspot/abstraction.h"
#include "blindspot/accuracy.h"
#include "blindspot/config.h"
#include "blindspot/count_table.h"
#include "blindspot/errors.h"
#include "blindspot/estimators.h"
#include "blindspot/ingest.h"
#include "blindspot/report.h"
#include "blindspot/simulator.h"

namespace blindspot::cli {
namespace {

namespace fs = std::filesystem;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

const CLI::Validator kAtLeastOne(
    [](std::string& text) -> std::string {
      uint64_t v = 0;
      auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
      if (ec != std::errc() || ptr != text.data() + text.size() || v < 1) {
        return "must be an integer >= 1, got '" + text + "'";
      }
      return {};
    },
    "INT>=1");

struct TableInput {
  std::string samples;
  std::string counts;

  void Register(CLI::App* app) {
    auto* s = app->add_option("--samples", samples, "Canonical samples CSV");
    auto* c = app->add_option("--counts", counts, "(state..., count) CSV");
    s->excludes(c);
  }

  CountTable Load() const {
    if (samples.empty() == counts.empty()) {
      throw UsageError("exactly one of --samples or --counts is required");
    }
    if (!counts.empty()) return ReadCounts(fs::path(counts));
    IngestedSamples in = ReadSamples(fs::path(samples));
    return BuildCountTable(in.samples, in.schema);
  }
};

// Writes through `fn` to `path`, or to `fallback` when path is empty or "-".
void Emit(const std::string& path, std::ostream& fallback,
          const std::function<void(std::ostream&)>& fn) {
  if (path.empty() || path == "-") {
    fn(fallback);
    return;
  }
  std::ostringstream buffer;
  fn(buffer);
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw DataError("cannot write " + path);
  file << buffer.str();
  if (!file) throw DataError("error writing " + path);
}

void EmitJson(const std::string& path, std::ostream& fallback, const Json& j) {
  Emit(path, fallback, [&](std::ostream& o) { o << j.dump(2) << '\n'; });
}

std::vector<EstimatorMode> ResolveModes(const std::vector<std::string>& names) {
  std::vector<EstimatorMode> modes;
  for (const auto& name : names) {
    if (name == "all") {
      modes.assign(std::begin(kAllModes), std::end(kAllModes));
      continue;
    }
    try {
      modes.push_back(ParseMode(name));
    } catch (const InvalidArgument& e) {
      throw UsageError(e.what());
    }
  }
  if (modes.empty()) modes.push_back(EstimatorMode::kPlugin);
  return modes;
}

double ResolveBlindAccuracy(double assumed, uint64_t chance_classes) {
  if (chance_classes > 0) return ChanceAccuracy(chance_classes);
  if (!(assumed >= 0.0 && assumed <= 1.0)) {
    throw UsageError("--assumed-blind-accuracy must be in [0,1]");
  }
  return assumed;
}

void PrintSummary(std::ostream& err, const IngestionSummary& s) {
  err << "ingest: read " << s.rows_read << " rows, kept " << s.rows_kept
      << ", dropped " << s.rows_dropped();
  for (const auto& [reason, rows] : s.dropped) err << " [" << reason << ": " << rows << "]";
  err << "; emitted " << s.emitted << ' ' << s.unit;
  if (s.admissions_skipped > 0) {
    err << "; warning: " << s.admissions_skipped
        << " admissions without a seq-1 diagnosis skipped";
  }
  err << '\n';
}

struct IngestArgs {
  std::string source;
  std::vector<std::string> inputs;
  std::vector<int> subjects;
  std::string placement = "chest";
  std::string preset = "a";
  std::string config;
  double window_s = 5.0;
  double stride_s = 2.5;
  double rate_hz = 100.0;
  std::vector<std::string> key_columns;
  DiagnosisColumns diag;
  std::string out;
  std::string config_out;
  std::string summary;
};

int RunIngest(const IngestArgs& a, std::ostream& out, std::ostream& err) {
  IngestedSamples result;
  std::optional<AbstractionConfig> fitted;
  if (a.source == "pamap2" || a.source == "imu-csv") {
    ImuStream stream;
    if (a.source == "pamap2") {
      std::vector<fs::path> paths(a.inputs.begin(), a.inputs.end());
      stream = IngestPamap2(paths, a.subjects, ParsePlacement(a.placement));
    } else {
      if (a.inputs.size() != 1) throw UsageError("imu-csv takes one --input");
      stream = IngestImuCsv(fs::path(a.inputs[0]), a.rate_hz);
    }
    AbstractionConfig config = a.config.empty()
                                   ? AbstractionConfig::Preset(a.preset)
                                   : ParseAbstractionConfig(ReadKeyValues(a.config));
    const auto windows =
        MakeWindows(stream.samples, stream.sample_rate_hz, a.window_s, a.stride_s);
    if (!config.Fitted()) {
      if (windows.empty()) throw DataError("no complete windows to fit quantiles on");
      config = FitAbstraction(config, windows);
    }
    result.schema = config.Schema();
    result.samples = AbstractWindows(windows, config);
    result.summary = stream.summary;
    result.summary.emitted = windows.size();
    fitted = config;
  } else if (a.source == "samples-csv") {
    if (a.inputs.size() != 1) throw UsageError("samples-csv takes one --input");
    if (a.key_columns.empty()) throw UsageError("samples-csv needs --key-columns");
    result = IngestSamplesCsv(fs::path(a.inputs[0]), a.key_columns);
  } else if (a.source == "diagnoses") {
    if (a.inputs.size() != 1) throw UsageError("diagnoses takes one --input");
    result = IngestDiagnoses(fs::path(a.inputs[0]), a.diag);
  } else {
    throw UsageError("unknown --source '" + a.source + "'");
  }
  result.summary.Check();

  Emit(a.out, out, [&](std::ostream& o) { WriteSamples(o, result.schema, result.samples); });
  if (!a.config_out.empty()) {
    if (!fitted) throw UsageError("--config-out applies to IMU sources only");
    Emit(a.config_out, out, [&](std::ostream& o) { o << FormatAbstractionConfig(*fitted); });
  }
  if (!a.summary.empty()) EmitJson(a.summary, out, SummaryToJson(result.summary));
  PrintSummary(err, result.summary);
  return kOk;
}

}  // namespace

int Run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Blind-spot mass: coverage-risk estimation for operational state spaces",
               "blindspot"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  // ingest
  IngestArgs ingest;
  auto* cmd_ingest = app.add_subcommand("ingest", "Convert raw data into a canonical samples file");
  cmd_ingest->add_option("--source", ingest.source, "pamap2 | imu-csv | samples-csv | diagnoses")
      ->required()
      ->check(CLI::IsMember({"pamap2", "imu-csv", "samples-csv", "diagnoses"}));
  cmd_ingest->add_option("--input", ingest.inputs, "Input files or directories")->required();
  cmd_ingest->add_option("--subjects", ingest.subjects, "PAMAP2 subject ids")->delimiter(',');
  cmd_ingest->add_option("--placement", ingest.placement, "PAMAP2 IMU: hand | chest | ankle")
      ->check(CLI::IsMember({"hand", "chest", "ankle"}));
  cmd_ingest->add_option("--preset", ingest.preset, "a | a,p | a,p,e | deployment-refined")
      ->check(CLI::IsMember({"a", "a,p", "a,p,e", "deployment-refined"}));
  cmd_ingest->add_option("--config", ingest.config, "Abstraction config file (key = value)");
  cmd_ingest->add_option("--window-s", ingest.window_s, "Window length in seconds")
      ->check(CLI::PositiveNumber);
  cmd_ingest->add_option("--stride-s", ingest.stride_s, "Window stride in seconds")
      ->check(CLI::PositiveNumber);
  cmd_ingest->add_option("--rate", ingest.rate_hz, "Sample rate of an imu-csv stream (Hz)")
      ->check(CLI::PositiveNumber);
  cmd_ingest->add_option("--key-columns", ingest.key_columns, "samples-csv key columns")
      ->delimiter(',');
  cmd_ingest->add_option("--admission-col", ingest.diag.admission, "diagnoses admission column");
  cmd_ingest->add_option("--seq-col", ingest.diag.seq_num, "diagnoses sequence column");
  cmd_ingest->add_option("--code-col", ingest.diag.icd_code, "diagnoses ICD code column");
  cmd_ingest->add_option("--out", ingest.out, "Samples file (default stdout)");
  cmd_ingest->add_option("--config-out", ingest.config_out, "Write the fitted abstraction config");
  cmd_ingest->add_option("--summary", ingest.summary, "Write the ingestion summary as JSON");

  // curve
  TableInput curve_in;
  uint64_t curve_tau_max = 20;
  std::vector<std::string> curve_modes;
  std::string curve_out, curve_json, curve_dataset;
  auto* cmd_curve = app.add_subcommand("curve", "Blind-spot mass curve over tau = 1..tau_max");
  curve_in.Register(cmd_curve);
  cmd_curve->add_option("--tau-max", curve_tau_max, "Largest support threshold (default 20)")
      ->check(kAtLeastOne);
  cmd_curve->add_option("--mode", curve_modes,
                        "plugin | plugin+unseen | generalized-gt | all (repeatable)");
  cmd_curve->add_option("--out", curve_out, "CSV output (default stdout)");
  cmd_curve->add_option("--json", curve_json, "Also write a JSON report bundle");
  cmd_curve->add_option("--dataset-id", curve_dataset, "Dataset name for report metadata");

  // decompose
  TableInput dec_in;
  uint64_t dec_tau = 0;
  std::string dec_weights, dec_out;
  size_t dec_top_k = 0;
  bool dec_supported = false;
  auto* cmd_dec = app.add_subcommand("decompose", "Per-state contributions to blind mass");
  dec_in.Register(cmd_dec);
  cmd_dec->add_option("--tau", dec_tau, "Support threshold")->required()->check(kAtLeastOne);
  cmd_dec->add_option("--weights", dec_weights, "Risk-weights file (<state>\\t<weight>)");
  cmd_dec->add_option("--top-k", dec_top_k, "Keep the k largest contributors")
      ->check(kAtLeastOne);
  cmd_dec->add_flag("--include-supported", dec_supported,
                    "Append supported states with zero contribution");
  cmd_dec->add_option("--out", dec_out, "CSV output (default stdout)");

  // ceiling
  TableInput ceil_in;
  uint64_t ceil_tau_max = 20, ceil_chance = 0;
  double ceil_assumed = 0.0;
  std::string ceil_mode = "plugin", ceil_out;
  auto* cmd_ceil = app.add_subcommand("ceiling", "Coverage-imposed accuracy ceiling versus tau");
  ceil_in.Register(cmd_ceil);
  cmd_ceil->add_option("--tau-max", ceil_tau_max, "Largest support threshold (default 20)")
      ->check(kAtLeastOne);
  auto* assumed_opt = cmd_ceil->add_option("--assumed-blind-accuracy", ceil_assumed,
                                           "Accuracy assumed on blind states (default 0)");
  cmd_ceil->add_option("--chance-classes", ceil_chance, "Use 1/classes as blind accuracy")
      ->check(kAtLeastOne)
      ->excludes(assumed_opt);
  cmd_ceil->add_option("--mode", ceil_mode, "Estimator mode for the blind mass");
  cmd_ceil->add_option("--out", ceil_out, "CSV output (default stdout)");

  // histogram
  TableInput hist_in;
  std::string hist_out;
  auto* cmd_hist = app.add_subcommand("histogram", "Support histogram (state, count)");
  hist_in.Register(cmd_hist);
  cmd_hist->add_option("--out", hist_out, "CSV output (default stdout)");

  // wilson
  std::string wil_input, wil_out;
  double wil_conf = 0.95;
  auto* cmd_wil = app.add_subcommand("wilson", "Wilson intervals for per-class accuracy");
  cmd_wil->add_option("--input", wil_input, "CSV with class,successes,trials")->required();
  cmd_wil->add_option("--confidence", wil_conf, "Two-sided confidence level")
      ->check(CLI::Range(0.0, 1.0));
  cmd_wil->add_option("--out", wil_out, "CSV output (default stdout)");

  // simulate
  std::string sim_spec, sim_out, sim_json;
  std::optional<uint64_t> sim_seed, sim_trials;
  auto* cmd_sim = app.add_subcommand("simulate", "Monte-Carlo estimator sweep with known truth");
  cmd_sim->add_option("--spec", sim_spec, "Sweep spec file (key = value)")->required();
  cmd_sim->add_option("--seed", sim_seed, "Override the master seed");
  cmd_sim->add_option("--trials", sim_trials, "Override the trial count")
      ->check(kAtLeastOne);
  cmd_sim->add_option("--out", sim_out, "CSV output (default stdout)");
  cmd_sim->add_option("--json", sim_json, "Also write the full result as JSON");

  // report
  TableInput rep_in;
  ReportOptions rep;
  uint64_t rep_chance = 0;
  std::vector<std::string> rep_modes{"all"};
  std::string rep_out, rep_abstraction, rep_ceiling_mode = "plugin";
  auto* cmd_rep = app.add_subcommand("report", "Full JSON report bundle");
  rep_in.Register(cmd_rep);
  cmd_rep->add_option("--tau-max", rep.tau_max, "Largest support threshold (default 20)")
      ->check(kAtLeastOne);
  cmd_rep->add_option("--mode", rep_modes, "Curve modes (default all)");
  cmd_rep->add_option("--decompose-tau", rep.decompose_taus, "Decomposition thresholds")
      ->delimiter(',')
      ->check(kAtLeastOne);
  cmd_rep->add_option("--top-k", rep.top_k, "Truncate decompositions");
  auto* rep_assumed = cmd_rep->add_option("--assumed-blind-accuracy",
                                          rep.assumed_blind_accuracy,
                                          "Accuracy assumed on blind states");
  cmd_rep->add_option("--chance-classes", rep_chance, "Use 1/classes as blind accuracy")
      ->check(kAtLeastOne)
      ->excludes(rep_assumed);
  cmd_rep->add_option("--ceiling-mode", rep_ceiling_mode, "Estimator mode for the ceiling");
  cmd_rep->add_option("--dataset-id", rep.dataset_id, "Dataset name");
  cmd_rep->add_option("--abstraction", rep_abstraction, "Abstraction config to embed");
  cmd_rep->add_option("--out", rep_out, "JSON output (default stdout)");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << '\n';
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\nRun with --help for usage.\n";
    return kUsage;
  }

  try {
    if (*cmd_ingest) return RunIngest(ingest, out, err);

    if (*cmd_curve) {
      const CountTable table = curve_in.Load();
      ReportOptions opts;
      opts.dataset_id = curve_dataset;
      opts.tau_max = curve_tau_max;
      opts.modes = ResolveModes(curve_modes);
      ReportBundle bundle = BuildReport(table, opts);
      CheckReport(bundle);
      Emit(curve_out, out, [&](std::ostream& o) { WriteCurvesCsv(o, bundle.curves); });
      if (!curve_json.empty()) EmitJson(curve_json, out, ReportToJson(bundle));
      return kOk;
    }

    if (*cmd_dec) {
      const CountTable table = dec_in.Load();
      const auto dist = EmpiricalDistribution::PlugIn(table);
      const RiskWeights weights = dec_weights.empty()
                                      ? RiskWeights()
                                      : ReadRiskWeights(fs::path(dec_weights), table.schema());
      RiskWeightedResult r = RiskWeightedBlindness(table, dist, weights, dec_tau);
      auto entries = r.decomposition.entries;
      if (dec_top_k > 0 && entries.size() > dec_top_k) {
        entries.erase(entries.begin() + static_cast<std::ptrdiff_t>(dec_top_k), entries.end());
      }
      if (dec_supported) {
        auto supported = SupportedEntries(table, dist, weights, dec_tau);
        entries.insert(entries.end(), supported.begin(), supported.end());
      }
      Emit(dec_out, out, [&](std::ostream& o) { WriteDecompositionCsv(o, entries); });
      return kOk;
    }

    if (*cmd_ceil) {
      const CountTable table = ceil_in.Load();
      const double assumed = ResolveBlindAccuracy(ceil_assumed, ceil_chance);
      const auto curve = ComputeBlindSpotCurve(table, ResolveModes({ceil_mode}).front(),
                                               ceil_tau_max);
      const auto ceiling = ComputeCeilingCurve(curve, assumed);
      Emit(ceil_out, out, [&](std::ostream& o) { WriteCeilingCsv(o, ceiling); });
      return kOk;
    }

    if (*cmd_hist) {
      const CountTable table = hist_in.Load();
      const auto hist = SupportHistogram(table);
      Emit(hist_out, out, [&](std::ostream& o) { WriteHistogramCsv(o, hist); });
      return kOk;
    }

    if (*cmd_wil) {
      if (!(wil_conf > 0.0 && wil_conf < 1.0)) {
        throw UsageError("--confidence must be in (0,1)");
      }
      std::ifstream in(wil_input, std::ios::binary);
      if (!in) throw DataError("cannot open " + wil_input);
      const auto rows = ReadAccuracyRows(in, wil_input);
      Emit(wil_out, out, [&](std::ostream& o) { WriteWilsonCsv(o, rows, wil_conf); });
      return kOk;
    }

    if (*cmd_sim) {
      SweepSpec spec = ParseSweepSpec(ReadKeyValues(sim_spec));
      if (sim_seed) spec.seed = *sim_seed;
      if (sim_trials) spec.trials = *sim_trials;
      const SweepResult result = RunSweep(spec.cells, spec.trials, spec.seed);
      Emit(sim_out, out, [&](std::ostream& o) { WriteSweepCsv(o, result); });
      if (!sim_json.empty()) EmitJson(sim_json, out, SweepToJson(result));
      return kOk;
    }

    if (*cmd_rep) {
      const CountTable table = rep_in.Load();
      rep.modes = ResolveModes(rep_modes);
      rep.ceiling_mode = ResolveModes({rep_ceiling_mode}).front();
      rep.assumed_blind_accuracy = ResolveBlindAccuracy(rep.assumed_blind_accuracy, rep_chance);
      if (!rep_abstraction.empty()) {
        rep.abstraction = ParseAbstractionConfig(ReadKeyValues(rep_abstraction));
      }
      ReportBundle bundle = BuildReport(table, rep);
      CheckReport(bundle);
      EmitJson(rep_out, out, ReportToJson(bundle));
      return kOk;
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\nRun with --help for usage.\n";
    return kUsage;
  } catch (const DataError& e) {
    err << "error: " << e.what() << '\n';
    return kDataError;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return kDataError;
  } catch (const InvariantViolation& e) {
    err << "internal error: " << e.what() << '\n';
    return kInternalError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kInternalError;
  }
  return kUsage;
}

}  // namespace blindspot::cli
