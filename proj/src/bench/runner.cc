// Copyright 2026 The DPSynth Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dpsynth/bench/runner.h"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "absl/strings/str_format.h"
#include "dpsynth/base/status_macros.h"
#include "dpsynth/metrics/classification.h"
#include "dpsynth/metrics/privacy.h"
#include "dpsynth/metrics/quality.h"

namespace dpsynth {
namespace {

// Seed streams of one cell.
constexpr uint64_t kBalanceStream = 7;
constexpr uint64_t kSampleStream = 11;
constexpr uint64_t kPrivacyMetricStream = 12;
constexpr uint64_t kHpoStream = 13;
constexpr uint64_t kFinalModelStream = 14;

using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

std::string FormatValue(double v) {
  if (std::isnan(v)) return "NA";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return absl::StrFormat("%.17g", v);
}

std::string CellName(const std::string& dataset, const std::string& generator,
                     double epsilon) {
  return absl::StrFormat("%s/%s/eps=%s", dataset, generator,
                         FormatEpsilon(epsilon));
}

absl::Status WriteFile(const std::filesystem::path& path,
                       const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) return absl::UnavailableError("cannot write " + path.string());
  out << contents;
  out.close();
  return out ? absl::OkStatus()
             : absl::DataLossError("write failed: " + path.string());
}

struct PreparedData {
  SplitBundle split;
  DataTable input;  // generator input: train or its balanced downsample
};

absl::StatusOr<PreparedData> Prepare(const std::string& id,
                                     const ExperimentConfig& config) {
  ASSIGN_OR_RETURN(DataTable data, LoadDataset(id, config));
  ASSIGN_OR_RETURN(SplitBundle split, StratifiedSplit(data, config.split_seed));
  DataTable input = split.train;
  if (config.balanced) {
    ASSIGN_OR_RETURN(input, DownsampleBalanced(
                                split.train,
                                DeriveSeed(config.split_seed, kBalanceStream)));
  }
  return PreparedData{std::move(split), std::move(input)};
}

bool HasBothClasses(const DataTable& table) {
  const std::array<int, 2> counts = table.ClassCounts();
  return counts[0] > 0 && counts[1] > 0;
}

// Fits and samples one cell; returns the metric rows.
absl::StatusOr<std::vector<ResultRow>> RunCell(const GeneratorSpec& spec,
                                               const std::string& dataset,
                                               const PreparedData& data,
                                               const ExperimentConfig& config,
                                               uint64_t seed, TimingRow& timing) {
  const auto start = Clock::now();
  const DataTable& input = data.input;
  std::vector<ResultRow> rows;
  auto add = [&](const std::string& metric, double value) {
    rows.push_back(
        ResultRow{dataset, spec.Label(), spec.epsilon, seed, metric, value});
  };

  std::optional<DataTable> synth;
  std::optional<DpLedger> ledger;
  if (spec.kind == kOriginalGenerator) {
    synth = input;
  } else {
    ASSIGN_OR_RETURN(std::unique_ptr<Synthesizer> model,
                     FitGenerator(spec, input, config, seed));
    timing.fit_seconds = Seconds(start);
    ledger = model->ledger();
    const int n = config.sample_rows > 0 ? config.sample_rows : input.num_rows();
    ASSIGN_OR_RETURN(synth, model->Sample(n, DeriveSeed(seed, kSampleStream)));
  }

  ASSIGN_OR_RETURN(QualityReport quality, EvaluateQuality(input, *synth));
  ASSIGN_OR_RETURN(
      PrivacyReport privacy,
      EvaluatePrivacy(input, data.split.validation, *synth,
                      DeriveSeed(seed, kPrivacyMetricStream)));
  GuardedSplit guard(data.split);
  ASSIGN_OR_RETURN(std::optional<double> accuracy,
                   DownstreamBalancedAccuracy(*synth, guard, config, seed));
  timing.test_reads = guard.test_reads();

  add("column_shapes", quality.column_shape_mean);
  add("pair_trends", quality.pair_trend_mean);
  add("dcr_baseline", privacy.dcr_baseline);
  add("dcr_overfit", privacy.dcr_overfit);
  add("balanced_accuracy", accuracy.value_or(std::nan("")));
  add("input_minority_percent", MinorityFraction(input));
  add("synthetic_minority_percent", MinorityFraction(*synth));
  if (ledger.has_value()) {
    add("achieved_epsilon", ledger->achieved_epsilon);
    add("sigma", ledger->sigma);
  }
  timing.total_seconds = Seconds(start);
  return rows;
}

}  // namespace

absl::StatusOr<const DataTable*> GuardedSplit::ConsumeTest() {
  if (test_reads_ > 0) {
    return absl::FailedPreconditionError("test split already consumed");
  }
  ++test_reads_;
  return &split_.test;
}

absl::StatusOr<std::optional<double>> DownstreamBalancedAccuracy(
    const DataTable& train, GuardedSplit& split, const ExperimentConfig& config,
    uint64_t seed) {
  if (!HasBothClasses(train)) return std::optional<double>();
  ASSIGN_OR_RETURN(HpoResult hpo,
                   RandomSearch(train, split.validation(), config.search_space,
                                config.hpo_trials, DeriveSeed(seed, kHpoStream)));
  ASSIGN_OR_RETURN(GbdtModel model,
                   GbdtModel::Fit(train, hpo.best,
                                  DeriveSeed(seed, kFinalModelStream)));
  ASSIGN_OR_RETURN(const DataTable* test, split.ConsumeTest());
  ASSIGN_OR_RETURN(std::vector<int> predicted, model.Predict(*test));
  ASSIGN_OR_RETURN(double score, BalancedAccuracy(test->Labels(), predicted));
  return std::optional<double>(score);
}

absl::StatusOr<BenchReport> RunBench(const ExperimentConfig& config) {
  RETURN_IF_ERROR(config.Validate());
  ASSIGN_OR_RETURN(std::vector<GeneratorSpec> specs, ExpandGenerators(config));
  BenchReport report;
  for (const std::string& dataset : config.datasets) {
    absl::StatusOr<PreparedData> data = Prepare(dataset, config);
    for (const GeneratorSpec& spec : specs) {
      for (uint64_t seed : config.seeds) {
        const std::string cell = CellName(dataset, spec.Label(), spec.epsilon);
        TimingRow timing{dataset, spec.Label(), spec.epsilon, seed};
        absl::StatusOr<std::vector<ResultRow>> rows =
            data.ok() ? RunCell(spec, dataset, *data, config, seed, timing)
                      : absl::StatusOr<std::vector<ResultRow>>(data.status());
        if (!rows.ok()) {
          std::fprintf(stderr, "cell %s seed %llu failed: %s\n", cell.c_str(),
                       static_cast<unsigned long long>(seed),
                       std::string(rows.status().message()).c_str());
          report.failures.push_back(CellFailure{
              dataset, spec.Label(), spec.epsilon, seed,
              std::string(rows.status().message())});
          continue;
        }
        std::fprintf(stderr, "cell %s seed %llu done in %.1fs\n", cell.c_str(),
                     static_cast<unsigned long long>(seed),
                     timing.total_seconds);
        report.rows.insert(report.rows.end(), rows->begin(), rows->end());
        report.timings.push_back(timing);
      }
    }
  }
  return report;
}

std::string ResultsCsv(const std::vector<ResultRow>& rows) {
  std::string out = "dataset,generator,epsilon,seed,metric,value\n";
  for (const ResultRow& r : rows) {
    out += absl::StrFormat("%s,%s,%s,%d,%s,%s\n", r.dataset, r.generator,
                           FormatEpsilon(r.epsilon), r.seed, r.metric,
                           FormatValue(r.value));
  }
  return out;
}

double MeanOverSeeds(const std::vector<ResultRow>& rows,
                     const std::string& dataset, const std::string& generator,
                     double epsilon, const std::string& metric) {
  double total = 0.0;
  int count = 0;
  for (const ResultRow& r : rows) {
    if (r.dataset != dataset || r.generator != generator ||
        r.epsilon != epsilon || r.metric != metric) {
      continue;
    }
    if (std::isnan(r.value)) return std::nan("");
    total += r.value;
    ++count;
  }
  return count > 0 ? total / count : std::nan("");
}

std::string MarkdownTables(const std::vector<ResultRow>& rows,
                           const ExperimentConfig& config) {
  // Row keys in first-appearance order.
  std::vector<std::pair<std::string, double>> keys;
  for (const ResultRow& r : rows) {
    const std::pair<std::string, double> key{r.generator, r.epsilon};
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      keys.push_back(key);
    }
  }
  std::ostringstream out;
  out << "# " << config.name << "\n\n"
      << "Means over " << config.seeds.size()
      << " training seed(s). Synthetic sample size: "
      << (config.sample_rows > 0 ? std::to_string(config.sample_rows)
                                 : std::string("equal to the training split"))
      << ". DCR distance and overfitting score are implementation-defined. "
      << "\"—\" marks values that could not be computed (single-class "
      << "synthetic data or failed cells).\n";
  for (const char* metric : kBenchMetrics) {
    std::vector<std::vector<std::string>> table;
    std::vector<std::string> header = {"generator", "epsilon"};
    header.insert(header.end(), config.datasets.begin(), config.datasets.end());
    table.push_back(header);
    for (const auto& [generator, epsilon] : keys) {
      std::vector<std::string> line = {generator, FormatEpsilon(epsilon)};
      bool any = false;
      for (const std::string& dataset : config.datasets) {
        const double mean = MeanOverSeeds(rows, dataset, generator, epsilon, metric);
        if (!std::isnan(mean)) any = true;
        line.push_back(std::isnan(mean)   ? "—"
                       : std::isinf(mean) ? "∞"
                                          : absl::StrFormat("%.3f", mean));
      }
      if (any || std::string(metric) == "balanced_accuracy") table.push_back(line);
    }
    if (table.size() < 2) continue;
    // Column widths in code points so "—" and "∞" align.
    auto width = [](const std::string& s) {
      int w = 0;
      for (unsigned char c : s) w += (c & 0xC0) != 0x80;
      return w;
    };
    std::vector<int> widths(header.size(), 0);
    for (const auto& line : table) {
      for (size_t c = 0; c < line.size(); ++c) {
        widths[c] = std::max(widths[c], width(line[c]));
      }
    }
    out << "\n## " << metric << "\n\n";
    for (size_t i = 0; i < table.size(); ++i) {
      out << "|";
      for (size_t c = 0; c < table[i].size(); ++c) {
        out << " " << table[i][c]
            << std::string(widths[c] - width(table[i][c]), ' ') << " |";
      }
      out << "\n";
      if (i == 0) {
        out << "|";
        for (int w : widths) out << std::string(w + 2, '-') << "|";
        out << "\n";
      }
    }
  }
  return out.str();
}

absl::Status WriteBenchReport(const BenchReport& report,
                              const ExperimentConfig& config,
                              const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) return absl::UnavailableError("cannot create " + dir);
  const std::filesystem::path root(dir);
  RETURN_IF_ERROR(WriteFile(root / "results.csv", ResultsCsv(report.rows)));
  std::string timings =
      "dataset,generator,epsilon,seed,fit_seconds,total_seconds,test_reads\n";
  for (const TimingRow& t : report.timings) {
    timings += absl::StrFormat("%s,%s,%s,%d,%.3f,%.3f,%d\n", t.dataset,
                               t.generator, FormatEpsilon(t.epsilon), t.seed,
                               t.fit_seconds, t.total_seconds, t.test_reads);
  }
  RETURN_IF_ERROR(WriteFile(root / "timings.csv", timings));
  std::string failures = "dataset,generator,epsilon,seed,message\n";
  for (const CellFailure& f : report.failures) {
    std::string message = f.message;
    std::replace(message.begin(), message.end(), '"', '\'');
    failures += absl::StrFormat("%s,%s,%s,%d,\"%s\"\n", f.dataset, f.generator,
                                FormatEpsilon(f.epsilon), f.seed, message);
  }
  RETURN_IF_ERROR(WriteFile(root / "failures.csv", failures));
  RETURN_IF_ERROR(WriteFile(root / "tables.md", MarkdownTables(report.rows, config)));
  return WriteFile(root / "config.json", config.ToJson().dump(2) + "\n");
}

absl::StatusOr<AttackSuiteReport> RunAttackSuite(const ExperimentConfig& config) {
  RETURN_IF_ERROR(config.Validate());
  ASSIGN_OR_RETURN(std::vector<GeneratorSpec> specs, ExpandGenerators(config));
  const uint64_t seed = config.seeds.front();
  AttackSuiteReport report;
  for (const std::string& dataset : config.datasets) {
    absl::StatusOr<PreparedData> data = Prepare(dataset, config);
    for (const GeneratorSpec& spec : specs) {
      absl::StatusOr<AttackResult> result =
          data.ok() ? absl::StatusOr<AttackResult>(
                          absl::InvalidArgumentError("unsupported generator"))
                    : absl::StatusOr<AttackResult>(data.status());
      if (data.ok()) {
        GeneratorFactory factory =
            spec.kind == kOriginalGenerator
                ? LeakyGeneratorFactory()
                : SynthesizerFactory([&spec, &config](const DataTable& t,
                                                      uint64_t s) {
                    return FitGenerator(spec, t, config, s);
                  });
        result = RunAttack(factory, data->input, config.attack, seed);
      }
      const std::string cell = CellName(dataset, spec.Label(), spec.epsilon);
      if (!result.ok()) {
        std::fprintf(stderr, "attack %s failed: %s\n", cell.c_str(),
                     std::string(result.status().message()).c_str());
        report.failures.push_back(CellFailure{dataset, spec.Label(), spec.epsilon,
                                              seed,
                                              std::string(result.status().message())});
        continue;
      }
      std::fprintf(stderr, "attack %s: success %.3f\n", cell.c_str(),
                   result->success_rate);
      report.rows.push_back(
          AttackRow{dataset, spec.Label(), spec.epsilon, *std::move(result)});
    }
  }
  if (report.rows.size() >= 2) {
    std::vector<double> rates;
    bool equal_trials = true;
    for (const AttackRow& r : report.rows) {
      rates.push_back(r.result.success_rate);
      equal_trials &= r.result.trials == report.rows.front().result.trials;
    }
    if (equal_trials) {
      ASSIGN_OR_RETURN(Dispersion d,
                       SuccessDispersion(rates, report.rows.front().result.trials));
      report.dispersion = d;
    }
  }
  return report;
}

absl::Status WriteAttackReport(const AttackSuiteReport& report,
                               const std::string& dir) {
  const std::filesystem::path root(dir);
  std::error_code ec;
  std::filesystem::create_directories(root / "transcripts", ec);
  if (ec) return absl::UnavailableError("cannot create " + dir);
  std::string csv = "dataset,generator,epsilon,success_rate,trials,correct\n";
  std::string md =
      "# Membership inference\n\n| dataset | generator | epsilon | success "
      "| per-discriminator |\n|---|---|---|---|---|\n";
  for (const AttackRow& r : report.rows) {
    csv += absl::StrFormat("%s,%s,%s,%s,%d,%d\n", r.dataset, r.generator,
                           FormatEpsilon(r.epsilon),
                           FormatValue(r.result.success_rate), r.result.trials,
                           r.result.correct);
    std::string rates;
    for (double v : r.result.discriminator_rates) {
      rates += absl::StrFormat("%s%.2f", rates.empty() ? "" : " ", v);
    }
    md += absl::StrFormat("| %s | %s | %s | %.3f | %s |\n", r.dataset,
                          r.generator, FormatEpsilon(r.epsilon),
                          r.result.success_rate, rates);
    const std::string name = absl::StrFormat(
        "%s_%s_eps-%s.json", r.dataset, r.generator, FormatEpsilon(r.epsilon));
    RETURN_IF_ERROR(r.result.WriteTranscript((root / "transcripts" / name).string()));
  }
  if (report.dispersion.has_value()) {
    md += absl::StrFormat(
        "\nSuccess-rate dispersion across cells: observed sigma %.4f vs "
        "binomial reference %.4f.\n",
        report.dispersion->observed, report.dispersion->reference);
  }
  for (const CellFailure& f : report.failures) {
    md += absl::StrFormat("\nFailed: %s/%s/eps=%s: %s\n", f.dataset, f.generator,
                          FormatEpsilon(f.epsilon), f.message);
  }
  RETURN_IF_ERROR(WriteFile(root / "attack.csv", csv));
  return WriteFile(root / "attack.md", md);
}

}  // namespace dpsynth
