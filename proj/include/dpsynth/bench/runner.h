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

#ifndef DPSYNTH_BENCH_RUNNER_H_
#define DPSYNTH_BENCH_RUNNER_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dpsynth/bench/experiment.h"
#include "dpsynth/data/sampling.h"
#include "dpsynth/mia/attack.h"

namespace dpsynth {

// Metric names written to results.csv, in output order.
inline constexpr const char* kBenchMetrics[] = {
    "column_shapes",     "pair_trends",       "dcr_baseline",
    "dcr_overfit",       "balanced_accuracy", "input_minority_percent",
    "synthetic_minority_percent", "achieved_epsilon", "sigma"};

// One metric of one (dataset, generator, epsilon, seed) cell. NaN marks a
// value that could not be computed (e.g. single-class synthetic data).
struct ResultRow {
  std::string dataset;
  std::string generator;
  double epsilon = 0.0;
  uint64_t seed = 0;
  std::string metric;
  double value = 0.0;
};

struct TimingRow {
  std::string dataset;
  std::string generator;
  double epsilon = 0.0;
  uint64_t seed = 0;
  double fit_seconds = 0.0;
  double total_seconds = 0.0;
  int test_reads = 0;
};

struct CellFailure {
  std::string dataset;
  std::string generator;
  double epsilon = 0.0;
  uint64_t seed = 0;
  std::string message;
};

struct BenchReport {
  std::vector<ResultRow> rows;
  std::vector<TimingRow> timings;
  std::vector<CellFailure> failures;
};

// Hands out the test split at most once; every other read is an error.
class GuardedSplit {
 public:
  explicit GuardedSplit(const SplitBundle& split) : split_(split) {}

  const DataTable& train() const { return split_.train; }
  const DataTable& validation() const { return split_.validation; }
  absl::StatusOr<const DataTable*> ConsumeTest();
  int test_reads() const { return test_reads_; }

 private:
  const SplitBundle& split_;
  int test_reads_ = 0;
};

// Validation-tuned boosted trees trained on `train` and scored once on the
// guarded test split. nullopt when `train` lacks a class.
absl::StatusOr<std::optional<double>> DownstreamBalancedAccuracy(
    const DataTable& train, GuardedSplit& split, const ExperimentConfig& config,
    uint64_t seed);

// Runs every cell of the grid. Cell failures are recorded, not returned.
absl::StatusOr<BenchReport> RunBench(const ExperimentConfig& config);

// results.csv, timings.csv, failures.csv, tables.md and config.json.
absl::Status WriteBenchReport(const BenchReport& report,
                              const ExperimentConfig& config,
                              const std::string& dir);

std::string ResultsCsv(const std::vector<ResultRow>& rows);

// Mean over seeds of one metric per (generator, epsilon) and dataset; NaN
// when any seed lacks the value.
double MeanOverSeeds(const std::vector<ResultRow>& rows,
                     const std::string& dataset, const std::string& generator,
                     double epsilon, const std::string& metric);

// Aligned markdown tables, one per metric.
std::string MarkdownTables(const std::vector<ResultRow>& rows,
                           const ExperimentConfig& config);

struct AttackRow {
  std::string dataset;
  std::string generator;
  double epsilon = 0.0;
  AttackResult result;
};

struct AttackSuiteReport {
  std::vector<AttackRow> rows;
  std::vector<CellFailure> failures;
  std::optional<Dispersion> dispersion;  // over all cells with equal trials
};

// The membership attack against every generator spec of the grid, on the
// training split with the first seed.
absl::StatusOr<AttackSuiteReport> RunAttackSuite(const ExperimentConfig& config);

// attack.csv, attack.md and transcripts/<cell>.json.
absl::Status WriteAttackReport(const AttackSuiteReport& report,
                               const std::string& dir);

}  // namespace dpsynth

#endif  // DPSYNTH_BENCH_RUNNER_H_
