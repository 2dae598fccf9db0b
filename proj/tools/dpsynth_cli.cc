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

// Command-line front end: fetch-data, fit, sample, eval, attack, bench,
// ablate.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "dpsynth/bench/experiment.h"
#include "dpsynth/bench/runner.h"
#include "dpsynth/data/csv_io.h"
#include "dpsynth/data/toy_data.h"
#include "dpsynth/metrics/privacy.h"
#include "dpsynth/metrics/quality.h"
#include "json.hpp"

namespace dpsynth {
namespace {

int Fail(const absl::Status& status) {
  std::cerr << "error: " << status.message() << "\n";
  return 1;
}

// Flags shared by the commands that run grids.
struct GridFlags {
  std::string config_path;
  std::string out_dir = "report";
  std::vector<uint64_t> seeds;
  std::vector<std::string> datasets;
  std::string data_dir;
  int toy_rows = -1;
  int epochs = -1;
  int trials = -1;
};

void AddGridFlags(CLI::App* app, GridFlags& flags) {
  app->add_option("--config", flags.config_path, "Experiment config (JSON)");
  app->add_option("--out", flags.out_dir, "Report directory");
  app->add_option("--seeds", flags.seeds, "Training seeds");
  app->add_option("--datasets", flags.datasets, "Dataset ids");
  app->add_option("--data-dir", flags.data_dir,
                  "Directory with fetched datasets (default: toy stand-ins)");
  app->add_option("--toy-rows", flags.toy_rows, "Rows of toy stand-ins");
  app->add_option("--epochs", flags.epochs, "Training epochs override");
  app->add_option("--trials", flags.trials, "HPO trials override");
}

absl::StatusOr<ExperimentConfig> LoadGrid(const GridFlags& flags) {
  ExperimentConfig config;
  if (!flags.config_path.empty()) {
    auto loaded = ExperimentConfig::Load(flags.config_path);
    if (!loaded.ok()) return loaded.status();
    config = *loaded;
  }
  if (!flags.seeds.empty()) config.seeds = flags.seeds;
  if (!flags.datasets.empty()) config.datasets = flags.datasets;
  if (!flags.data_dir.empty()) config.data_dir = flags.data_dir;
  if (flags.toy_rows >= 0) config.toy_rows = flags.toy_rows;
  if (flags.epochs > 0) {
    config.ctgan.epochs = flags.epochs;
    config.tvae.epochs = flags.epochs;
  }
  if (flags.trials > 0) config.hpo_trials = flags.trials;
  if (absl::Status s = config.Validate(); !s.ok()) return s;
  return config;
}

int RunFetch(const std::string& out, bool toy, int rows,
             const std::vector<std::string>& datasets) {
  if (!toy) {
    const std::string script =
        std::string(DPSYNTH_SOURCE_DIR) + "/tools/fetch_data.py";
    std::string command = "python3 '" + script + "' --out '" + out + "'";
    if (!datasets.empty()) {
      command += " --datasets";
      for (const std::string& d : datasets) command += " " + d;
    }
    return std::system(command.c_str()) == 0 ? 0 : 1;
  }
  std::filesystem::create_directories(out);
  const std::vector<std::string> ids =
      datasets.empty() ? ExperimentConfig().datasets : datasets;
  for (const std::string& id : ids) {
    auto spec = ToyPreset(id, rows);
    if (!spec.ok()) return Fail(spec.status());
    const DataTable table = CanonicalizeTarget(MakeToyDataset(*spec, 0));
    const std::string base = (std::filesystem::path(out) / id).string();
    if (auto s = WriteTableCsv(table, base + ".csv"); !s.ok()) return Fail(s);
    if (auto s = WriteSchema(table.schema(), base + ".schema.json"); !s.ok()) {
      return Fail(s);
    }
    std::cout << id << ": " << table.num_rows() << " toy rows\n";
  }
  return 0;
}

int RunFit(const std::string& csv, const std::string& schema_path,
           const std::string& config_path, const std::string& generator,
           const std::string& epsilon_text, const std::string& ablation,
           uint64_t seed, const std::string& out) {
  ExperimentConfig config;
  if (!config_path.empty()) {
    auto loaded = ExperimentConfig::Load(config_path);
    if (!loaded.ok()) return Fail(loaded.status());
    config = *loaded;
  }
  auto table = LoadTable(csv, schema_path);
  if (!table.ok()) return Fail(table.status());
  auto epsilon = ParseEpsilon(epsilon_text);
  if (!epsilon.ok()) return Fail(epsilon.status());
  auto flags = AblationFlags::Parse(ablation);
  if (!flags.ok()) return Fail(flags.status());
  GeneratorSpec spec{generator, *epsilon, *flags};
  auto model = FitGenerator(spec, CanonicalizeTarget(*table), config, seed);
  if (!model.ok()) return Fail(model.status());
  if (auto s = SaveCheckpoint(**model, out); !s.ok()) return Fail(s);
  if (!(*model)->training_log().rows.empty()) {
    if (auto s = (*model)->training_log().WriteCsv(out + ".log.csv"); !s.ok()) {
      return Fail(s);
    }
  }
  if (auto ledger = (*model)->ledger()) {
    std::cout << DpLedgerToJson(*ledger).dump(2) << "\n";
  }
  return 0;
}

int RunSample(const std::string& model_path, int rows, uint64_t seed,
              const std::string& out) {
  auto model = LoadCheckpoint(model_path);
  if (!model.ok()) return Fail(model.status());
  auto table = (*model)->Sample(rows, seed);
  if (!table.ok()) return Fail(table.status());
  if (auto s = WriteTableCsv(*table, out); !s.ok()) return Fail(s);
  return 0;
}

int RunEval(const std::string& real_csv, const std::string& synth_csv,
            const std::string& holdout_csv, const std::string& schema_path,
            uint64_t seed) {
  auto real = LoadTable(real_csv, schema_path);
  if (!real.ok()) return Fail(real.status());
  auto synth = LoadTable(synth_csv, schema_path);
  if (!synth.ok()) return Fail(synth.status());
  auto quality = EvaluateQuality(*real, *synth);
  if (!quality.ok()) return Fail(quality.status());
  nlohmann::json out = {{"column_shapes", quality->column_shape_mean},
                        {"pair_trends", quality->pair_trend_mean},
                        {"synthetic_minority_percent", quality->minority_fraction}};
  auto baseline = ComputeDcrBaseline(*real, *synth, seed);
  if (!baseline.ok()) return Fail(baseline.status());
  out["dcr_baseline"] = baseline->score;
  if (!holdout_csv.empty()) {
    auto holdout = LoadTable(holdout_csv, schema_path);
    if (!holdout.ok()) return Fail(holdout.status());
    auto overfit = ComputeDcrOverfit(*real, *holdout, *synth);
    if (!overfit.ok()) return Fail(overfit.status());
    out["dcr_overfit"] = *overfit;
  }
  std::cout << out.dump(2) << "\n";
  return 0;
}

int RunBenchCommand(const ExperimentConfig& config, const std::string& out) {
  auto report = RunBench(config);
  if (!report.ok()) return Fail(report.status());
  if (auto s = WriteBenchReport(*report, config, out); !s.ok()) return Fail(s);
  std::cout << "wrote " << out << " (" << report->failures.size()
            << " failed cells)\n";
  return report->failures.empty() ? 0 : 1;
}

int RunAttackCommand(const ExperimentConfig& config, const std::string& out) {
  auto report = RunAttackSuite(config);
  if (!report.ok()) return Fail(report.status());
  if (auto s = WriteAttackReport(*report, out); !s.ok()) return Fail(s);
  std::cout << "wrote " << out << " (" << report->failures.size()
            << " failed cells)\n";
  return report->failures.empty() ? 0 : 1;
}

int Main(int argc, char** argv) {
  CLI::App app{"Differentially private tabular synthesis benchmark"};
  app.require_subcommand(1);

  std::string out, csv, schema, config_path, generator = "dp_ctgan",
              epsilon = "1", ablation = "base", model, real, synth, holdout;
  std::vector<std::string> datasets;
  uint64_t seed = 0;
  int rows = 0;
  bool toy = false;

  CLI::App* fetch = app.add_subcommand("fetch-data", "Download datasets");
  fetch->add_option("--out", out, "Output directory")->required();
  fetch->add_option("--datasets", datasets, "Dataset ids");
  fetch->add_flag("--toy", toy, "Write toy stand-ins instead of downloading");
  fetch->add_option("--rows", rows, "Toy rows (0: preset size)");

  CLI::App* fit = app.add_subcommand("fit", "Fit a generator and checkpoint it");
  fit->add_option("--data", csv, "Training CSV")->required();
  fit->add_option("--schema", schema, "Schema sidecar")->required();
  fit->add_option("--config", config_path, "Experiment config for hyperparameters");
  fit->add_option("--generator", generator, "gaussian_copula|ctgan|dp_ctgan|tvae|dp_tvae");
  fit->add_option("--epsilon", epsilon, "Privacy budget or inf");
  fit->add_option("--ablation", ablation, "CTGAN ablation flags");
  fit->add_option("--seed", seed, "Training seed");
  fit->add_option("--out", out, "Checkpoint path")->required();

  CLI::App* sample = app.add_subcommand("sample", "Sample from a checkpoint");
  sample->add_option("--model", model, "Checkpoint")->required();
  sample->add_option("--rows", rows, "Rows")->required();
  sample->add_option("--seed", seed, "Sampling seed");
  sample->add_option("--out", out, "Output CSV")->required();

  CLI::App* eval = app.add_subcommand("eval", "Quality and privacy metrics");
  eval->add_option("--real", real, "Training CSV")->required();
  eval->add_option("--synth", synth, "Synthetic CSV")->required();
  eval->add_option("--holdout", holdout, "Holdout CSV for dcr_overfit");
  eval->add_option("--schema", schema, "Schema sidecar")->required();
  eval->add_option("--seed", seed, "Seed of the uniform baseline");

  GridFlags bench_flags, attack_flags, ablate_flags;
  CLI::App* bench = app.add_subcommand("bench", "Run an experiment grid");
  AddGridFlags(bench, bench_flags);
  CLI::App* attack = app.add_subcommand("attack", "Run the membership attack suite");
  AddGridFlags(attack, attack_flags);
  CLI::App* ablate = app.add_subcommand("ablate", "Run the CTGAN ablation grid");
  AddGridFlags(ablate, ablate_flags);

  CLI11_PARSE(app, argc, argv);

  if (*fetch) return RunFetch(out, toy, rows, datasets);
  if (*fit) {
    return RunFit(csv, schema, config_path, generator, epsilon, ablation, seed, out);
  }
  if (*sample) return RunSample(model, rows, seed, out);
  if (*eval) return RunEval(real, synth, holdout, schema, seed);
  if (*bench) {
    auto config = LoadGrid(bench_flags);
    if (!config.ok()) return Fail(config.status());
    return RunBenchCommand(*config, bench_flags.out_dir);
  }
  if (*attack) {
    auto config = LoadGrid(attack_flags);
    if (!config.ok()) return Fail(config.status());
    return RunAttackCommand(*config, attack_flags.out_dir);
  }
  if (*ablate) {
    auto config = LoadGrid(ablate_flags);
    if (!config.ok()) return Fail(config.status());
    config->generators = {"ctgan"};
    if (config->ablations == std::vector<std::string>{"base"}) {
      config->ablations = {"base",      "uni_samp",  "batch_samp",
                           "no_penalty", "uni_trans", "grad_clip"};
    }
    return RunBenchCommand(*config, ablate_flags.out_dir);
  }
  return 1;
}

}  // namespace
}  // namespace dpsynth

int main(int argc, char** argv) { return dpsynth::Main(argc, argv); }
