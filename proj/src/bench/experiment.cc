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

#include "dpsynth/bench/experiment.h"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "absl/strings/str_format.h"
#include "dpsynth/base/status_macros.h"
#include "dpsynth/data/csv_io.h"
#include "dpsynth/data/toy_data.h"
#include "dpsynth/synth/gaussian_copula.h"

namespace dpsynth {
namespace {

absl::StatusOr<nlohmann::json> EpsilonsFromJson(const nlohmann::json& json) {
  if (!json.is_array()) {
    return absl::InvalidArgumentError("epsilons must be an array");
  }
  return json;
}

absl::StatusOr<SearchSpace> SearchSpaceFromJson(const nlohmann::json& json) {
  SearchSpace s;
  s.n_estimators_lo = json.value("n_estimators_lo", s.n_estimators_lo);
  s.n_estimators_hi = json.value("n_estimators_hi", s.n_estimators_hi);
  s.max_depth_lo = json.value("max_depth_lo", s.max_depth_lo);
  s.max_depth_hi = json.value("max_depth_hi", s.max_depth_hi);
  s.learning_rate_lo = json.value("learning_rate_lo", s.learning_rate_lo);
  s.learning_rate_hi = json.value("learning_rate_hi", s.learning_rate_hi);
  s.min_child_weight_lo = json.value("min_child_weight_lo", s.min_child_weight_lo);
  s.min_child_weight_hi = json.value("min_child_weight_hi", s.min_child_weight_hi);
  s.colsample_lo = json.value("colsample_lo", s.colsample_lo);
  s.colsample_hi = json.value("colsample_hi", s.colsample_hi);
  RETURN_IF_ERROR(s.Validate());
  return s;
}

nlohmann::json SearchSpaceToJson(const SearchSpace& s) {
  return {{"n_estimators_lo", s.n_estimators_lo},
          {"n_estimators_hi", s.n_estimators_hi},
          {"max_depth_lo", s.max_depth_lo},
          {"max_depth_hi", s.max_depth_hi},
          {"learning_rate_lo", s.learning_rate_lo},
          {"learning_rate_hi", s.learning_rate_hi},
          {"min_child_weight_lo", s.min_child_weight_lo},
          {"min_child_weight_hi", s.min_child_weight_hi},
          {"colsample_lo", s.colsample_lo},
          {"colsample_hi", s.colsample_hi}};
}

absl::StatusOr<AttackConfig> AttackFromJson(const nlohmann::json& json) {
  AttackConfig a;
  a.shadow_pairs = json.value("shadow_pairs", a.shadow_pairs);
  a.shadow_subset_fraction =
      json.value("shadow_subset_fraction", a.shadow_subset_fraction);
  a.reference_fraction = json.value("reference_fraction", a.reference_fraction);
  a.train_datasets = json.value("train_datasets", a.train_datasets);
  a.eval_datasets = json.value("eval_datasets", a.eval_datasets);
  a.eval_rows = json.value("eval_rows", a.eval_rows);
  a.discriminators = json.value("discriminators", a.discriminators);
  a.forest_trees = json.value("forest_trees", a.forest_trees);
  a.histogram_components =
      json.value("histogram_components", a.histogram_components);
  const std::string kind = json.value("discriminator", std::string("forest"));
  if (kind == "forest") {
    a.discriminator = DiscriminatorKind::kForest;
  } else if (kind == "fair_coin") {
    a.discriminator = DiscriminatorKind::kFairCoin;
  } else if (kind == "constant") {
    a.discriminator = DiscriminatorKind::kConstant;
  } else {
    return absl::InvalidArgumentError("unknown discriminator: " + kind);
  }
  RETURN_IF_ERROR(a.Validate());
  return a;
}

}  // namespace

std::string FormatEpsilon(double epsilon) {
  if (epsilon == kInfiniteEpsilon) return "inf";
  char buffer[64];
  auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), epsilon);
  return std::string(buffer, end);
}

absl::StatusOr<double> ParseEpsilon(const std::string& text) {
  if (text == "inf" || text == "infinity") return kInfiniteEpsilon;
  double value = 0.0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || end != text.data() + text.size() || !(value > 0.0)) {
    return absl::InvalidArgumentError("bad epsilon: " + text);
  }
  return value;
}

absl::Status ExperimentConfig::Validate() const {
  if (datasets.empty()) return absl::InvalidArgumentError("no datasets");
  if (generators.empty()) return absl::InvalidArgumentError("no generators");
  if (seeds.empty()) return absl::InvalidArgumentError("no seeds");
  if (epsilons.empty()) return absl::InvalidArgumentError("no epsilons");
  for (double e : epsilons) {
    if (!(e > 0.0)) return absl::InvalidArgumentError("epsilon must be > 0");
  }
  if (ablations.empty()) return absl::InvalidArgumentError("no ablations");
  for (const std::string& g : generators) {
    if (g == kOriginalGenerator) continue;
    RETURN_IF_ERROR(ParseSynthKind(g).status());
  }
  for (const std::string& a : ablations) {
    RETURN_IF_ERROR(AblationFlags::Parse(a).status());
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    return absl::InvalidArgumentError("delta must lie in (0, 1)");
  }
  if (!(clip_norm > 0.0)) return absl::InvalidArgumentError("clip_norm <= 0");
  if (hpo_trials < 1) return absl::InvalidArgumentError("hpo_trials < 1");
  if (toy_rows < 0 || sample_rows < 0) {
    return absl::InvalidArgumentError("row counts must be >= 0");
  }
  RETURN_IF_ERROR(search_space.Validate());
  return attack.Validate();
}

nlohmann::json ExperimentConfig::ToJson() const {
  nlohmann::json eps = nlohmann::json::array();
  for (double e : epsilons) {
    if (e == kInfiniteEpsilon) {
      eps.push_back("inf");
    } else {
      eps.push_back(e);
    }
  }
  return {{"name", name},
          {"datasets", datasets},
          {"data_dir", data_dir},
          {"toy_rows", toy_rows},
          {"generators", generators},
          {"epsilons", eps},
          {"seeds", seeds},
          {"split_seed", split_seed},
          {"balanced", balanced},
          {"ablations", ablations},
          {"delta", delta},
          {"clip_norm", clip_norm},
          {"ctgan", ctgan.ToJson()},
          {"tvae", tvae.ToJson()},
          {"hpo_trials", hpo_trials},
          {"search_space", SearchSpaceToJson(search_space)},
          {"sample_rows", sample_rows},
          {"attack", attack.ToJson()}};
}

absl::StatusOr<ExperimentConfig> ExperimentConfig::FromJson(
    const nlohmann::json& json) {
  if (!json.is_object()) {
    return absl::InvalidArgumentError("experiment config must be an object");
  }
  static const std::set<std::string> kKeys = {
      "name",      "datasets",   "data_dir",   "toy_rows",     "generators",
      "epsilons",  "seeds",      "split_seed", "balanced",     "ablations",
      "delta",     "clip_norm",  "ctgan",      "tvae",         "hpo_trials",
      "search_space", "sample_rows", "attack"};
  for (const auto& [key, value] : json.items()) {
    if (!kKeys.count(key)) {
      return absl::InvalidArgumentError("unknown config key: " + key);
    }
  }
  ExperimentConfig c;
  try {
    c.name = json.value("name", c.name);
    c.datasets = json.value("datasets", c.datasets);
    c.data_dir = json.value("data_dir", c.data_dir);
    c.toy_rows = json.value("toy_rows", c.toy_rows);
    c.generators = json.value("generators", c.generators);
    if (json.contains("epsilons")) {
      ASSIGN_OR_RETURN(nlohmann::json eps, EpsilonsFromJson(json["epsilons"]));
      c.epsilons.clear();
      for (const nlohmann::json& e : eps) {
        if (e.is_string()) {
          ASSIGN_OR_RETURN(double v, ParseEpsilon(e.get<std::string>()));
          c.epsilons.push_back(v);
        } else {
          c.epsilons.push_back(e.get<double>());
        }
      }
    }
    c.seeds = json.value("seeds", c.seeds);
    c.split_seed = json.value("split_seed", c.split_seed);
    c.balanced = json.value("balanced", c.balanced);
    c.ablations = json.value("ablations", c.ablations);
    c.delta = json.value("delta", c.delta);
    c.clip_norm = json.value("clip_norm", c.clip_norm);
    if (json.contains("ctgan")) {
      ASSIGN_OR_RETURN(c.ctgan, CtganConfig::FromJson(json["ctgan"]));
    }
    if (json.contains("tvae")) {
      ASSIGN_OR_RETURN(c.tvae, TvaeConfig::FromJson(json["tvae"]));
    }
    c.hpo_trials = json.value("hpo_trials", c.hpo_trials);
    if (json.contains("search_space")) {
      ASSIGN_OR_RETURN(c.search_space, SearchSpaceFromJson(json["search_space"]));
    }
    c.sample_rows = json.value("sample_rows", c.sample_rows);
    if (json.contains("attack")) {
      ASSIGN_OR_RETURN(c.attack, AttackFromJson(json["attack"]));
    }
  } catch (const nlohmann::json::exception& e) {
    return absl::InvalidArgumentError(
        absl::StrFormat("malformed experiment config: %s", e.what()));
  }
  RETURN_IF_ERROR(c.Validate());
  return c;
}

absl::StatusOr<ExperimentConfig> ExperimentConfig::Load(const std::string& path) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError("cannot open config " + path);
  nlohmann::json json = nlohmann::json::parse(in, nullptr, /*allow_exceptions=*/false);
  if (json.is_discarded()) {
    return absl::InvalidArgumentError("config is not valid JSON: " + path);
  }
  return FromJson(json);
}

std::string GeneratorSpec::Label() const {
  if (kind == "ctgan" && flags.any()) return kind + "+" + flags.Name();
  return kind;
}

absl::StatusOr<std::vector<GeneratorSpec>> ExpandGenerators(
    const ExperimentConfig& config) {
  std::vector<GeneratorSpec> out;
  for (const std::string& name : config.generators) {
    if (name == kOriginalGenerator) {
      out.push_back(GeneratorSpec{name, kInfiniteEpsilon, AblationFlags{}});
      continue;
    }
    ASSIGN_OR_RETURN(SynthKind kind, ParseSynthKind(name));
    if (IsPrivate(kind)) {
      for (double e : config.epsilons) out.push_back(GeneratorSpec{name, e, AblationFlags{}});
    } else if (kind == SynthKind::kCtgan) {
      for (const std::string& a : config.ablations) {
        ASSIGN_OR_RETURN(AblationFlags flags, AblationFlags::Parse(a));
        out.push_back(GeneratorSpec{name, kInfiniteEpsilon, flags});
      }
    } else {
      out.push_back(GeneratorSpec{name, kInfiniteEpsilon, AblationFlags{}});
    }
  }
  return out;
}

absl::StatusOr<std::unique_ptr<Synthesizer>> FitGenerator(
    const GeneratorSpec& spec, const DataTable& train,
    const ExperimentConfig& config, uint64_t seed) {
  ASSIGN_OR_RETURN(SynthKind kind, ParseSynthKind(spec.kind));
  PrivacyTarget privacy;
  privacy.epsilon = spec.epsilon;
  privacy.delta = config.delta;
  privacy.clip_norm = config.clip_norm;
  switch (kind) {
    case SynthKind::kGaussianCopula: {
      ASSIGN_OR_RETURN(auto m, GaussianCopula::Fit(train));
      return std::unique_ptr<Synthesizer>(std::move(m));
    }
    case SynthKind::kCtgan: {
      ASSIGN_OR_RETURN(auto m, CtganModel::Fit(train, config.ctgan, spec.flags, seed));
      return std::unique_ptr<Synthesizer>(std::move(m));
    }
    case SynthKind::kDpCtgan: {
      ASSIGN_OR_RETURN(auto m,
                       CtganModel::FitPrivate(train, config.ctgan, privacy, seed));
      return std::unique_ptr<Synthesizer>(std::move(m));
    }
    case SynthKind::kTvae: {
      ASSIGN_OR_RETURN(auto m, TvaeModel::Fit(train, config.tvae, seed));
      return std::unique_ptr<Synthesizer>(std::move(m));
    }
    case SynthKind::kDpTvae: {
      ASSIGN_OR_RETURN(auto m,
                       TvaeModel::FitPrivate(train, config.tvae, privacy, seed));
      return std::unique_ptr<Synthesizer>(std::move(m));
    }
  }
  return absl::InternalError("unhandled generator kind");
}

absl::StatusOr<DataTable> LoadDataset(const std::string& id,
                                      const ExperimentConfig& config) {
  if (config.data_dir.empty()) {
    ASSIGN_OR_RETURN(ToyDatasetSpec spec, ToyPreset(id, config.toy_rows));
    return CanonicalizeTarget(MakeToyDataset(spec, config.split_seed));
  }
  const std::filesystem::path dir(config.data_dir);
  const std::string csv = (dir / (id + ".csv")).string();
  const std::string meta = (dir / (id + ".schema.json")).string();
  if (!std::filesystem::exists(csv) || !std::filesystem::exists(meta)) {
    return absl::NotFoundError(absl::StrFormat(
        "dataset %s not fetched: expected %s and %s (run fetch-data)", id, csv,
        meta));
  }
  ASSIGN_OR_RETURN(DataTable table, LoadTable(csv, meta));
  return CanonicalizeTarget(table);
}

}  // namespace dpsynth
