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

#include "dpsynth/data/toy_data.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "absl/strings/ascii.h"
#include "absl/strings/str_format.h"
#include "boost/math/distributions/normal.hpp"
#include "dpsynth/base/random.h"

namespace dpsynth {
namespace {

struct Preset {
  const char* id;
  int rows;
  int columns;            // including the target
  int categorical;        // including the target
  double minority_percent;
};

constexpr Preset kPresets[] = {
    {"ad", 48842, 14, 8, 23.9},  {"bc", 10000, 11, 5, 20.3},
    {"bm", 45211, 13, 7, 11.7},  {"cc", 30000, 23, 9, 22.12},
    {"cr", 1000, 20, 17, 30.0},  {"gm", 150000, 10, 4, 6.68},
};

double Round4(double x) { return std::round(x * 1e4) / 1e4; }

}  // namespace

absl::StatusOr<ToyDatasetSpec> ToyPreset(std::string_view id, int rows) {
  const std::string key = absl::AsciiStrToLower(std::string(id));
  for (const Preset& preset : kPresets) {
    if (key == preset.id) {
      ToyDatasetSpec spec;
      spec.name = absl::StrFormat("%s-like", preset.id);
      spec.rows = rows > 0 ? rows : preset.rows;
      spec.categorical_features = preset.categorical - 1;
      spec.continuous_features = preset.columns - preset.categorical;
      spec.minority_percent = preset.minority_percent;
      return spec;
    }
  }
  return absl::NotFoundError(absl::StrFormat("unknown dataset preset '%s'", std::string(id)));
}

DataTable MakeToyDataset(const ToyDatasetSpec& spec, uint64_t seed) {
  Rng rng = MakeRng(seed, 3);
  const int n = spec.rows;
  std::vector<double> z1(n), z2(n), score(n);
  for (int i = 0; i < n; ++i) {
    z1[i] = StandardNormal(rng);
    z2[i] = StandardNormal(rng);
    score[i] = spec.signal * (z1[i] + 0.6 * z2[i]) + StandardNormal(rng);
  }
  const int minority =
      static_cast<int>(std::lround(n * spec.minority_percent / 100.0));
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return score[a] > score[b]; });
  std::vector<int> label(n, 0);
  for (int k = 0; k < minority; ++k) label[order[k]] = 1;

  std::vector<ColumnMeta> columns;
  std::vector<std::vector<double>> values;
  const boost::math::normal standard;
  for (int j = 0; j < spec.continuous_features; ++j) {
    const double width = 100.0 * (j + 1);
    const double weight = std::max(0.0, 0.85 - 0.2 * j);
    std::vector<double>& column = values.emplace_back(n);
    for (int i = 0; i < n; ++i) {
      const double latent = (j % 2 == 0) ? z1[i] : z2[i];
      double x = weight * latent + std::sqrt(1.0 - weight * weight) *
                                       StandardNormal(rng);
      if (j == 0 && latent > 0.7) x += 2.5;  // a second mode
      const double v = width / 2.0 + width / 12.0 * x;
      column[i] = Round4(std::clamp(v, 0.0, width));
    }
    columns.push_back(
        ColumnMeta::Continuous(absl::StrFormat("num_%d", j), 0.0, width));
  }
  for (int j = 0; j < spec.categorical_features; ++j) {
    const int k = 2 + j % std::max(1, spec.max_categories - 1);
    const double weight = std::max(0.0, 0.8 - 0.1 * j);
    std::vector<std::string> names;
    for (int c = 0; c < k; ++c) names.push_back(absl::StrFormat("c%d", c));
    // Skewed cut points so category frequencies are uneven.
    std::vector<double> cuts;
    for (int c = 1; c < k; ++c) {
      const double p = std::pow(static_cast<double>(c) / k, 0.7);
      cuts.push_back(boost::math::quantile(standard, p));
    }
    std::vector<double>& column = values.emplace_back(n);
    for (int i = 0; i < n; ++i) {
      const double latent = (j % 2 == 0) ? z2[i] : z1[i];
      const double t = weight * latent +
                       std::sqrt(1.0 - weight * weight) * StandardNormal(rng);
      column[i] = static_cast<double>(
          std::upper_bound(cuts.begin(), cuts.end(), t) - cuts.begin());
    }
    columns.push_back(
        ColumnMeta::Categorical(absl::StrFormat("cat_%d", j), names));
  }
  columns.push_back(ColumnMeta::Categorical("label", {"neg", "pos"}));
  std::vector<double>& target = values.emplace_back(n);
  for (int i = 0; i < n; ++i) target[i] = label[i];

  const int width = static_cast<int>(columns.size());
  std::vector<double> cells(static_cast<size_t>(n) * width);
  for (int i = 0; i < n; ++i) {
    for (int c = 0; c < width; ++c) cells[static_cast<size_t>(i) * width + c] = values[c][i];
  }
  TableSchema schema = *TableSchema::Create(std::move(columns), "label");
  return CanonicalizeTarget(*DataTable::Create(std::move(schema), std::move(cells)));
}

}  // namespace dpsynth
