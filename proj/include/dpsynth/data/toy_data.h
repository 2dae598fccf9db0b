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

#ifndef DPSYNTH_DATA_TOY_DATA_H_
#define DPSYNTH_DATA_TOY_DATA_H_

#include <cstdint>
#include <string>
#include <string_view>

#include "absl/status/statusor.h"
#include "dpsynth/data/table.h"

namespace dpsynth {

// Synthetic stand-ins for the benchmark datasets. Two latent Gaussian
// factors drive correlated features; the label marks the top
// `minority_percent` of a noisy linear score so that features carry real
// but imperfect signal about the target.
struct ToyDatasetSpec {
  std::string name = "toy";
  int rows = 1000;
  int categorical_features = 4;  // excluding the target
  int continuous_features = 2;
  double minority_percent = 25.0;
  double signal = 1.5;
  int max_categories = 5;
};

// Presets shaped like the six public datasets: column counts, categorical
// share and minority percentage. `rows` <= 0 keeps the full-scale row count.
absl::StatusOr<ToyDatasetSpec> ToyPreset(std::string_view id, int rows = 0);

DataTable MakeToyDataset(const ToyDatasetSpec& spec, uint64_t seed);

}  // namespace dpsynth

#endif  // DPSYNTH_DATA_TOY_DATA_H_
