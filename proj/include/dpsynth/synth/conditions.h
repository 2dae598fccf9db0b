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

#ifndef DPSYNTH_SYNTH_CONDITIONS_H_
#define DPSYNTH_SYNTH_CONDITIONS_H_

#include <vector>

#include "Eigen/Core"
#include "absl/status/statusor.h"
#include "dpsynth/base/random.h"
#include "dpsynth/data/table.h"
#include "json.hpp"

namespace dpsynth {

// One (column, value) requirement on a generated row.
struct Condition {
  int column = 0;  // schema column index (always categorical)
  int value = 0;   // category code

  bool operator==(const Condition&) const = default;
};

// The conditional-vector space: one one-hot block per categorical column,
// concatenated in schema order.
class ConditionSpace {
 public:
  ConditionSpace() = default;
  explicit ConditionSpace(const TableSchema& schema);

  int width() const { return width_; }
  // Schema indices of the categorical columns.
  const std::vector<int>& columns() const { return columns_; }
  int num_values(int slot) const { return sizes_[slot]; }
  int offset(int slot) const { return offsets_[slot]; }
  // Position of schema column `column` in columns(), or -1.
  int slot_of(int column) const;

  // Exactly one active entry per row.
  Eigen::MatrixXd OneHot(const std::vector<Condition>& conditions) const;

 private:
  std::vector<int> columns_;
  std::vector<int> sizes_;
  std::vector<int> offsets_;
  std::vector<int> slot_by_column_;
  int width_ = 0;
};

enum class ConditionWeighting {
  kLogFrequency,  // log(1 + count), i.e. training-by-sampling
  kFrequency,     // raw counts
  kUniform,       // data independent
};

// Draws a column uniformly among the categorical columns, then a value from
// that column's distribution.
class ConditionSampler {
 public:
  ConditionSampler() = default;
  ConditionSampler(const TableSchema& schema,
                   std::vector<std::vector<double>> value_weights);

  static ConditionSampler FromData(const DataTable& data,
                                   ConditionWeighting weighting);
  static ConditionSampler Uniform(const TableSchema& schema);

  const ConditionSpace& space() const { return space_; }
  // Normalized value distribution of categorical slot `slot`.
  const std::vector<double>& probabilities(int slot) const {
    return probabilities_[slot];
  }

  Condition Draw(Rng& rng) const;
  std::vector<Condition> DrawBatch(int n, Rng& rng) const;

  nlohmann::json ToJson() const;
  static absl::StatusOr<ConditionSampler> FromJson(const TableSchema& schema,
                                                   const nlohmann::json& json);

 private:
  ConditionSpace space_;
  std::vector<std::vector<double>> probabilities_;  // by slot
};

// Row indices grouped by (categorical slot, value), for picking a real row
// that satisfies a condition.
class RowIndex {
 public:
  RowIndex(const DataTable& data, const ConditionSpace& space);
  // A uniformly chosen row with `condition`, or -1 if none exists.
  int Pick(const Condition& condition, Rng& rng) const;

 private:
  const ConditionSpace* space_;
  std::vector<std::vector<std::vector<int>>> rows_;  // [slot][value]
};

}  // namespace dpsynth

#endif  // DPSYNTH_SYNTH_CONDITIONS_H_
