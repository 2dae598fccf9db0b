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

#include "dpsynth/synth/conditions.h"

#include <cmath>
#include <numeric>
#include <utility>

#include "absl/strings/str_format.h"
#include "dpsynth/base/check.h"

namespace dpsynth {

ConditionSpace::ConditionSpace(const TableSchema& schema)
    : columns_(schema.CategoricalColumns()),
      slot_by_column_(schema.num_columns(), -1) {
  for (size_t slot = 0; slot < columns_.size(); ++slot) {
    const int size = schema.column(columns_[slot]).num_categories();
    sizes_.push_back(size);
    offsets_.push_back(width_);
    slot_by_column_[columns_[slot]] = static_cast<int>(slot);
    width_ += size;
  }
}

int ConditionSpace::slot_of(int column) const {
  if (column < 0 || column >= static_cast<int>(slot_by_column_.size())) {
    return -1;
  }
  return slot_by_column_[column];
}

Eigen::MatrixXd ConditionSpace::OneHot(
    const std::vector<Condition>& conditions) const {
  Eigen::MatrixXd out =
      Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(conditions.size()),
                            width_);
  for (size_t r = 0; r < conditions.size(); ++r) {
    const int slot = slot_of(conditions[r].column);
    DPSYNTH_CHECK(slot >= 0);
    DPSYNTH_CHECK(conditions[r].value >= 0 &&
                  conditions[r].value < sizes_[slot]);
    out(static_cast<Eigen::Index>(r), offsets_[slot] + conditions[r].value) =
        1.0;
  }
  return out;
}

ConditionSampler::ConditionSampler(
    const TableSchema& schema, std::vector<std::vector<double>> value_weights)
    : space_(schema), probabilities_(std::move(value_weights)) {
  DPSYNTH_CHECK(probabilities_.size() == space_.columns().size());
  for (size_t slot = 0; slot < probabilities_.size(); ++slot) {
    std::vector<double>& p = probabilities_[slot];
    DPSYNTH_CHECK(static_cast<int>(p.size()) == space_.num_values(slot));
    const double total = std::accumulate(p.begin(), p.end(), 0.0);
    if (total > 0.0) {
      for (double& v : p) v /= total;
    } else {
      for (double& v : p) v = 1.0 / p.size();
    }
  }
}

ConditionSampler ConditionSampler::FromData(const DataTable& data,
                                            ConditionWeighting weighting) {
  const ConditionSpace space(data.schema());
  std::vector<std::vector<double>> weights;
  for (size_t slot = 0; slot < space.columns().size(); ++slot) {
    std::vector<double> counts(space.num_values(slot), 0.0);
    if (weighting != ConditionWeighting::kUniform) {
      for (int r = 0; r < data.num_rows(); ++r) {
        counts[static_cast<int>(data.at(r, space.columns()[slot]))] += 1.0;
      }
    }
    for (double& c : counts) {
      switch (weighting) {
        case ConditionWeighting::kLogFrequency: c = std::log1p(c); break;
        case ConditionWeighting::kFrequency: break;
        case ConditionWeighting::kUniform: c = 1.0; break;
      }
    }
    weights.push_back(std::move(counts));
  }
  return ConditionSampler(data.schema(), std::move(weights));
}

ConditionSampler ConditionSampler::Uniform(const TableSchema& schema) {
  const ConditionSpace space(schema);
  std::vector<std::vector<double>> weights;
  for (size_t slot = 0; slot < space.columns().size(); ++slot) {
    weights.emplace_back(space.num_values(slot), 1.0);
  }
  return ConditionSampler(schema, std::move(weights));
}

Condition ConditionSampler::Draw(Rng& rng) const {
  const int slot =
      UniformInt(rng, 0, static_cast<int>(space_.columns().size()) - 1);
  return {space_.columns()[slot], SampleDiscrete(rng, probabilities_[slot])};
}

std::vector<Condition> ConditionSampler::DrawBatch(int n, Rng& rng) const {
  std::vector<Condition> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) out.push_back(Draw(rng));
  return out;
}

nlohmann::json ConditionSampler::ToJson() const { return probabilities_; }

absl::StatusOr<ConditionSampler> ConditionSampler::FromJson(
    const TableSchema& schema, const nlohmann::json& json) {
  const ConditionSpace space(schema);
  if (!json.is_array() || json.size() != space.columns().size()) {
    return absl::InvalidArgumentError(
        "condition distribution does not match the schema");
  }
  std::vector<std::vector<double>> weights;
  for (size_t slot = 0; slot < json.size(); ++slot) {
    std::vector<double> p = json[slot].get<std::vector<double>>();
    if (static_cast<int>(p.size()) != space.num_values(slot)) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "condition distribution for column %d has %d values, expected %d",
          space.columns()[slot], p.size(), space.num_values(slot)));
    }
    weights.push_back(std::move(p));
  }
  ConditionSampler sampler;
  sampler.space_ = space;
  sampler.probabilities_ = std::move(weights);  // stored normalized
  return sampler;
}

RowIndex::RowIndex(const DataTable& data, const ConditionSpace& space)
    : space_(&space) {
  rows_.resize(space.columns().size());
  for (size_t slot = 0; slot < space.columns().size(); ++slot) {
    rows_[slot].resize(space.num_values(slot));
    for (int r = 0; r < data.num_rows(); ++r) {
      rows_[slot][static_cast<int>(data.at(r, space.columns()[slot]))]
          .push_back(r);
    }
  }
}

int RowIndex::Pick(const Condition& condition, Rng& rng) const {
  const int slot = space_->slot_of(condition.column);
  DPSYNTH_CHECK(slot >= 0);
  const std::vector<int>& rows = rows_[slot][condition.value];
  if (rows.empty()) return -1;
  return rows[UniformInt(rng, 0, static_cast<int>(rows.size()) - 1)];
}

}  // namespace dpsynth
