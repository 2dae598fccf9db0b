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

#ifndef DPSYNTH_SYNTH_GAUSSIAN_COPULA_H_
#define DPSYNTH_SYNTH_GAUSSIAN_COPULA_H_

#include <memory>
#include <vector>

#include "Eigen/Core"
#include "absl/status/statusor.h"
#include "dpsynth/synth/synthesizer.h"

namespace dpsynth {

// Multivariate-normal copula over per-column marginals. Continuous columns
// are Gaussianized through their empirical CDF (mid-ranks), categorical
// columns through the midpoint of each category's cumulative interval.
class GaussianCopula : public Synthesizer {
 public:
  // Needs at least two rows. Deterministic.
  static absl::StatusOr<std::unique_ptr<GaussianCopula>> Fit(
      const DataTable& train);
  static absl::StatusOr<std::unique_ptr<GaussianCopula>> FromJson(
      const TableSchema& schema, const nlohmann::json& json);

  SynthKind kind() const override { return SynthKind::kGaussianCopula; }
  const TableSchema& schema() const override { return schema_; }
  absl::StatusOr<DataTable> Sample(int n, uint64_t seed) const override;
  nlohmann::json ToJson() const override;

  // Symmetric PSD with unit diagonal.
  const Eigen::MatrixXd& correlation() const { return correlation_; }
  // Category frequencies of a categorical column (sum to 1).
  const std::vector<double>& frequencies(int column) const {
    return marginals_[column].probabilities;
  }

  // Normal score of a cell under the fitted marginal.
  double Gaussianize(int column, double value) const;
  // Inverse of the marginal CDF at u in (0, 1).
  double InvertMarginal(int column, double u) const;

 private:
  struct Marginal {
    std::vector<double> sorted_values;  // continuous
    std::vector<double> probabilities;  // categorical
    bool constant = false;
  };

  GaussianCopula() = default;
  absl::Status Finish(Eigen::MatrixXd correlation);

  TableSchema schema_;
  std::vector<Marginal> marginals_;
  Eigen::MatrixXd correlation_;
  Eigen::MatrixXd factor_;  // correlation = factor * factor^T
};

}  // namespace dpsynth

#endif  // DPSYNTH_SYNTH_GAUSSIAN_COPULA_H_
