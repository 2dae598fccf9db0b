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

#ifndef DPSYNTH_TRANSFORMS_DATA_TRANSFORMER_H_
#define DPSYNTH_TRANSFORMS_DATA_TRANSFORMER_H_

#include <cstdint>
#include <optional>
#include <vector>

#include "Eigen/Core"
#include "absl/status/statusor.h"
#include "dpsynth/data/table.h"
#include "dpsynth/transforms/gaussian_mixture.h"
#include "dpsynth/transforms/uniform_binner.h"
#include "json.hpp"

namespace dpsynth {

enum class SpanKind { kOneHot, kOffset };

// One contiguous slice of an encoded row. Categorical columns own a single
// one-hot span; continuous columns own a mode/bin one-hot span followed by a
// one-wide offset span.
struct EncodedSpan {
  int column = 0;
  SpanKind kind = SpanKind::kOneHot;
  int start = 0;
  int width = 0;
};

struct EncodingLayout {
  std::vector<EncodedSpan> spans;
  int width = 0;

  // Index into `spans` of the one-hot span of each categorical column, in
  // schema order.
  std::vector<int> CategoricalSpans(const TableSchema& schema) const;
};

struct EncodedMatrix {
  Eigen::MatrixXd values;
  EncodingLayout layout;
};

enum class ContinuousEncoding { kUniformBins, kGaussianMixture };

// Reversible table <-> matrix encoding used by the neural synthesizers.
class DataTransformer {
 public:
  // Data-independent: bins come from the schema's public ranges.
  static absl::StatusOr<DataTransformer> FitUniform(const TableSchema& schema,
                                                    int bins);
  // Mode-specific normalization fitted on `data`. Columns with fewer than
  // `components` distinct values get one component per distinct value.
  static absl::StatusOr<DataTransformer> FitGaussianMixture(
      const DataTable& data, int components, uint64_t seed);

  ContinuousEncoding encoding() const { return encoding_; }
  const TableSchema& schema() const { return schema_; }
  const EncodingLayout& layout() const { return layout_; }
  int output_dim() const { return layout_.width; }
  const GaussianMixture& mixture(int column) const { return *mixtures_[column]; }

  absl::StatusOr<EncodedMatrix> Encode(const DataTable& table) const;

  // One-hot spans are read by argmax, so relaxed (soft) rows decode too.
  // Offsets must lie in [0, 1]; continuous outputs are clamped to the
  // declared range.
  absl::StatusOr<DataTable> Decode(const Eigen::MatrixXd& matrix) const;

  nlohmann::json ToJson() const;
  static absl::StatusOr<DataTransformer> FromJson(const nlohmann::json& json);

 private:
  void BuildLayout();

  TableSchema schema_;
  ContinuousEncoding encoding_ = ContinuousEncoding::kUniformBins;
  std::optional<UniformBinner> binner_;
  int bins_ = 0;
  std::vector<std::optional<GaussianMixture>> mixtures_;  // by column
  EncodingLayout layout_;
};

}  // namespace dpsynth

#endif  // DPSYNTH_TRANSFORMS_DATA_TRANSFORMER_H_
