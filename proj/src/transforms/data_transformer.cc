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

#include "dpsynth/transforms/data_transformer.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "absl/strings/str_format.h"
#include "dpsynth/base/random.h"
#include "dpsynth/base/status_macros.h"
#include "dpsynth/data/csv_io.h"

namespace dpsynth {

std::vector<int> EncodingLayout::CategoricalSpans(
    const TableSchema& schema) const {
  std::vector<int> out;
  for (size_t s = 0; s < spans.size(); ++s) {
    if (spans[s].kind == SpanKind::kOneHot &&
        schema.column(spans[s].column).is_categorical()) {
      out.push_back(static_cast<int>(s));
    }
  }
  return out;
}

absl::StatusOr<DataTransformer> DataTransformer::FitUniform(
    const TableSchema& schema, int bins) {
  ASSIGN_OR_RETURN(UniformBinner binner, UniformBinner::Fit(schema, bins));
  DataTransformer t;
  t.schema_ = schema;
  t.encoding_ = ContinuousEncoding::kUniformBins;
  t.binner_ = std::move(binner);
  t.bins_ = bins;
  t.mixtures_.resize(schema.num_columns());
  t.BuildLayout();
  return t;
}

absl::StatusOr<DataTransformer> DataTransformer::FitGaussianMixture(
    const DataTable& data, int components, uint64_t seed) {
  if (data.empty()) {
    return absl::InvalidArgumentError("cannot fit mixtures on an empty table");
  }
  DataTransformer t;
  t.schema_ = data.schema();
  t.encoding_ = ContinuousEncoding::kGaussianMixture;
  t.mixtures_.resize(data.num_columns());
  for (int c : data.schema().ContinuousColumns()) {
    const std::vector<double> values = data.ColumnValues(c);
    const std::set<double> distinct(values.begin(), values.end());
    GmmFitOptions options;
    options.components =
        std::min<int>(components, static_cast<int>(distinct.size()));
    options.seed = DeriveSeed(seed, c);
    options.stddev_floor = 1e-6 * data.schema().column(c).range_width();
    ASSIGN_OR_RETURN(GaussianMixture mixture,
                     GaussianMixture::Fit(values, options));
    t.mixtures_[c] = std::move(mixture);
  }
  t.BuildLayout();
  return t;
}

void DataTransformer::BuildLayout() {
  layout_ = {};
  int cursor = 0;
  for (int c = 0; c < schema_.num_columns(); ++c) {
    const ColumnMeta& meta = schema_.column(c);
    if (meta.is_categorical()) {
      layout_.spans.push_back({c, SpanKind::kOneHot, cursor, meta.num_categories()});
      cursor += meta.num_categories();
      continue;
    }
    const int modes = encoding_ == ContinuousEncoding::kUniformBins
                          ? bins_
                          : mixtures_[c]->num_components();
    layout_.spans.push_back({c, SpanKind::kOneHot, cursor, modes});
    cursor += modes;
    layout_.spans.push_back({c, SpanKind::kOffset, cursor, 1});
    cursor += 1;
  }
  layout_.width = cursor;
}

absl::StatusOr<EncodedMatrix> DataTransformer::Encode(
    const DataTable& table) const {
  if (!(table.schema() == schema_)) {
    return absl::InvalidArgumentError(
        "layout mismatch: table schema differs from the fitted transform");
  }
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(table.num_rows(), layout_.width);
  for (int r = 0; r < table.num_rows(); ++r) {
    for (size_t s = 0; s < layout_.spans.size(); ++s) {
      const EncodedSpan& span = layout_.spans[s];
      if (span.kind == SpanKind::kOffset) continue;
      const double value = table.at(r, span.column);
      if (schema_.column(span.column).is_categorical()) {
        m(r, span.start + static_cast<int>(value)) = 1.0;
        continue;
      }
      const EncodedSpan& offset_span = layout_.spans[s + 1];
      if (encoding_ == ContinuousEncoding::kUniformBins) {
        const BinnedValue b = binner_->Bin(span.column, value);
        m(r, span.start + b.bin) = 1.0;
        m(r, offset_span.start) = b.offset;
      } else {
        const GaussianMixture& mixture = *mixtures_[span.column];
        const int k = mixture.MostLikelyComponent(value);
        m(r, span.start + k) = 1.0;
        m(r, offset_span.start) = mixture.Offset(k, value);
      }
    }
  }
  return EncodedMatrix{std::move(m), layout_};
}

absl::StatusOr<DataTable> DataTransformer::Decode(
    const Eigen::MatrixXd& matrix) const {
  if (matrix.cols() != layout_.width) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "layout mismatch: matrix has %d columns, layout expects %d",
        matrix.cols(), layout_.width));
  }
  const int columns = schema_.num_columns();
  std::vector<double> cells(static_cast<size_t>(matrix.rows()) * columns);
  for (int r = 0; r < matrix.rows(); ++r) {
    for (size_t s = 0; s < layout_.spans.size(); ++s) {
      const EncodedSpan& span = layout_.spans[s];
      if (span.kind == SpanKind::kOffset) continue;
      int argmax = 0;
      for (int j = 1; j < span.width; ++j) {
        if (matrix(r, span.start + j) > matrix(r, span.start + argmax)) argmax = j;
      }
      double& cell = cells[static_cast<size_t>(r) * columns + span.column];
      const ColumnMeta& meta = schema_.column(span.column);
      if (meta.is_categorical()) {
        cell = argmax;
        continue;
      }
      const double offset = matrix(r, layout_.spans[s + 1].start);
      if (!(offset >= 0.0 && offset <= 1.0)) {
        return absl::InvalidArgumentError(absl::StrFormat(
            "row %d column '%s': offset %g outside [0, 1]", r, meta.name,
            offset));
      }
      const double value =
          encoding_ == ContinuousEncoding::kUniformBins
              ? binner_->Unbin(span.column, argmax, offset)
              : mixtures_[span.column]->Invert(argmax, offset);
      cell = std::clamp(value, meta.range_min, meta.range_max);
    }
  }
  return DataTable::Create(schema_, std::move(cells));
}

nlohmann::json DataTransformer::ToJson() const {
  nlohmann::json out = {{"schema", SchemaToJson(schema_)}};
  if (encoding_ == ContinuousEncoding::kUniformBins) {
    out["encoding"] = "uniform";
    out["bins"] = bins_;
  } else {
    out["encoding"] = "gmm";
    nlohmann::json mixtures = nlohmann::json::object();
    for (int c : schema_.ContinuousColumns()) {
      mixtures[schema_.column(c).name] = mixtures_[c]->ToJson();
    }
    out["mixtures"] = std::move(mixtures);
  }
  return out;
}

absl::StatusOr<DataTransformer> DataTransformer::FromJson(
    const nlohmann::json& json) {
  if (!json.contains("schema") || !json.contains("encoding")) {
    return absl::InvalidArgumentError("malformed transformer state");
  }
  ASSIGN_OR_RETURN(TableSchema schema, SchemaFromJson(json["schema"]));
  if (json["encoding"] == "uniform") {
    return FitUniform(schema, json.at("bins").get<int>());
  }
  DataTransformer t;
  t.schema_ = std::move(schema);
  t.encoding_ = ContinuousEncoding::kGaussianMixture;
  t.mixtures_.resize(t.schema_.num_columns());
  for (int c : t.schema_.ContinuousColumns()) {
    const std::string& name = t.schema_.column(c).name;
    if (!json["mixtures"].contains(name)) {
      return absl::InvalidArgumentError(
          absl::StrFormat("transformer state lacks mixture for '%s'", name));
    }
    ASSIGN_OR_RETURN(GaussianMixture mixture,
                     GaussianMixture::FromJson(json["mixtures"][name]));
    t.mixtures_[c] = std::move(mixture);
  }
  t.BuildLayout();
  return t;
}

}  // namespace dpsynth
