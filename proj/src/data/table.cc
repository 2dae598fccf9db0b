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

#include "dpsynth/data/table.h"

#include <cmath>
#include <set>
#include <utility>

#include "absl/strings/str_format.h"

namespace dpsynth {

ColumnMeta ColumnMeta::Categorical(std::string name,
                                   std::vector<std::string> categories) {
  ColumnMeta meta;
  meta.name = std::move(name);
  meta.kind = ColumnKind::kCategorical;
  meta.categories = std::move(categories);
  return meta;
}

ColumnMeta ColumnMeta::Continuous(std::string name, double range_min,
                                  double range_max) {
  ColumnMeta meta;
  meta.name = std::move(name);
  meta.kind = ColumnKind::kContinuous;
  meta.range_min = range_min;
  meta.range_max = range_max;
  return meta;
}

absl::StatusOr<TableSchema> TableSchema::Create(std::vector<ColumnMeta> columns,
                                                const std::string& target) {
  if (columns.empty()) {
    return absl::InvalidArgumentError("schema has no columns");
  }
  std::set<std::string> names;
  for (const ColumnMeta& column : columns) {
    if (!names.insert(column.name).second) {
      return absl::InvalidArgumentError(
          absl::StrFormat("duplicate column name '%s'", column.name));
    }
    if (column.is_categorical()) {
      if (column.categories.empty()) {
        return absl::InvalidArgumentError(absl::StrFormat(
            "categorical column '%s' has no categories", column.name));
      }
      std::set<std::string> unique(column.categories.begin(),
                                   column.categories.end());
      if (unique.size() != column.categories.size()) {
        return absl::InvalidArgumentError(absl::StrFormat(
            "categorical column '%s' repeats a category", column.name));
      }
    } else {
      if (!column.categories.empty()) {
        return absl::InvalidArgumentError(absl::StrFormat(
            "continuous column '%s' declares categories", column.name));
      }
      if (!std::isfinite(column.range_min) ||
          !std::isfinite(column.range_max) ||
          !(column.range_min < column.range_max)) {
        return absl::InvalidArgumentError(absl::StrFormat(
            "continuous column '%s' needs range_min < range_max, got [%g, %g]",
            column.name, column.range_min, column.range_max));
      }
    }
  }
  TableSchema schema;
  schema.columns_ = std::move(columns);
  const std::optional<int> target_index = schema.FindColumn(target);
  if (!target_index.has_value()) {
    return absl::InvalidArgumentError(
        absl::StrFormat("target column '%s' not in schema", target));
  }
  const ColumnMeta& target_meta = schema.columns_[*target_index];
  if (!target_meta.is_categorical() || target_meta.num_categories() != 2) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "target column '%s' must be categorical with exactly 2 categories",
        target));
  }
  schema.target_index_ = *target_index;
  return schema;
}

std::optional<int> TableSchema::FindColumn(const std::string& name) const {
  for (int i = 0; i < num_columns(); ++i) {
    if (columns_[i].name == name) return i;
  }
  return std::nullopt;
}

std::vector<int> TableSchema::CategoricalColumns() const {
  std::vector<int> out;
  for (int i = 0; i < num_columns(); ++i) {
    if (columns_[i].is_categorical()) out.push_back(i);
  }
  return out;
}

std::vector<int> TableSchema::ContinuousColumns() const {
  std::vector<int> out;
  for (int i = 0; i < num_columns(); ++i) {
    if (!columns_[i].is_categorical()) out.push_back(i);
  }
  return out;
}

TableSchema TableSchema::WithTargetOrder(const std::array<int, 2>& order) const {
  TableSchema copy = *this;
  std::vector<std::string>& categories = copy.columns_[target_index_].categories;
  const std::vector<std::string> old = categories;
  categories = {old[order[0]], old[order[1]]};
  return copy;
}

absl::StatusOr<DataTable> DataTable::Create(TableSchema schema,
                                            std::vector<double> cells) {
  const int columns = schema.num_columns();
  if (columns == 0) return absl::InvalidArgumentError("schema has no columns");
  if (cells.size() % columns != 0) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "cell count %d is not a multiple of column count %d", cells.size(),
        columns));
  }
  const int rows = static_cast<int>(cells.size() / columns);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < columns; ++c) {
      const double value = cells[static_cast<size_t>(r) * columns + c];
      const ColumnMeta& meta = schema.column(c);
      if (!std::isfinite(value)) {
        return absl::InvalidArgumentError(absl::StrFormat(
            "row %d column '%s': non-finite value", r, meta.name));
      }
      if (meta.is_categorical()) {
        if (value != std::floor(value) || value < 0 ||
            value >= meta.num_categories()) {
          return absl::InvalidArgumentError(absl::StrFormat(
              "row %d column '%s': category code %g outside [0, %d)", r,
              meta.name, value, meta.num_categories()));
        }
      } else if (value < meta.range_min || value > meta.range_max) {
        return absl::OutOfRangeError(absl::StrFormat(
            "row %d column '%s': value %g outside range [%g, %g]", r,
            meta.name, value, meta.range_min, meta.range_max));
      }
    }
  }
  return DataTable(std::move(schema), std::move(cells), rows);
}

std::vector<int> DataTable::Labels() const {
  std::vector<int> labels(num_rows_);
  for (int r = 0; r < num_rows_; ++r) labels[r] = label(r);
  return labels;
}

std::array<int, 2> DataTable::ClassCounts() const {
  std::array<int, 2> counts = {0, 0};
  for (int r = 0; r < num_rows_; ++r) ++counts[label(r)];
  return counts;
}

std::vector<double> DataTable::ColumnValues(int column) const {
  std::vector<double> values(num_rows_);
  for (int r = 0; r < num_rows_; ++r) values[r] = at(r, column);
  return values;
}

DataTable DataTable::SelectRows(std::span<const int> rows) const {
  const int columns = num_columns();
  std::vector<double> cells;
  cells.reserve(rows.size() * columns);
  for (int r : rows) {
    const auto source = row(r);
    cells.insert(cells.end(), source.begin(), source.end());
  }
  return DataTable(schema_, std::move(cells), static_cast<int>(rows.size()));
}

DataTable DataTable::WithCell(int row, int column, double value) const {
  DataTable copy = *this;
  copy.cells_[static_cast<size_t>(row) * num_columns() + column] = value;
  return copy;
}

DataTable DataTable::Concat(const DataTable& other) const {
  DataTable copy = *this;
  copy.cells_.insert(copy.cells_.end(), other.cells_.begin(),
                     other.cells_.end());
  copy.num_rows_ += other.num_rows_;
  return copy;
}

DataTable CanonicalizeTarget(const DataTable& table) {
  const std::array<int, 2> counts = table.ClassCounts();
  if (counts[0] >= counts[1]) return table;
  const int target = table.schema().target_index();
  std::vector<double> cells = table.cells();
  const int columns = table.num_columns();
  for (int r = 0; r < table.num_rows(); ++r) {
    double& cell = cells[static_cast<size_t>(r) * columns + target];
    cell = 1.0 - cell;
  }
  return *DataTable::Create(table.schema().WithTargetOrder({1, 0}),
                            std::move(cells));
}

}  // namespace dpsynth
