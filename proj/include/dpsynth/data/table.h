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

#ifndef DPSYNTH_DATA_TABLE_H_
#define DPSYNTH_DATA_TABLE_H_

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"

namespace dpsynth {

enum class ColumnKind { kCategorical, kContinuous };

// Public per-column metadata. Continuous ranges are treated as non-private
// knowledge and are the only input to the uniform binner.
struct ColumnMeta {
  std::string name;
  ColumnKind kind = ColumnKind::kContinuous;
  std::vector<std::string> categories;  // categorical only
  double range_min = 0.0;               // continuous only
  double range_max = 0.0;               // continuous only

  static ColumnMeta Categorical(std::string name,
                                std::vector<std::string> categories);
  static ColumnMeta Continuous(std::string name, double range_min,
                               double range_max);

  bool is_categorical() const { return kind == ColumnKind::kCategorical; }
  int num_categories() const { return static_cast<int>(categories.size()); }
  double range_width() const { return range_max - range_min; }

  bool operator==(const ColumnMeta&) const = default;
};

// Ordered column list plus the binary target column. Column order defines
// the encoding order everywhere downstream.
class TableSchema {
 public:
  TableSchema() = default;

  static absl::StatusOr<TableSchema> Create(std::vector<ColumnMeta> columns,
                                            const std::string& target);

  const std::vector<ColumnMeta>& columns() const { return columns_; }
  const ColumnMeta& column(int index) const { return columns_[index]; }
  int num_columns() const { return static_cast<int>(columns_.size()); }
  int target_index() const { return target_index_; }
  const std::string& target_name() const { return columns_[target_index_].name; }
  std::optional<int> FindColumn(const std::string& name) const;

  std::vector<int> CategoricalColumns() const;
  std::vector<int> ContinuousColumns() const;

  // Returns a copy whose target categories are permuted by `order`
  // (new code i holds old category order[i]).
  TableSchema WithTargetOrder(const std::array<int, 2>& order) const;

  bool operator==(const TableSchema&) const = default;

 private:
  std::vector<ColumnMeta> columns_;
  int target_index_ = -1;
};

// Immutable mixed-type table. Cells are stored row-major as doubles;
// categorical cells hold the category code.
class DataTable {
 public:
  DataTable() = default;

  // Validates every cell against `schema`. An empty table is permitted here
  // (e.g. a Poisson lot with q = 0); loaders reject empty files separately.
  static absl::StatusOr<DataTable> Create(TableSchema schema,
                                          std::vector<double> cells);

  const TableSchema& schema() const { return schema_; }
  int num_rows() const { return num_rows_; }
  int num_columns() const { return schema_.num_columns(); }
  bool empty() const { return num_rows_ == 0; }

  double at(int row, int column) const {
    return cells_[static_cast<size_t>(row) * num_columns() + column];
  }
  std::span<const double> row(int r) const {
    return {cells_.data() + static_cast<size_t>(r) * num_columns(),
            static_cast<size_t>(num_columns())};
  }
  const std::vector<double>& cells() const { return cells_; }

  // Target code of row `r`: 0 for the majority class at load time, 1 for
  // the minority class.
  int label(int r) const { return static_cast<int>(at(r, schema_.target_index())); }
  std::vector<int> Labels() const;
  std::array<int, 2> ClassCounts() const;

  std::vector<double> ColumnValues(int column) const;
  DataTable SelectRows(std::span<const int> rows) const;
  DataTable WithCell(int row, int column, double value) const;
  DataTable Concat(const DataTable& other) const;

  bool operator==(const DataTable&) const = default;

 private:
  DataTable(TableSchema schema, std::vector<double> cells, int rows)
      : schema_(std::move(schema)), cells_(std::move(cells)), num_rows_(rows) {}

  TableSchema schema_;
  std::vector<double> cells_;
  int num_rows_ = 0;
};

// Re-encodes the target so that code 0 is the more frequent class. Ties keep
// the declared category order.
DataTable CanonicalizeTarget(const DataTable& table);

}  // namespace dpsynth

#endif  // DPSYNTH_DATA_TABLE_H_
