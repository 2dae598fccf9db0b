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

#ifndef DPSYNTH_DATA_CSV_IO_H_
#define DPSYNTH_DATA_CSV_IO_H_

#include <iosfwd>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dpsynth/data/table.h"
#include "json.hpp"

namespace dpsynth {

// Metadata sidecar layout:
//   {"target": "label",
//    "columns": [{"name": "age", "type": "continuous", "min": 17, "max": 90},
//                {"name": "job", "type": "categorical",
//                 "categories": ["a", "b"]}]}
nlohmann::json SchemaToJson(const TableSchema& schema);
absl::StatusOr<TableSchema> SchemaFromJson(const nlohmann::json& json);

absl::StatusOr<TableSchema> LoadSchema(const std::string& meta_path);
absl::Status WriteSchema(const TableSchema& schema, const std::string& path);

// Splits RFC 4180 style CSV text into records. Quoted fields may contain
// commas, doubled quotes and newlines.
absl::StatusOr<std::vector<std::vector<std::string>>> ParseCsv(
    std::istream& input);

// Parses CSV text (header + body) against `schema`. The target is re-coded
// so that code 0 is the majority class.
absl::StatusOr<DataTable> ParseTable(std::istream& input,
                                     const TableSchema& schema);

absl::StatusOr<DataTable> LoadTable(const std::string& csv_path,
                                    const std::string& meta_path);

std::string FormatCell(const ColumnMeta& meta, double value);
absl::Status WriteTableCsv(const DataTable& table, const std::string& path);
void WriteTableCsv(const DataTable& table, std::ostream& output);

}  // namespace dpsynth

#endif  // DPSYNTH_DATA_CSV_IO_H_
