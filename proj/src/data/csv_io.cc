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

#include "dpsynth/data/csv_io.h"

#include <charconv>
#include <fstream>
#include <sstream>

#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "dpsynth/base/status_macros.h"

namespace dpsynth {
namespace {

std::string QuoteIfNeeded(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string quoted = "\"";
  for (char c : field) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  return quoted + "\"";
}

std::string Trim(const std::string& s) {
  const size_t begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const size_t end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

}  // namespace

nlohmann::json SchemaToJson(const TableSchema& schema) {
  nlohmann::json columns = nlohmann::json::array();
  for (const ColumnMeta& meta : schema.columns()) {
    nlohmann::json column = {{"name", meta.name}};
    if (meta.is_categorical()) {
      column["type"] = "categorical";
      column["categories"] = meta.categories;
    } else {
      column["type"] = "continuous";
      column["min"] = meta.range_min;
      column["max"] = meta.range_max;
    }
    columns.push_back(std::move(column));
  }
  return {{"target", schema.target_name()}, {"columns", std::move(columns)}};
}

absl::StatusOr<TableSchema> SchemaFromJson(const nlohmann::json& json) {
  if (!json.is_object() || !json.contains("columns") ||
      !json["columns"].is_array() || !json.contains("target") ||
      !json["target"].is_string()) {
    return absl::InvalidArgumentError(
        "malformed metadata: expected {\"target\": ..., \"columns\": [...]}");
  }
  std::vector<ColumnMeta> columns;
  for (const nlohmann::json& column : json["columns"]) {
    if (!column.contains("name") || !column.contains("type")) {
      return absl::InvalidArgumentError(
          "malformed metadata: column without name/type");
    }
    const std::string name = column["name"].get<std::string>();
    const std::string type = column["type"].get<std::string>();
    if (type == "categorical") {
      if (!column.contains("categories") || !column["categories"].is_array()) {
        return absl::InvalidArgumentError(absl::StrFormat(
            "malformed metadata: categorical column '%s' lacks categories",
            name));
      }
      std::vector<std::string> categories;
      for (const nlohmann::json& category : column["categories"]) {
        categories.push_back(category.is_string() ? category.get<std::string>()
                                                  : category.dump());
      }
      columns.push_back(ColumnMeta::Categorical(name, std::move(categories)));
    } else if (type == "continuous") {
      if (!column.contains("min") || !column.contains("max") ||
          !column["min"].is_number() || !column["max"].is_number()) {
        return absl::InvalidArgumentError(absl::StrFormat(
            "missing range metadata for continuous column '%s'", name));
      }
      columns.push_back(ColumnMeta::Continuous(name, column["min"].get<double>(),
                                               column["max"].get<double>()));
    } else {
      return absl::InvalidArgumentError(absl::StrFormat(
          "malformed metadata: column '%s' has unknown type '%s'", name, type));
    }
  }
  return TableSchema::Create(std::move(columns),
                             json["target"].get<std::string>());
}

absl::StatusOr<TableSchema> LoadSchema(const std::string& meta_path) {
  std::ifstream input(meta_path);
  if (!input) {
    return absl::NotFoundError(
        absl::StrFormat("cannot open metadata file %s", meta_path));
  }
  nlohmann::json json = nlohmann::json::parse(input, nullptr, false);
  if (json.is_discarded()) {
    return absl::InvalidArgumentError(
        absl::StrFormat("malformed metadata: %s is not valid JSON", meta_path));
  }
  return SchemaFromJson(json);
}

absl::Status WriteSchema(const TableSchema& schema, const std::string& path) {
  std::ofstream output(path);
  if (!output) {
    return absl::InternalError(absl::StrFormat("cannot write %s", path));
  }
  output << SchemaToJson(schema).dump(2) << "\n";
  return absl::OkStatus();
}

absl::StatusOr<std::vector<std::vector<std::string>>> ParseCsv(
    std::istream& input) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  char c;
  while (input.get(c)) {
    if (in_quotes) {
      if (c == '"') {
        if (input.peek() == '"') {
          input.get(c);
          field += '"';
        } else {
          in_quotes = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"') {
      in_quotes = true;
      field_started = true;
    } else if (c == ',') {
      record.push_back(std::move(field));
      field.clear();
      field_started = true;
    } else if (c == '\n') {
      if (field_started || !field.empty() || !record.empty()) {
        record.push_back(std::move(field));
        records.push_back(std::move(record));
      }
      record.clear();
      field.clear();
      field_started = false;
    } else if (c != '\r') {
      field += c;
      field_started = true;
    }
  }
  if (in_quotes) return absl::InvalidArgumentError("unterminated quoted field");
  if (field_started || !field.empty() || !record.empty()) {
    record.push_back(std::move(field));
    records.push_back(std::move(record));
  }
  return records;
}

absl::StatusOr<DataTable> ParseTable(std::istream& input,
                                     const TableSchema& schema) {
  ASSIGN_OR_RETURN(std::vector<std::vector<std::string>> records,
                   ParseCsv(input));
  if (records.empty()) return absl::FailedPreconditionError("empty dataset");
  const std::vector<std::string>& header = records.front();
  const int columns = schema.num_columns();
  if (static_cast<int>(header.size()) != columns) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "schema mismatch: CSV header has %d columns, metadata declares %d",
        header.size(), columns));
  }
  for (int c = 0; c < columns; ++c) {
    if (Trim(header[c]) != schema.column(c).name) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "schema mismatch: CSV column %d is '%s', metadata expects '%s'", c,
          Trim(header[c]), schema.column(c).name));
    }
  }
  if (records.size() == 1) {
    return absl::FailedPreconditionError("empty dataset");
  }
  std::vector<double> cells;
  cells.reserve((records.size() - 1) * columns);
  for (size_t r = 1; r < records.size(); ++r) {
    const std::vector<std::string>& record = records[r];
    const int data_row = static_cast<int>(r) - 1;
    if (static_cast<int>(record.size()) != columns) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "schema mismatch: row %d has %d fields, expected %d", data_row,
          record.size(), columns));
    }
    for (int c = 0; c < columns; ++c) {
      const ColumnMeta& meta = schema.column(c);
      const std::string field = Trim(record[c]);
      if (field.empty() || field == "?" || field == "NA" || field == "NaN") {
        return absl::InvalidArgumentError(absl::StrFormat(
            "missing value at row %d column '%s'", data_row, meta.name));
      }
      if (meta.is_categorical()) {
        int code = -1;
        for (int k = 0; k < meta.num_categories(); ++k) {
          if (meta.categories[k] == field) {
            code = k;
            break;
          }
        }
        if (code < 0) {
          return absl::InvalidArgumentError(absl::StrFormat(
              "unknown category '%s' at row %d column '%s'", field, data_row,
              meta.name));
        }
        cells.push_back(code);
      } else {
        double value = 0.0;
        const auto [ptr, ec] =
            std::from_chars(field.data(), field.data() + field.size(), value);
        if (ec != std::errc() || ptr != field.data() + field.size()) {
          return absl::InvalidArgumentError(absl::StrFormat(
              "non-numeric value '%s' at row %d column '%s'", field, data_row,
              meta.name));
        }
        if (value < meta.range_min || value > meta.range_max) {
          return absl::OutOfRangeError(absl::StrFormat(
              "value %s at row %d column '%s' outside declared range [%g, %g]",
              field, data_row, meta.name, meta.range_min, meta.range_max));
        }
        cells.push_back(value);
      }
    }
  }
  ASSIGN_OR_RETURN(DataTable table, DataTable::Create(schema, std::move(cells)));
  return CanonicalizeTarget(table);
}

absl::StatusOr<DataTable> LoadTable(const std::string& csv_path,
                                    const std::string& meta_path) {
  ASSIGN_OR_RETURN(TableSchema schema, LoadSchema(meta_path));
  std::ifstream input(csv_path, std::ios::binary);
  if (!input) {
    return absl::NotFoundError(absl::StrFormat("cannot open %s", csv_path));
  }
  return ParseTable(input, schema);
}

std::string FormatCell(const ColumnMeta& meta, double value) {
  if (meta.is_categorical()) {
    return QuoteIfNeeded(meta.categories[static_cast<int>(value)]);
  }
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

void WriteTableCsv(const DataTable& table, std::ostream& output) {
  const TableSchema& schema = table.schema();
  std::vector<std::string> fields;
  for (const ColumnMeta& meta : schema.columns()) {
    fields.push_back(QuoteIfNeeded(meta.name));
  }
  output << absl::StrJoin(fields, ",") << "\n";
  for (int r = 0; r < table.num_rows(); ++r) {
    fields.clear();
    for (int c = 0; c < table.num_columns(); ++c) {
      fields.push_back(FormatCell(schema.column(c), table.at(r, c)));
    }
    output << absl::StrJoin(fields, ",") << "\n";
  }
}

absl::Status WriteTableCsv(const DataTable& table, const std::string& path) {
  std::ofstream output(path, std::ios::binary);
  if (!output) {
    return absl::InternalError(absl::StrFormat("cannot write %s", path));
  }
  WriteTableCsv(table, output);
  return absl::OkStatus();
}

}  // namespace dpsynth
