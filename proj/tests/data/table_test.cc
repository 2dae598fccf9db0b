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

#include "gmock/gmock.h"
#include "gtest/gtest.h"

namespace dpsynth {
namespace {

using ::testing::HasSubstr;

TEST(TableSchemaTest, RejectsDuplicateNames) {
  auto schema = TableSchema::Create({ColumnMeta::Continuous("a", 0, 1),
                                     ColumnMeta::Categorical("a", {"x", "y"})},
                                    "a");
  ASSERT_FALSE(schema.ok());
  EXPECT_THAT(schema.status().message(), HasSubstr("duplicate"));
}

TEST(TableSchemaTest, RejectsEmptyRangeAndNonBinaryTarget) {
  EXPECT_FALSE(TableSchema::Create({ColumnMeta::Continuous("a", 1, 1),
                                    ColumnMeta::Categorical("y", {"0", "1"})},
                                   "y")
                   .ok());
  EXPECT_FALSE(
      TableSchema::Create({ColumnMeta::Categorical("y", {"0", "1", "2"})}, "y")
          .ok());
  EXPECT_FALSE(
      TableSchema::Create({ColumnMeta::Categorical("y", {"0", "1"})}, "z").ok());
  EXPECT_FALSE(TableSchema::Create({ColumnMeta::Categorical("c", {}),
                                    ColumnMeta::Categorical("y", {"0", "1"})},
                                   "y")
                   .ok());
}

TEST(DataTableTest, ValidatesCells) {
  TableSchema schema =
      *TableSchema::Create({ColumnMeta::Continuous("x", 0, 10),
                            ColumnMeta::Categorical("y", {"a", "b"})},
                           "y");
  EXPECT_TRUE(DataTable::Create(schema, {0.0, 1, 10.0, 0}).ok());
  auto out_of_range = DataTable::Create(schema, {11.0, 1});
  ASSERT_FALSE(out_of_range.ok());
  EXPECT_THAT(out_of_range.status().message(), HasSubstr("row 0 column 'x'"));
  EXPECT_FALSE(DataTable::Create(schema, {1.0, 2}).ok());
  EXPECT_FALSE(DataTable::Create(schema, {1.0, 0.5}).ok());
  EXPECT_FALSE(DataTable::Create(schema, {1.0}).ok());
}

TEST(DataTableTest, CanonicalizeTargetPutsMajorityFirst) {
  TableSchema schema =
      *TableSchema::Create({ColumnMeta::Categorical("y", {"a", "b"})}, "y");
  DataTable table = *DataTable::Create(schema, {0, 1, 1, 1});
  DataTable canonical = CanonicalizeTarget(table);
  EXPECT_EQ(canonical.schema().column(0).categories,
            (std::vector<std::string>{"b", "a"}));
  EXPECT_EQ(canonical.Labels(), (std::vector<int>{1, 0, 0, 0}));
  EXPECT_EQ(CanonicalizeTarget(canonical), canonical);
}

}  // namespace
}  // namespace dpsynth
