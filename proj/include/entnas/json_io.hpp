// Copyright 2026 The entnas Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <nlohmann/json.hpp>
#include <string>

#include "entnas/archspace.hpp"
#include "entnas/costmodel.hpp"
#include "entnas/entropy.hpp"
#include "entnas/evosearch.hpp"

namespace entnas {

// All documents carry "schema": 1 and are written with a fixed key order, so
// write -> read -> write is byte-identical.
using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

Json arch_to_json(const ArchConfig& arch);
ArchConfig arch_from_json(const Json& j);

/// Choice sets are written as arrays; on input a set may also be given as
/// {"min": a, "max": b, "step": s}.
Json space_to_json(const SearchSpaceDef& space);
SearchSpaceDef space_from_json(const Json& j);

Json entropy_config_to_json(const EntropyConfig& cfg);
EntropyConfig entropy_config_from_json(const Json& j);

/// Table document: meta first, then sorted [rows, cols, value] triples.
Json table_to_json(const EntropyTable& table);
EntropyTable table_from_json(const Json& j);

Json profile_to_json(const DeviceProfile& profile);
DeviceProfile profile_from_json(const Json& j);

Json budget_to_json(const BudgetSpec& budget);
BudgetSpec budget_from_json(const Json& j);

Json search_config_to_json(const SearchConfig& cfg);
/// Missing fields keep the values already in `base`.
SearchConfig search_config_from_json(const Json& j, SearchConfig base = {});

Json score_to_json(const ScoreBreakdown& score);
Json cost_report_to_json(const CostReport& report);
std::string cost_report_table(const CostReport& report);

Json candidate_to_json(const Candidate& c);
Json search_result_to_json(const SearchResult& result);

/// generation,best_score,mean_score,best_cost
std::string history_csv(const SearchResult& result);

/// Throws IoError when the file cannot be read and SchemaError when it does
/// not parse.
Json read_json_file(const std::filesystem::path& path);
std::string read_text_file(const std::filesystem::path& path);

/// Writes dump(2) plus a trailing newline, via a temporary file and rename.
void write_json_file(const std::filesystem::path& path, const Json& j);
void write_text_file(const std::filesystem::path& path, const std::string& text);

EntropyTable load_table(const std::filesystem::path& path);
void save_table(const std::filesystem::path& path, const EntropyTable& table);

}  // namespace entnas
