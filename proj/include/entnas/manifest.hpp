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

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include "entnas/json_io.hpp"

namespace entnas {

/// Hex SHA-256 of a file's bytes. Throws IoError.
std::string sha256_file(const std::filesystem::path& path);
std::string sha256_hex(const std::string& bytes);

/// UTC, ISO-8601 with seconds.
std::string utc_timestamp();

struct RunManifest {
  std::string command;
  Json resolved_config = Json::object();
  std::map<std::string, std::string> input_digests;  // path -> sha256
  std::map<std::string, std::string> output_digests;
  std::string tool_version;
  std::uint64_t seed = 0;
  std::string started_at;
  std::string finished_at;
  double wall_time_s = 0.0;
};

Json manifest_to_json(const RunManifest& m);

}  // namespace entnas
