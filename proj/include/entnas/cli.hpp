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

namespace entnas::cli {

// Process exit codes.
inline constexpr int kOk = 0;
inline constexpr int kFailure = 1;  // infeasible budget or search failure
inline constexpr int kUsage = 2;    // bad flags, malformed or stale inputs
inline constexpr int kIo = 3;

/// Environment variable naming the default entropy-table cache directory.
inline constexpr const char* kCacheDirEnv = "ENTNAS_CACHE_DIR";

int run(int argc, char** argv);

}  // namespace entnas::cli
