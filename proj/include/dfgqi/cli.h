// Copyright 2026 The dfgqi Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DFGQI_CLI_H
#define DFGQI_CLI_H

#include <ostream>
#include <string>
#include <vector>

namespace dfgqi {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumeric = 3;

/// Environment variable naming the default output directory.
inline constexpr const char *kOutDirEnv = "DFGQI_OUT_DIR";

/// Runs one command line (without the program name). Never throws.
int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

}  // namespace dfgqi

#endif
