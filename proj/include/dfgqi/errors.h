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

#ifndef DFGQI_ERRORS_H
#define DFGQI_ERRORS_H

#include <stdexcept>
#include <string>

namespace dfgqi {

/// An argument violated a documented precondition (range, ordering, sign).
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

/// A numeric procedure (root finding, fitting, unfolding) has no valid answer.
struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A configuration file could not be read or violates an invariant.
/// The message always names the file and, when known, the offending key.
struct ConfigError : std::runtime_error {
    ConfigError(const std::string &file, const std::string &key, const std::string &what)
        : std::runtime_error(file + (key.empty() ? "" : ": key '" + key + "'") + ": " + what),
          file(file),
          key(key) {
    }
    std::string file;
    std::string key;
};

}  // namespace dfgqi

#endif
