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

#ifndef DFGQI_EXPORT_H
#define DFGQI_EXPORT_H

#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dfgqi/montecarlo.h"
#include "dfgqi/repeater.h"

namespace dfgqi {

/// Ordered `# key: value` lines written above the CSV header.
using CsvMetadata = std::vector<std::pair<std::string, std::string>>;

CsvMetadata run_metadata(const RunMetadata &m);

std::string fringe_csv(std::span<const FringePoint> points, const CsvMetadata &meta = {});
std::string histogram_csv(const TacHistogram &h, const CsvMetadata &meta = {});
std::string efficiency_csv(std::span<const EfficiencyRow> rows, const CsvMetadata &meta = {});
std::string repeater_csv(std::span<const RateRow> rows, const CsvMetadata &meta = {});

/// `<digest>-<kind>.csv`.
std::string artifact_name(const std::string &digest, const std::string &kind);

/// Writes via a temporary file and rename. Throws std::runtime_error naming the path.
void write_text_file(const std::filesystem::path &path, const std::string &content);

}  // namespace dfgqi

#endif
