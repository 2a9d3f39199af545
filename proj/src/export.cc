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

#include "dfgqi/export.h"

#include <fstream>
#include <stdexcept>

#include <fmt/format.h>

namespace dfgqi {

namespace {

std::string header(const CsvMetadata &meta, const char *columns) {
    std::string out;
    for (const auto &[k, v] : meta) {
        out += fmt::format("# {}: {}\n", k, v);
    }
    out += columns;
    out += '\n';
    return out;
}

// Shortest representation that reads back to the same double.
std::string num(double x) {
    return fmt::format("{}", x);
}

}  // namespace

CsvMetadata run_metadata(const RunMetadata &m) {
    return {{"scenario_digest", m.scenario_digest},
            {"seed", fmt::format("{}", m.seed)},
            {"pulses_per_point", fmt::format("{}", m.pulses_per_point)},
            {"version", m.version}};
}

std::string fringe_csv(std::span<const FringePoint> points, const CsvMetadata &meta) {
    std::string out = header(meta, "phase_rad,counts,stat_error");
    for (const auto &p : points) {
        out += fmt::format("{},{},{}\n", num(p.phase_rad), p.counts, num(p.stat_error));
    }
    return out;
}

std::string histogram_csv(const TacHistogram &h, const CsvMetadata &meta) {
    std::string out = header(meta, "bin_start_ns,bin_end_ns,counts");
    for (std::size_t i = 0; i < h.counts.size(); ++i) {
        out += fmt::format("{},{},{}\n", num(h.bin_start_ns(i)), num(h.bin_end_ns(i)), h.counts[i]);
    }
    return out;
}

std::string efficiency_csv(std::span<const EfficiencyRow> rows, const CsvMetadata &meta) {
    std::string out = header(meta, "power_w,eta_qi_analytic,eta_qi_mc,stat_error");
    for (const auto &r : rows) {
        out += fmt::format("{},{},{},{}\n", num(r.power_w), num(r.eta_analytic), num(r.eta_mc), num(r.stat_error));
    }
    return out;
}

std::string repeater_csv(std::span<const RateRow> rows, const CsvMetadata &meta) {
    std::string out = header(meta, "length_km,p_with,p_without,rate_with_hz,rate_without_hz,ratio");
    for (const auto &r : rows) {
        out += fmt::format("{},{},{},{},{},{}\n", num(r.length_km), num(r.p_with), num(r.p_without),
                           num(r.rate_with_hz), num(r.rate_without_hz), num(r.ratio));
    }
    return out;
}

std::string artifact_name(const std::string &digest, const std::string &kind) {
    return digest + "-" + kind + ".csv";
}

void write_text_file(const std::filesystem::path &path, const std::string &content) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw std::runtime_error(fmt::format("cannot open {} for writing", tmp.string()));
        }
        out << content;
        out.flush();
        if (!out) {
            throw std::runtime_error(fmt::format("write to {} failed", tmp.string()));
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw std::runtime_error(fmt::format("cannot move output into place at {}", path.string()));
    }
}

}  // namespace dfgqi
