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

#include "dfgqi/repeater.h"

#include <cmath>
#include <limits>
#include <string>

#include <fmt/format.h>

#include "dfgqi/errors.h"

namespace dfgqi {

std::string_view to_string(Protocol p) {
    return p == Protocol::single_photon ? "single-photon" : "two-photon";
}

Protocol parse_protocol(std::string_view s) {
    if (s == "single-photon") {
        return Protocol::single_photon;
    }
    if (s == "two-photon") {
        return Protocol::two_photon;
    }
    throw DomainError(fmt::format("unknown protocol class '{}' (expected single-photon or two-photon)", s));
}

void LinkConfig::validate() const {
    if (!(length_km >= 0)) {
        throw DomainError(fmt::format("link length must be >= 0, got {} km", length_km));
    }
    if (!(native_attenuation_db_per_km >= 0) || !(telecom_attenuation_db_per_km >= 0)) {
        throw DomainError("fiber attenuations must be >= 0");
    }
    if (!(interface_efficiency >= 0 && interface_efficiency <= 1) ||
        !(system_efficiency >= 0 && system_efficiency <= 1)) {
        throw DomainError("link efficiencies must lie in [0, 1]");
    }
    if (!(attempt_rate_hz >= 0)) {
        throw DomainError(fmt::format("attempt rate must be >= 0, got {} Hz", attempt_rate_hz));
    }
}

double fiber_transmission(double length_km, double attenuation_db_per_km) {
    if (!(length_km >= 0) || !(attenuation_db_per_km >= 0)) {
        throw DomainError(fmt::format("fiber transmission needs L >= 0 and alpha >= 0, got {} km, {} dB/km",
                                      length_km, attenuation_db_per_km));
    }
    return std::pow(10.0, -attenuation_db_per_km * length_km / 10.0);
}

double rate_penalty(double efficiency, Protocol protocol) {
    if (!(efficiency >= 0 && efficiency <= 1)) {
        throw DomainError(fmt::format("efficiency must lie in [0, 1], got {}", efficiency));
    }
    return protocol == Protocol::single_photon ? efficiency : efficiency * efficiency;
}

LinkOutcome link_success_probability(const LinkConfig &cfg, bool with_interface) {
    cfg.validate();
    const double alpha = with_interface ? cfg.telecom_attenuation_db_per_km : cfg.native_attenuation_db_per_km;
    const double eta = with_interface ? cfg.interface_efficiency : 1.0;
    LinkOutcome out;
    out.photon_probability = cfg.system_efficiency * eta * fiber_transmission(0.5 * cfg.length_km, alpha);
    const double p = out.photon_probability;
    out.link_probability = cfg.protocol == Protocol::single_photon ? 2.0 * p * (1.0 - p) : p * p;
    out.rate_hz = cfg.attempt_rate_hz * out.link_probability;
    return out;
}

double break_even_distance(double interface_efficiency, double native_db_per_km, double telecom_db_per_km) {
    if (!(native_db_per_km > telecom_db_per_km)) {
        throw DomainError(fmt::format(
            "conversion never wins on loss alone: native attenuation {} dB/km is not above telecom {} dB/km",
            native_db_per_km, telecom_db_per_km));
    }
    if (!(interface_efficiency > 0 && interface_efficiency <= 1)) {
        throw DomainError(fmt::format("interface efficiency must lie in (0, 1], got {}", interface_efficiency));
    }
    return 20.0 * std::log10(1.0 / interface_efficiency) / (native_db_per_km - telecom_db_per_km);
}

std::vector<RateRow> rate_comparison(const LinkConfig &cfg, std::span<const double> lengths_km) {
    std::vector<RateRow> rows;
    rows.reserve(lengths_km.size());
    for (double length : lengths_km) {
        LinkConfig c = cfg;
        c.length_km = length;
        const auto with = link_success_probability(c, true);
        const auto without = link_success_probability(c, false);
        const double ratio = without.rate_hz > 0 ? with.rate_hz / without.rate_hz
                                                 : std::numeric_limits<double>::infinity();
        rows.push_back({length, with.photon_probability, without.photon_probability, with.rate_hz,
                        without.rate_hz, ratio});
    }
    return rows;
}

}  // namespace dfgqi
