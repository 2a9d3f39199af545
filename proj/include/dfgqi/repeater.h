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

#ifndef DFGQI_REPEATER_H
#define DFGQI_REPEATER_H

#include <span>
#include <string_view>
#include <vector>

namespace dfgqi {

/// Heralding class of the elementary link. Interface loss enters the rate
/// linearly for single-photon schemes and quadratically for two-photon ones.
enum class Protocol { single_photon, two_photon };

std::string_view to_string(Protocol p);
/// Accepts "single-photon" / "two-photon". Throws DomainError otherwise.
Protocol parse_protocol(std::string_view s);

/// Illustrative elementary link: two memories, photons meet at a station in
/// the middle. Memory, swap and multimode factors are folded into
/// system_efficiency.
struct LinkConfig {
    double length_km = 50.0;
    double native_attenuation_db_per_km = 4.0;
    double telecom_attenuation_db_per_km = 0.2;
    double interface_efficiency = 0.5;
    double system_efficiency = 1.0;
    Protocol protocol = Protocol::single_photon;
    double attempt_rate_hz = 1e4;

    void validate() const;
    bool operator==(const LinkConfig &) const = default;
};

/// 10^(-alpha L / 10).
double fiber_transmission(double length_km, double attenuation_db_per_km);

/// eta for single-photon heralding, eta^2 for two-photon.
double rate_penalty(double efficiency, Protocol protocol);

struct LinkOutcome {
    double photon_probability;  ///< p, per photon, source to central station
    double link_probability;    ///< 2p(1-p) or p^2
    double rate_hz;
};

LinkOutcome link_success_probability(const LinkConfig &cfg, bool with_interface);

/// Total link length above which converting to telecom beats sending the
/// native wavelength: 20 log10(1/eta) / (alpha_native - alpha_telecom).
/// Throws DomainError unless alpha_native > alpha_telecom and 0 < eta <= 1.
double break_even_distance(double interface_efficiency, double native_db_per_km, double telecom_db_per_km);

struct RateRow {
    double length_km;
    double p_with;
    double p_without;
    double rate_with_hz;
    double rate_without_hz;
    double ratio;
};

/// Rows of the rate-comparison export, one per length.
std::vector<RateRow> rate_comparison(const LinkConfig &cfg, std::span<const double> lengths_km);

}  // namespace dfgqi

#endif
