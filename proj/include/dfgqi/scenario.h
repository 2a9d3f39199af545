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

#ifndef DFGQI_SCENARIO_H
#define DFGQI_SCENARIO_H

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dfgqi/conversion.h"
#include "dfgqi/detection.h"
#include "dfgqi/qpm.h"
#include "dfgqi/repeater.h"
#include "dfgqi/timebin.h"

namespace dfgqi {

/// Inclusive linear grid of `n` values from start to stop.
struct Grid {
    double start = 0.0;
    double stop = 0.0;
    std::size_t n = 0;

    std::vector<double> values() const;
    /// Parses "start:stop:n". Throws DomainError.
    static Grid parse(std::string_view text);

    bool operator==(const Grid &) const = default;
};

enum class PulseShape { gaussian, square };

/// Attenuated pulsed laser feeding the preparation interferometer, plus the
/// residual cw emission of the same diode.
struct PulseSource {
    double repetition_rate_mhz = 60.0;
    double pulse_fwhm_ns = 1.0;
    PulseShape shape = PulseShape::gaussian;
    double mean_photon_number = 1.0;
    double coherence_time_ns = 0.01;
    /// cw photon rate as a fraction of the pulsed photon rate.
    double cw_fraction = 0.0;

    double period_ns() const {
        return 1e3 / repetition_rate_mhz;
    }
    void validate() const;
    /// Soft violations: pulses longer than, or coherent over, the bin separation.
    std::vector<std::string> warnings(double delta_tau_ns) const;

    bool operator==(const PulseSource &) const = default;
};

/// Optional targets that, when present, replace the listed pump coherence
/// time, cw fraction and dark-count rate with values that realise them.
struct Calibration {
    std::optional<double> net_visibility;
    std::optional<double> cw_share_of_peak;
    std::optional<double> background_to_signal;

    bool operator==(const Calibration &) const = default;
};

/// One simulated experiment: source, interferometers, interface, detector,
/// TAC, and the run budget. Loaded from a YAML `.scenario` file whose keys
/// are listed in scenarios/README.md.
struct Scenario {
    std::string name;
    std::uint64_t seed = 1;

    PulseSource source;
    double signal_wavelength_um = 0.710;
    /// cw signal power at the interface input during efficiency measurements.
    double signal_power_w = 250e-6;

    Interferometer preparation;
    Interferometer analysis;

    std::string sellmeier_file;
    SellmeierModel sellmeier;
    QpmConfig qpm;

    PumpField pump;
    double eta_norm_per_w_cm2 = 0.13;
    LossChain chain_pre;
    LossChain chain_post;
    std::size_t waveguide_post_stages = 0;

    NoiseModel noise;
    DetectorModel detector;

    /// Arrival time of the early peak within the sync period.
    double tac_offset_ns = 3.0;
    double bin_width_ps = 20.0;
    ScaWindow sca;

    std::uint64_t pulses_per_point = 1'000'000;
    int phase_walk_steps = 16;
    Grid phases;

    double sweep_duration_s = 10.0;
    double sweep_target_rate_hz = 4400.0;
    Grid powers;

    Calibration calibration;

    LinkConfig link;
    Grid lengths_km;

    /// Throws DomainError describing the first violated invariant.
    void validate() const;

    double output_wavelength_um() const;
    double eta_qi() const;
    PeakShape peak_shape() const;

    bool operator==(const Scenario &) const = default;
};

/// Reads and validates a scenario file, resolves the Sellmeier file relative
/// to the scenario's directory and applies any calibration targets.
/// Throws ConfigError naming file, key and violated invariant.
Scenario load_scenario(const std::filesystem::path &path);

/// Same as load_scenario, from text; `base_dir` anchors relative paths.
Scenario parse_scenario(const std::string &text,
                        const std::filesystem::path &base_dir,
                        const std::string &source_name = "<scenario>");

/// Canonical YAML form; parse_scenario(serialize_scenario(s)) == s.
std::string serialize_scenario(const Scenario &s);

/// First 12 hex digits of the SHA-256 of the canonical form.
std::string scenario_digest(const Scenario &s);

}  // namespace dfgqi

#endif
