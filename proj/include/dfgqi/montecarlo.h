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

#ifndef DFGQI_MONTECARLO_H
#define DFGQI_MONTECARLO_H

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dfgqi/detection.h"
#include "dfgqi/rng.h"
#include "dfgqi/scenario.h"
#include "dfgqi/timebin.h"

namespace dfgqi {

/// Substream purposes. A point's stream key is derive_stream(seed, value_label(x), purpose).
enum class Stream : std::uint64_t {
    source = 1,
    conversion,
    pump_walk,
    slot,
    pulse_shape,
    cw,
    noise,
    detector,
    dark_run,
};

CounterRng point_stream(std::uint64_t seed, double point_value, Stream purpose);

/// Draws Poisson(pulses * mean) photons and assigns each to a uniformly chosen
/// pulse, which makes the per-pulse occupancy i.i.d. Poisson(mean).
/// Returns the sorted pulse indices.
std::vector<std::uint64_t> sample_photon_pulses(std::uint64_t pulses, double mean, CounterRng &rng);

/// occupancy[k] = number of pulses holding exactly k photons.
std::vector<std::uint64_t> occupancy_from_indices(std::span<const std::uint64_t> sorted_indices,
                                                  std::uint64_t pulses);

std::vector<std::uint64_t> photon_number_histogram(double mean, std::uint64_t pulses, CounterRng &rng);

/// Pump phase accumulated between the early and late bin: `steps` Gaussian
/// increments of variance 2 dt / tau_c, dt = delta_tau / steps.
double pump_phase_walk(double delta_tau_ns, double coherence_time_ns, int steps, CounterRng &rng);

struct FringePoint {
    double phase_rad = 0;
    std::uint64_t counts = 0;
    double stat_error = 0;
    /// Window counts from dark, cw, noise and afterpulse events.
    std::uint64_t background = 0;
    double leakage_fraction = 0;

    bool operator==(const FringePoint &) const = default;
};

struct RunMetadata {
    std::uint64_t seed = 0;
    std::string scenario_digest;
    std::uint64_t pulses_per_point = 0;
    std::string version;
    double wall_clock_s = 0;
};

struct RunResult {
    /// Merged over all points.
    TacHistogram histogram;
    std::vector<FringePoint> fringe;
    /// Source photons and photons leaving the interface, summed over points.
    std::uint64_t photons_in = 0;
    std::uint64_t photons_out = 0;
    /// Pulses holding k converted photons, summed over points.
    std::vector<std::uint64_t> occupancy;
    RunMetadata metadata;

    double eta_qi_realized() const;
    /// Mean per-point background, for extract_visibility.
    double mean_background() const;
    std::vector<FringeSample> samples() const;
};

/// Equality of every simulated quantity; wall-clock time is ignored.
bool same_outcome(const RunResult &a, const RunResult &b);

/// Throws DomainError unless at least two phase points are given.
RunResult run_fringe_scan(const Scenario &s, std::span<const double> phases_rad);

/// One point at the analysis phase of the scenario.
RunResult run_histogram(const Scenario &s);

struct EfficiencyRow {
    double power_w;
    double eta_analytic;
    double eta_mc;
    double stat_error;
    double attenuation_db;
};

/// Reproduces the count-rate measurement: cw signal of signal_power_w,
/// attenuation set for sweep_target_rate_hz detected, dead-time correction
/// and subtraction of a separate dark run.
std::vector<EfficiencyRow> run_efficiency_sweep(const Scenario &s, std::span<const double> powers_w);

struct ScaExpectation {
    double signal = 0;
    double cw = 0;
    double dark = 0;
    double noise = 0;
    /// Applied to all terms above.
    double dead_time_factor = 1;

    double background() const {
        return cw + dark + noise;
    }
    double total() const {
        return signal + background();
    }
};

/// Mean SCA window counts per point at analysis phase beta, dead time included.
ScaExpectation expected_sca_counts(const Scenario &s, double beta_rad);

/// Sinusoid fit to the expected SCA counts over beta.
FringeOracle scenario_fringe_oracle(const Scenario &s);

/// Replaces pump coherence time, cw fraction and dark rate so that the
/// calibration targets hold. Throws DomainError if a target is unreachable.
void apply_calibration(Scenario &s);

inline constexpr double kOracleFlagSigma = 4.0;

struct OracleRow {
    double phase_rad;
    double observed;
    double expected;
    double z;
    bool flagged;
};

struct OracleReport {
    std::vector<OracleRow> rows;
    double chi2 = 0;
    std::size_t dof = 0;
    /// Undefined when no point has a nonzero expectation.
    std::optional<double> chi2_per_dof;
    std::size_t flagged = 0;
};

OracleReport validate_against_oracle(const RunResult &result, const std::function<double(double)> &expected);
OracleReport validate_against_oracle(const Scenario &s, std::span<const double> phases_rad);

}  // namespace dfgqi

#endif
