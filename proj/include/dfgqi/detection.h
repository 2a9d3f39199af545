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

#ifndef DFGQI_DETECTION_H
#define DFGQI_DETECTION_H

#include <cstdint>
#include <span>
#include <vector>

#include "dfgqi/rng.h"

namespace dfgqi {

/// Gaussian FWHM <-> standard deviation.
inline constexpr double kFwhmPerSigma = 2.3548200450309493;

struct DetectorModel {
    double efficiency = 0.10;
    double dark_count_rate_hz = 1600.0;
    double dead_time_us = 30.0;
    double jitter_fwhm_ps = 800.0;
    double afterpulse_probability = 0.0;
    /// Mean delay of an afterpulse after the hold-off ends.
    double afterpulse_decay_us = 10.0;

    void validate() const;
    bool operator==(const DetectorModel &) const = default;
};

/// Non-paralyzable dead-time correction R / (1 - R tau).
/// Throws DomainError when R tau >= 1.
double dead_time_correct(double observed_hz, double dead_time_us);

/// Forward non-paralyzable thinning R / (1 + R tau).
double dead_time_thin(double true_hz, double dead_time_us);

/// Photon rate at the interface output implied by a count measurement:
/// (corrected(obs) - corrected(dark)) / QE * 10^(attenuation / 10).
/// Throws SolverError if the dark rate dominates.
double unfold_photon_rate(double observed_hz,
                          double dark_observed_hz,
                          const DetectorModel &det,
                          double attenuation_db);

enum class Origin : std::uint8_t { signal, cw, noise, dark, afterpulse };

struct Arrival {
    double time_ns;
    double survival = 1.0;
    Origin origin = Origin::signal;
};

struct Detection {
    double time_ns;
    Origin origin;

    bool operator==(const Detection &) const = default;
};

/// Free-running detector on [start, start + duration).
/// Arrivals pass with probability QE x survival; Poisson dark counts are
/// merged in; one shared non-paralyzable hold-off gates the merged stream on
/// the true absorption times; surviving events get Gaussian jitter and the
/// output is time sorted. Throws DomainError on unsorted input.
std::vector<Detection> simulate_detection(std::span<const Arrival> arrivals,
                                          const DetectorModel &det,
                                          double duration_ns,
                                          CounterRng &rng,
                                          double start_ns = 0.0);

/// Arrival-time-difference histogram of detections relative to a sync
/// clock of period `period_ns`, folded modulo the period.
struct TacHistogram {
    double bin_width_ps = 20.0;
    double origin_ns = 0.0;
    double period_ns = 0.0;
    std::vector<std::uint64_t> counts;
    std::uint64_t sync_pulses = 0;

    std::uint64_t total() const;
    double bin_start_ns(std::size_t i) const;
    double bin_end_ns(std::size_t i) const;
    double bin_center_ns(std::size_t i) const;
    /// Adds another histogram with identical binning. Throws DomainError otherwise.
    void merge(const TacHistogram &other);

    bool operator==(const TacHistogram &) const = default;
};

/// Position of t within the sync period, measured from `origin_ns`, in [0, period).
double tac_time(double t_ns, double period_ns, double origin_ns);

TacHistogram build_histogram(std::span<const Detection> detections,
                             double period_ns,
                             double bin_width_ps,
                             double origin_ns = 0.0,
                             std::uint64_t sync_pulses = 0);

/// FWHM of the peak nearest `seed_ns`, by linear interpolation at half the
/// local maximum. The peak region is seed +- search_half_width; it must
/// hold at least 100 counts.
double peak_fwhm(const TacHistogram &h, double seed_ns, double search_half_width_ns = 1.0);

struct ScaWindow {
    double center_ns = 0.0;
    double width_ns = 0.5;

    void validate() const;
    bool operator==(const ScaWindow &) const = default;
};

/// Arrival-time profile of one histogram peak: the optical pulse (Gaussian
/// or rectangular of the given FWHM) convolved with Gaussian timing jitter.
struct PeakShape {
    double pulse_fwhm_ns = 1.0;
    bool square_pulse = false;
    double jitter_sigma_ns = 0.0;

    /// Probability that an event from a peak centred at `center_ns` falls in [lo, hi].
    double fraction_in(double lo_ns, double hi_ns, double center_ns) const;
};

struct ScaResult {
    std::uint64_t counts = 0;
    /// Estimated share of `counts` coming from the lateral peaks.
    double leakage_fraction = 0.0;
};

/// Central-peak SCA selection with the side peaks at center +- separation.
/// Peak areas are measured from the events themselves (within half a
/// separation of each peak centre); the leakage estimate then follows from
/// `shape`.
ScaResult sca_counts(std::span<const Detection> detections,
                     double period_ns,
                     double origin_ns,
                     const ScaWindow &window,
                     double separation_ns,
                     const PeakShape &shape);

/// Histogram variant: a bin counts when its centre lies inside the window.
ScaResult sca_counts(const TacHistogram &h,
                     const ScaWindow &window,
                     double separation_ns,
                     const PeakShape &shape);

struct FringeSample {
    double phase_rad;
    double counts;
};

struct VisibilityFit {
    double v_raw = 0;
    double v_net = 0;
    double mean = 0;       ///< A
    double amplitude = 0;  ///< C >= 0
    double phase0_rad = 0;
    /// Poisson-weighted chi^2 per degree of freedom of the sinusoid fit.
    double chi2_per_dof = 0;
    double sigma_v_raw = 0;
    double sigma_v_net = 0;
};

inline constexpr double kDefaultFitChi2Limit = 25.0;

/// Least-squares fit N = A + C cos(beta - beta0); V_raw = C/A, V_net = C/(A - B).
/// Needs at least three distinct phases (mod 2 pi). Throws SolverError when the
/// residual chi^2/dof exceeds `chi2_limit` or A <= B.
VisibilityFit extract_visibility(std::span<const FringeSample> samples,
                                 double background,
                                 double chi2_limit = kDefaultFitChi2Limit);

/// (max - min) / (max + min) with and without the background subtracted.
struct MaxMinVisibility {
    double v_raw;
    double v_net;
};
MaxMinVisibility visibility_max_min(std::span<const FringeSample> samples, double background);

}  // namespace dfgqi

#endif
