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

#ifndef DFGQI_TIMEBIN_H
#define DFGQI_TIMEBIN_H

#include <array>
#include <complex>
#include <span>
#include <vector>

namespace dfgqi {

/// Early/late amplitudes of a single photon. The norm deficit
/// 1 - |early|^2 - |late|^2 is the probability already lost upstream.
/// `coherence` scales the early/late cross term (the off-diagonal of the
/// two-bin density matrix); 1 is a pure state.
struct TimeBinQubit {
    std::complex<double> early;
    std::complex<double> late;
    double delta_tau_ns = 2.2;
    double coherence = 1.0;

    double norm() const {
        return std::norm(early) + std::norm(late);
    }
};

/// Unbalanced Michelson interferometer, used through its forward port.
/// `phase_rad` is the extra phase of the long arm; `transmission` is the
/// intensity transmission per pass through the device.
struct Interferometer {
    double delta_tau_ns = 2.2;
    double phase_rad = 0.0;
    double transmission = 1.0;
    double splitting_ratio = 0.5;

    void validate() const;
    bool operator==(const Interferometer &) const = default;
};

/// Forward-port output for a single photon entering `ifo`:
/// early = sqrt(s(1-s) T), late = sqrt(s(1-s) T) e^{i phase}.
TimeBinQubit prepare_qubit(const Interferometer &ifo);

/// Multiplies the cross-term coherence by `factor` in [0, 1].
TimeBinQubit apply_conversion_phase(TimeBinQubit q, double factor);

/// Adds `phase_rad` to the late bin, e.g. a pump phase step between bins.
TimeBinQubit shift_late_phase(TimeBinQubit q, double phase_rad);

struct Slot {
    double time_ns;
    double probability;
};

/// Result of passing a qubit through the analysis interferometer.
/// The three slots are the forward-port arrival times t0, t0+dt, t0+2dt.
/// back_port and transmission_loss account for everything else, so
///     sum(slots) + back_port + transmission_loss == q.norm().
struct SlotProbabilities {
    std::array<Slot, 3> slots;
    double back_port = 0.0;
    double transmission_loss = 0.0;

    double forward() const {
        return slots[0].probability + slots[1].probability + slots[2].probability;
    }
};

/// Fractional delay mismatch tolerated between the two interferometers.
inline constexpr double kDelayMatchTolerance = 0.01;

/// Projects q with the analysis interferometer (long-arm phase beta).
/// Throws DomainError if the delays differ by more than 1 %.
SlotProbabilities analyze(const TimeBinQubit &q, const Interferometer &ifo, double t0_ns = 0.0);

struct FringeParams {
    double signal_scale = 1.0;  ///< S
    double coherence = 1.0;     ///< c
    double penalty = 1.0;       ///< any further multiplicative contrast loss
    double background_dark = 0.0;
    double background_cw = 0.0;
    double alpha_rad = 0.0;
};

/// N(beta) = S (1 + V_net cos(alpha - beta)) / 2 + B.
struct FringeOracle {
    double signal_scale = 1.0;
    double v_net = 1.0;
    double background = 0.0;
    double alpha_rad = 0.0;

    double counts(double beta_rad) const;
    std::vector<double> curve(std::span<const double> phases) const;
    /// S V_net / (S + 2 B).
    double v_raw() const;
};

/// Throws DomainError when S <= 0 or a background is negative.
FringeOracle fringe_oracle(const FringeParams &p);

}  // namespace dfgqi

#endif
