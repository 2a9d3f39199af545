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

#ifndef DFGQI_CONVERSION_H
#define DFGQI_CONVERSION_H

#include <limits>
#include <span>
#include <string>
#include <vector>

namespace dfgqi {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Planck constant times speed of light, J m.
inline constexpr double kPlanckTimesC = 6.62607015e-34 * 299792458.0;

/// Photons per second carried by `power_w` of light at `wavelength_um`.
double photon_flux(double power_w, double wavelength_um);

double db_to_fraction(double db);

struct PumpField {
    double power_w = 0.0;
    double wavelength_um = 1.552;
    /// Infinite means a perfectly coherent pump.
    double coherence_time_ns = kInfinity;

    void validate() const;
    bool operator==(const PumpField &) const = default;
};

enum class StageUnit { fraction, db };

/// One element of the transmission budget. A dB value must be <= 0.
struct LossStage {
    std::string name;
    double value = 1.0;
    StageUnit unit = StageUnit::fraction;

    double transmission() const;
    bool operator==(const LossStage &) const = default;
};

/// Ordered, uniquely named transmission stages.
class LossChain {
   public:
    LossChain() = default;
    /// Throws DomainError on duplicate names or transmissions outside [0, 1].
    explicit LossChain(std::vector<LossStage> stages);

    void add(LossStage stage);
    const std::vector<LossStage> &stages() const {
        return stages_;
    }
    bool empty() const {
        return stages_.empty();
    }

    bool operator==(const LossChain &) const = default;

   private:
    std::vector<LossStage> stages_;
};

struct ChainRow {
    std::string name;
    double transmission;
    double cumulative;
};

/// Product of all stage transmissions; 1 for an empty chain.
double compose_chain(const LossChain &chain);

/// Per-stage transmission and running product, in chain order.
std::vector<ChainRow> chain_table(const LossChain &chain);

/// sin^2(sqrt(eta_norm P) L): undepleted-pump DFG with coupled-mode saturation.
double internal_conversion_efficiency(double pump_power_w, double eta_norm_per_w_cm2, double length_cm);

/// Input coupling x internal conversion x output chain.
double end_to_end_efficiency(double pump_power_w,
                             double eta_norm_per_w_cm2,
                             double length_cm,
                             const LossChain &chain_pre,
                             const LossChain &chain_post);

/// Inverse of internal_conversion_efficiency on its first branch.
double normalized_efficiency_from_measurement(double internal_efficiency,
                                              double pump_power_w,
                                              double length_cm);

/// exp(-delay / tau_c), the Lorentzian-lineshape coherence between two
/// pump samples separated by `delay_ns`.
double pump_coherence_visibility_factor(double coherence_time_ns, double delay_ns);

struct NoiseModel {
    /// Parametric fluorescence, only generated when the pump is shorter than the output.
    double spdc_hz_per_w = 0.0;
    double raman_hz_per_w = 0.0;
    /// Pump rejection of the filter stage; infinite means no residual pump reaches the detector.
    double pump_extinction_db = kInfinity;
    /// Broadband emission of the pump laser at the output wavelength.
    double unfiltered_pump_hz_per_w = 0.0;
    /// Band-pass filter between pump amplifier and waveguide removes the term above.
    bool pump_prefilter = true;

    void validate() const;
    bool operator==(const NoiseModel &) const = default;
};

/// Noise photons per second at the detector input.
double noise_rate(const NoiseModel &noise, const PumpField &pump, double output_um);

/// Efficiency budget of the interface, with the back-composed waveguide exit
/// fraction reported next to the end-to-end value.
struct BudgetReport {
    std::vector<ChainRow> pre;
    double internal_efficiency = 0;
    std::vector<ChainRow> post;
    double eta_qi = 0;
    /// Converted photons leaving the waveguide per input signal photon,
    /// recovered by dividing eta_qi by the filtering stages only.
    double waveguide_exit_fraction = 0;
};

/// Quoted share of input signal photons leaving the waveguide converted.
inline constexpr double kQuotedExitFraction = 0.02;

/// `waveguide_post_stages` counts the leading entries of chain_post that are
/// still part of the waveguide (propagation, exit facet); the rest is filtering.
BudgetReport efficiency_budget(double pump_power_w,
                               double eta_norm_per_w_cm2,
                               double length_cm,
                               const LossChain &chain_pre,
                               const LossChain &chain_post,
                               std::size_t waveguide_post_stages);

}  // namespace dfgqi

#endif
