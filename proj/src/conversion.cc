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

#include "dfgqi/conversion.h"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "dfgqi/errors.h"

namespace dfgqi {

double photon_flux(double power_w, double wavelength_um) {
    if (!(power_w >= 0) || !(wavelength_um > 0)) {
        throw DomainError(fmt::format("photon flux needs power >= 0 and wavelength > 0, got {} W, {} um",
                                      power_w, wavelength_um));
    }
    return power_w * wavelength_um * 1e-6 / kPlanckTimesC;
}

double db_to_fraction(double db) {
    return std::pow(10.0, db / 10.0);
}

void PumpField::validate() const {
    if (!(power_w >= 0)) {
        throw DomainError(fmt::format("pump power must be >= 0, got {} W", power_w));
    }
    if (!(wavelength_um > 0)) {
        throw DomainError(fmt::format("pump wavelength must be positive, got {} um", wavelength_um));
    }
    if (!(coherence_time_ns > 0)) {
        throw DomainError(fmt::format("pump coherence time must be positive or infinite, got {} ns",
                                      coherence_time_ns));
    }
}

double LossStage::transmission() const {
    if (unit == StageUnit::db) {
        if (!(value <= 0)) {
            throw DomainError(fmt::format("stage '{}': a dB transmission must be <= 0, got {} dB", name, value));
        }
        return db_to_fraction(value);
    }
    if (!(value >= 0 && value <= 1)) {
        throw DomainError(fmt::format("stage '{}': transmission must lie in [0, 1], got {}", name, value));
    }
    return value;
}

LossChain::LossChain(std::vector<LossStage> stages) {
    for (auto &s : stages) {
        add(std::move(s));
    }
}

void LossChain::add(LossStage stage) {
    stage.transmission();
    const bool taken = std::any_of(stages_.begin(), stages_.end(),
                                   [&](const LossStage &s) { return s.name == stage.name; });
    if (taken) {
        throw DomainError(fmt::format("duplicate loss stage name '{}'", stage.name));
    }
    stages_.push_back(std::move(stage));
}

double compose_chain(const LossChain &chain) {
    double t = 1.0;
    for (const auto &s : chain.stages()) {
        t *= s.transmission();
    }
    return t;
}

std::vector<ChainRow> chain_table(const LossChain &chain) {
    std::vector<ChainRow> rows;
    rows.reserve(chain.stages().size());
    double cumulative = 1.0;
    for (const auto &s : chain.stages()) {
        const double t = s.transmission();
        cumulative *= t;
        rows.push_back({s.name, t, cumulative});
    }
    return rows;
}

double internal_conversion_efficiency(double pump_power_w, double eta_norm_per_w_cm2, double length_cm) {
    if (!(pump_power_w >= 0) || !(eta_norm_per_w_cm2 >= 0)) {
        throw DomainError(fmt::format("conversion needs P >= 0 and eta_norm >= 0, got {} W, {} /W/cm^2",
                                      pump_power_w, eta_norm_per_w_cm2));
    }
    if (!(length_cm > 0)) {
        throw DomainError(fmt::format("crystal length must be positive, got {} cm", length_cm));
    }
    const double s = std::sin(std::sqrt(eta_norm_per_w_cm2 * pump_power_w) * length_cm);
    return s * s;
}

double end_to_end_efficiency(double pump_power_w, double eta_norm_per_w_cm2, double length_cm,
                             const LossChain &chain_pre, const LossChain &chain_post) {
    return compose_chain(chain_pre) *
           internal_conversion_efficiency(pump_power_w, eta_norm_per_w_cm2, length_cm) *
           compose_chain(chain_post);
}

double normalized_efficiency_from_measurement(double internal_efficiency, double pump_power_w,
                                              double length_cm) {
    if (internal_efficiency == 1.0) {
        throw DomainError("internal efficiency of exactly 1 is ambiguous: complete conversion is "
                          "reached on every branch of the sin^2 law");
    }
    if (!(internal_efficiency >= 0 && internal_efficiency < 1)) {
        throw DomainError(fmt::format("internal efficiency must lie in [0, 1), got {}", internal_efficiency));
    }
    if (!(pump_power_w > 0) || !(length_cm > 0)) {
        throw DomainError(fmt::format("inversion needs P > 0 and L > 0, got {} W, {} cm", pump_power_w,
                                      length_cm));
    }
    const double root = std::asin(std::sqrt(internal_efficiency)) / length_cm;
    return root * root / pump_power_w;
}

double pump_coherence_visibility_factor(double coherence_time_ns, double delay_ns) {
    if (!(coherence_time_ns > 0)) {
        throw DomainError(fmt::format("coherence time must be positive or infinite, got {} ns",
                                      coherence_time_ns));
    }
    if (!(delay_ns >= 0)) {
        throw DomainError(fmt::format("delay must be >= 0, got {} ns", delay_ns));
    }
    if (std::isinf(coherence_time_ns)) {
        return 1.0;
    }
    return std::exp(-delay_ns / coherence_time_ns);
}

void NoiseModel::validate() const {
    if (!(spdc_hz_per_w >= 0) || !(raman_hz_per_w >= 0) || !(unfiltered_pump_hz_per_w >= 0)) {
        throw DomainError("noise coefficients must be >= 0");
    }
    if (!(pump_extinction_db >= 0)) {
        throw DomainError(fmt::format("pump extinction must be >= 0 dB, got {}", pump_extinction_db));
    }
}

double noise_rate(const NoiseModel &noise, const PumpField &pump, double output_um) {
    noise.validate();
    pump.validate();
    const double p = pump.power_w;
    double rate = noise.raman_hz_per_w * p;
    if (pump.wavelength_um < output_um) {
        rate += noise.spdc_hz_per_w * p;
    }
    if (!std::isinf(noise.pump_extinction_db)) {
        rate += photon_flux(p, pump.wavelength_um) * db_to_fraction(-noise.pump_extinction_db);
    }
    if (!noise.pump_prefilter) {
        rate += noise.unfiltered_pump_hz_per_w * p;
    }
    return rate;
}

BudgetReport efficiency_budget(double pump_power_w, double eta_norm_per_w_cm2, double length_cm,
                               const LossChain &chain_pre, const LossChain &chain_post,
                               std::size_t waveguide_post_stages) {
    if (waveguide_post_stages > chain_post.stages().size()) {
        throw DomainError(fmt::format("waveguide_post_stages = {} exceeds the {} post-conversion stages",
                                      waveguide_post_stages, chain_post.stages().size()));
    }
    BudgetReport r;
    r.pre = chain_table(chain_pre);
    r.internal_efficiency = internal_conversion_efficiency(pump_power_w, eta_norm_per_w_cm2, length_cm);
    r.post = chain_table(chain_post);
    r.eta_qi = compose_chain(chain_pre) * r.internal_efficiency * compose_chain(chain_post);
    double filtering = 1.0;
    for (std::size_t i = waveguide_post_stages; i < r.post.size(); ++i) {
        filtering *= r.post[i].transmission;
    }
    r.waveguide_exit_fraction = filtering > 0 ? r.eta_qi / filtering : 0.0;
    return r;
}

}  // namespace dfgqi
