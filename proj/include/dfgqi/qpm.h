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

#ifndef DFGQI_QPM_H
#define DFGQI_QPM_H

#include <filesystem>
#include <string>

namespace dfgqi {

/// Temperature-dependent extraordinary index of lithium niobate.
///
/// Uses the four-pole form
///
///     n^2 = a1 + b1 f + (a2 + b2 f) / (l^2 - (a3 + b3 f)^2)
///               + (a4 + b4 f) / (l^2 - a5^2) - a6 l^2
///     f   = (T - t_ref) (T + t_offset)         (T in degrees Celsius)
///
/// with the wavelength l in micrometres. Coefficients come from a data file
/// (see data/README.md for the keys); nothing numeric is compiled in.
/// Evaluation outside the validity box is an error, never an extrapolation.
struct SellmeierModel {
    std::string name;
    std::string citation;
    double a1 = 0, a2 = 0, a3 = 0, a4 = 0, a5 = 0, a6 = 0;
    double b1 = 0, b2 = 0, b3 = 0, b4 = 0;
    double t_ref_c = 0;
    double t_offset_c = 0;
    double lambda_min_um = 0;
    double lambda_max_um = 0;
    double t_min_k = 0;
    double t_max_k = 0;

    /// Reads a flat `key: value` coefficient file. Throws ConfigError.
    static SellmeierModel load(const std::filesystem::path &path);

    bool operator==(const SellmeierModel &) const = default;
};

/// Poling configuration of the nonlinear waveguide.
struct QpmConfig {
    double period_um = 14.0;
    double length_cm = 1.0;
    double temperature_k = 352.0;
    int order = 1;

    /// Throws DomainError if period/length are not positive or order is not odd.
    void validate() const;

    bool operator==(const QpmConfig &) const = default;
};

/// Extraordinary refractive index. Throws DomainError naming the violated bound.
double refractive_index(double wavelength_um, double temperature_k, const SellmeierModel &model);

/// Idler wavelength from energy conservation, 1/out = 1/signal - 1/pump.
/// Requires 0 < signal < pump.
double dfg_output_wavelength(double signal_um, double pump_um);

/// Signed phase mismatch in rad/um:
///     2 pi (n_s/l_s - n_p/l_p - n_o/l_o - m/period).
/// The triple must conserve energy to 1e-6 um^-1.
double phase_mismatch(double signal_um,
                      double pump_um,
                      double output_um,
                      const QpmConfig &cfg,
                      const SellmeierModel &model);

/// Poling period that zeroes phase_mismatch for the DFG triple defined by
/// (signal, pump). Throws SolverError if the bulk mismatch has the wrong sign.
double solve_poling_period(double signal_um,
                           double pump_um,
                           double temperature_k,
                           int order,
                           const SellmeierModel &model);

/// sinc^2(dk L / 2), L converted from cm.
double qpm_acceptance(double dk_rad_per_um, double length_cm);

/// Lower and upper edges of the pump search bracket, um.
inline constexpr double kPumpBracketLowUm = 1.3;
inline constexpr double kPumpBracketHighUm = 1.8;

/// Pump wavelength that phase matches `signal` at the given period and
/// temperature. The search runs on the branch where the pump is the longest
/// of the three waves (pump >= output), clipped to [1.3, 1.8] um; the
/// mismatch is symmetric under exchanging pump and output, so the other
/// branch holds the mirror root. Throws SolverError if no sign change.
double solve_pump_wavelength(double period_um,
                             double signal_um,
                             double temperature_k,
                             const SellmeierModel &model,
                             int order = 1);

}  // namespace dfgqi

#endif
