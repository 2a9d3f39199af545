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

#include "dfgqi/qpm.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/tools/roots.hpp>
#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include "dfgqi/errors.h"

namespace dfgqi {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kEnergyToleranceInvUm = 1e-6;
constexpr double kKelvinOffset = 273.15;

double read_coefficient(const YAML::Node &root, const std::string &key, const std::string &file) {
    const YAML::Node node = root[key];
    if (!node) {
        throw ConfigError(file, key, "missing coefficient");
    }
    try {
        return node.as<double>();
    } catch (const YAML::Exception &) {
        throw ConfigError(file, key, "not a number");
    }
}

double wave_vector_sum(double signal_um, double pump_um, double output_um, double temperature_k,
                       const SellmeierModel &model) {
    return refractive_index(signal_um, temperature_k, model) / signal_um -
           refractive_index(pump_um, temperature_k, model) / pump_um -
           refractive_index(output_um, temperature_k, model) / output_um;
}

}  // namespace

SellmeierModel SellmeierModel::load(const std::filesystem::path &path) {
    const std::string file = path.string();
    YAML::Node root;
    try {
        root = YAML::LoadFile(file);
    } catch (const YAML::BadFile &) {
        throw ConfigError(file, "", "cannot open Sellmeier coefficient file");
    } catch (const YAML::Exception &e) {
        throw ConfigError(file, "", fmt::format("parse error at line {}: {}", e.mark.line + 1, e.msg));
    }
    if (!root.IsMap()) {
        throw ConfigError(file, "", "expected a flat key: value mapping");
    }
    SellmeierModel m;
    m.name = root["name"] ? root["name"].as<std::string>() : path.stem().string();
    m.citation = root["citation"] ? root["citation"].as<std::string>() : "";
    m.a1 = read_coefficient(root, "a1", file);
    m.a2 = read_coefficient(root, "a2", file);
    m.a3 = read_coefficient(root, "a3", file);
    m.a4 = read_coefficient(root, "a4", file);
    m.a5 = read_coefficient(root, "a5", file);
    m.a6 = read_coefficient(root, "a6", file);
    m.b1 = read_coefficient(root, "b1", file);
    m.b2 = read_coefficient(root, "b2", file);
    m.b3 = read_coefficient(root, "b3", file);
    m.b4 = read_coefficient(root, "b4", file);
    m.t_ref_c = read_coefficient(root, "t_ref_c", file);
    m.t_offset_c = read_coefficient(root, "t_offset_c", file);
    m.lambda_min_um = read_coefficient(root, "lambda_min_um", file);
    m.lambda_max_um = read_coefficient(root, "lambda_max_um", file);
    m.t_min_k = read_coefficient(root, "t_min_k", file);
    m.t_max_k = read_coefficient(root, "t_max_k", file);
    if (!(m.lambda_min_um > 0 && m.lambda_max_um > m.lambda_min_um)) {
        throw ConfigError(file, "lambda_min_um", "validity range must satisfy 0 < min < max");
    }
    if (!(m.t_min_k > 0 && m.t_max_k > m.t_min_k)) {
        throw ConfigError(file, "t_min_k", "validity range must satisfy 0 < min < max");
    }
    return m;
}

void QpmConfig::validate() const {
    if (!(period_um > 0)) {
        throw DomainError(fmt::format("poling period must be positive, got {} um", period_um));
    }
    if (!(length_cm > 0)) {
        throw DomainError(fmt::format("crystal length must be positive, got {} cm", length_cm));
    }
    if (order < 1 || order % 2 == 0) {
        throw DomainError(fmt::format("QPM order must be an odd positive integer, got {}", order));
    }
}

double refractive_index(double wavelength_um, double temperature_k, const SellmeierModel &model) {
    if (!(wavelength_um >= model.lambda_min_um)) {
        throw DomainError(fmt::format("wavelength {} um is below the Sellmeier validity bound {} um",
                                      wavelength_um, model.lambda_min_um));
    }
    if (!(wavelength_um <= model.lambda_max_um)) {
        throw DomainError(fmt::format("wavelength {} um is above the Sellmeier validity bound {} um",
                                      wavelength_um, model.lambda_max_um));
    }
    if (!(temperature_k >= model.t_min_k)) {
        throw DomainError(fmt::format("temperature {} K is below the Sellmeier validity bound {} K",
                                      temperature_k, model.t_min_k));
    }
    if (!(temperature_k <= model.t_max_k)) {
        throw DomainError(fmt::format("temperature {} K is above the Sellmeier validity bound {} K",
                                      temperature_k, model.t_max_k));
    }
    const double t_c = temperature_k - kKelvinOffset;
    const double f = (t_c - model.t_ref_c) * (t_c + model.t_offset_c);
    const double l2 = wavelength_um * wavelength_um;
    const double uv_pole = model.a3 + model.b3 * f;
    const double n2 = model.a1 + model.b1 * f + (model.a2 + model.b2 * f) / (l2 - uv_pole * uv_pole) +
                      (model.a4 + model.b4 * f) / (l2 - model.a5 * model.a5) - model.a6 * l2;
    return std::sqrt(n2);
}

double dfg_output_wavelength(double signal_um, double pump_um) {
    if (!(signal_um > 0)) {
        throw DomainError(fmt::format("signal wavelength must be positive, got {} um", signal_um));
    }
    if (!(signal_um < pump_um)) {
        throw DomainError(fmt::format(
            "difference-frequency generation needs signal < pump (signal is the most energetic "
            "wave), got signal {} um, pump {} um",
            signal_um, pump_um));
    }
    return 1.0 / (1.0 / signal_um - 1.0 / pump_um);
}

double phase_mismatch(double signal_um, double pump_um, double output_um, const QpmConfig &cfg,
                      const SellmeierModel &model) {
    cfg.validate();
    const double residual = 1.0 / signal_um - 1.0 / pump_um - 1.0 / output_um;
    if (!(std::abs(residual) <= kEnergyToleranceInvUm)) {
        throw DomainError(fmt::format(
            "wavelengths ({}, {}, {}) um violate energy conservation by {:.3e} um^-1", signal_um,
            pump_um, output_um, residual));
    }
    const double bulk = wave_vector_sum(signal_um, pump_um, output_um, cfg.temperature_k, model);
    return kTwoPi * (bulk - cfg.order / cfg.period_um);
}

double solve_poling_period(double signal_um, double pump_um, double temperature_k, int order,
                           const SellmeierModel &model) {
    QpmConfig probe{1.0, 1.0, temperature_k, order};
    probe.validate();
    const double output_um = dfg_output_wavelength(signal_um, pump_um);
    // The mismatch is affine in 1/period, so the root is exact.
    const double bulk = wave_vector_sum(signal_um, pump_um, output_um, temperature_k, model);
    if (!(bulk > 0)) {
        throw SolverError(fmt::format(
            "no positive poling period: bulk mismatch n_s/l_s - n_p/l_p - n_o/l_o = {:.6e} um^-1 "
            "is not positive",
            bulk));
    }
    return order / bulk;
}

double qpm_acceptance(double dk_rad_per_um, double length_cm) {
    if (!(length_cm > 0)) {
        throw DomainError(fmt::format("crystal length must be positive, got {} cm", length_cm));
    }
    const double x = 0.5 * dk_rad_per_um * length_cm * 1e4;
    if (x == 0.0) {
        return 1.0;
    }
    const double sinc = std::sin(x) / x;
    return sinc * sinc;
}

double solve_pump_wavelength(double period_um, double signal_um, double temperature_k,
                             const SellmeierModel &model, int order) {
    const QpmConfig cfg{period_um, 1.0, temperature_k, order};
    cfg.validate();
    if (!(signal_um > 0)) {
        throw DomainError(fmt::format("signal wavelength must be positive, got {} um", signal_um));
    }
    const double low = std::max(kPumpBracketLowUm, 2.0 * signal_um);
    const double high = kPumpBracketHighUm;
    if (!(low < high)) {
        throw SolverError(fmt::format(
            "empty pump search bracket [{}, {}] um for signal {} um", low, high, signal_um));
    }
    auto mismatch = [&](double pump_um) {
        const double output_um = dfg_output_wavelength(signal_um, pump_um);
        return kTwoPi * (wave_vector_sum(signal_um, pump_um, output_um, temperature_k, model) -
                         order / period_um);
    };
    const double f_low = mismatch(low);
    const double f_high = mismatch(high);
    if (f_low == 0.0) {
        return low;
    }
    if (f_high == 0.0) {
        return high;
    }
    if (std::signbit(f_low) == std::signbit(f_high)) {
        throw SolverError(fmt::format(
            "no pump wavelength in [{:.4f}, {:.4f}] um phase matches period {} um: mismatch is "
            "{:+.4e} rad/um at the low end and {:+.4e} rad/um at the high end",
            low, high, period_um, f_low, f_high));
    }
    boost::math::tools::eps_tolerance<double> tol(std::numeric_limits<double>::digits - 2);
    const auto bracket = boost::math::tools::bisect(mismatch, low, high, tol);
    const double a = bracket.first;
    const double b = bracket.second;
    return std::abs(mismatch(a)) <= std::abs(mismatch(b)) ? a : b;
}

}  // namespace dfgqi
