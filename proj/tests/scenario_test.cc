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

#include "dfgqi/scenario.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "dfgqi/errors.h"
#include "dfgqi/montecarlo.h"

using namespace dfgqi;

namespace {

const std::filesystem::path kScenarios = DFGQI_SCENARIO_DIR;

std::string read_file(const std::filesystem::path &p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string replace_once(std::string text, const std::string &from, const std::string &to) {
    const auto pos = text.find(from);
    EXPECT_NE(pos, std::string::npos) << from;
    if (pos != std::string::npos) {
        text.replace(pos, from.size(), to);
    }
    return text;
}

Scenario parse_desk(const std::string &text) {
    return parse_scenario(text, kScenarios, "desk");
}

std::string desk_text() {
    return read_file(kScenarios / "fringe_desk.scenario");
}

void expect_config_error(const std::string &text, const std::string &key_fragment) {
    try {
        parse_desk(text);
        ADD_FAILURE() << "no ConfigError for " << key_fragment;
    } catch (const ConfigError &e) {
        EXPECT_NE(std::string(e.what()).find(key_fragment), std::string::npos) << e.what();
        EXPECT_EQ(e.file, "desk");
    }
}

}  // namespace

TEST(Grid, ParsesAndExpands) {
    const auto g = Grid::parse("0:0.65:14");
    EXPECT_EQ(g.n, 14u);
    const auto v = g.values();
    ASSERT_EQ(v.size(), 14u);
    EXPECT_DOUBLE_EQ(v.front(), 0.0);
    EXPECT_DOUBLE_EQ(v.back(), 0.65);
    EXPECT_NEAR(v[1], 0.05, 1e-15);
    EXPECT_EQ(Grid::parse("2.5:9:1").values(), std::vector<double>{2.5});
}

TEST(Grid, RejectsMalformedText) {
    for (const char *bad : {"", "1:2", "a:1:3", "0:1:0", "0:1:2.5", "0:1:-3", "0:1:3x"}) {
        EXPECT_THROW(Grid::parse(bad), DomainError) << bad;
    }
}

TEST(Scenario, ShippedScenariosLoad) {
    for (const char *name : {"paper.scenario", "fringe_desk.scenario"}) {
        const auto s = load_scenario(kScenarios / name);
        EXPECT_NO_THROW(s.validate());
        EXPECT_NEAR(s.output_wavelength_um(), 1.31, 0.005);
    }
    const auto nominal = load_scenario(kScenarios / "paper.scenario");
    EXPECT_NEAR(nominal.eta_qi(), 0.001329, 0.000005);
    EXPECT_EQ(nominal.pulses_per_point, 2'400'000'000u);
    EXPECT_TRUE(std::isfinite(nominal.pump.coherence_time_ns));
}

TEST(Scenario, SerializeRoundTripIsExact) {
    for (const char *name : {"paper.scenario", "fringe_desk.scenario"}) {
        const auto s = load_scenario(kScenarios / name);
        const auto text = serialize_scenario(s);
        const auto back = parse_scenario(text, kScenarios, "roundtrip");
        EXPECT_TRUE(back == s) << name;
        EXPECT_EQ(serialize_scenario(back), text);
        EXPECT_EQ(scenario_digest(back), scenario_digest(s));
    }
}

TEST(Scenario, DigestTracksContent) {
    auto s = load_scenario(kScenarios / "fringe_desk.scenario");
    const auto d = scenario_digest(s);
    EXPECT_EQ(d.size(), 12u);
    EXPECT_EQ(d, scenario_digest(load_scenario(kScenarios / "fringe_desk.scenario")));
    s.seed += 1;
    EXPECT_NE(scenario_digest(s), d);
}

TEST(Scenario, CalibrationHitsTargets) {
    const auto s = load_scenario(kScenarios / "fringe_desk.scenario");
    const auto o = scenario_fringe_oracle(s);
    EXPECT_NEAR(o.v_net, 0.96, 1e-6);
    EXPECT_NEAR(o.background / o.signal_scale, 1.0 / 14.0, 1e-6);
    EXPECT_NEAR(o.v_raw(), 0.84, 1e-6);
}

TEST(Scenario, UnknownKeysAreRejected) {
    expect_config_error(replace_once(desk_text(), "seed: 7", "seed: 7\nsede: 8"), "sede");
    expect_config_error(replace_once(desk_text(), "dead_time_us: 0.0", "dead_time_us: 0.0\n  deadtime: 1"),
                        "detector.deadtime");
}

TEST(Scenario, MissingKeysAreNamed) {
    expect_config_error(replace_once(desk_text(), "  efficiency: 1.0\n", ""), "detector.efficiency");
    expect_config_error(replace_once(desk_text(), "  mean_photon_number: 1.0\n", ""), "source.mean_photon_number");
}

TEST(Scenario, BadValuesAreConfigErrors) {
    expect_config_error(replace_once(desk_text(), "efficiency: 1.0", "efficiency: 1.5"), "efficiency");
    expect_config_error(replace_once(desk_text(), "efficiency: 1.0", "efficiency: high"), "detector.efficiency");
    expect_config_error(replace_once(desk_text(), "pulse_shape: gaussian", "pulse_shape: sech"), "pulse_shape");
    expect_config_error(replace_once(desk_text(), "pulses_per_point: 1000000", "pulses_per_point: -4"),
                        "pulses_per_point");
    expect_config_error(replace_once(desk_text(), "net_visibility: 0.96", "net_visibility: 1.5"), "calibration");
    expect_config_error("seed: [1", "YAML");
    expect_config_error("- a\n- b\n", "mapping");
}

TEST(Scenario, MismatchedDelaysAreRejected) {
    const auto text = replace_once(desk_text(), "analysis: {delta_tau_ns: 2.2", "analysis: {delta_tau_ns: 2.3");
    expect_config_error(text, "differ");
}

TEST(Scenario, MissingFileIsConfigError) {
    EXPECT_THROW(load_scenario(kScenarios / "does-not-exist.scenario"), ConfigError);
}

TEST(PulseSource, WarnsOnOverlappingPeaks) {
    PulseSource p;
    EXPECT_TRUE(p.warnings(2.2).empty());
    p.pulse_fwhm_ns = 3.0;
    p.coherence_time_ns = 5.0;
    EXPECT_EQ(p.warnings(2.2).size(), 2u);
}
