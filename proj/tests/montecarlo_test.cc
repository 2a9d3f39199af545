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

#include "dfgqi/montecarlo.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "dfgqi/errors.h"

using namespace dfgqi;

namespace {

constexpr double kPi = std::numbers::pi;
const std::filesystem::path kScenarios = DFGQI_SCENARIO_DIR;

Scenario desk() {
    return load_scenario(kScenarios / "fringe_desk.scenario");
}

std::vector<double> uniform_phases(int n) {
    std::vector<double> p;
    for (int i = 0; i < n; ++i) {
        p.push_back(2 * kPi * i / n);
    }
    return p;
}

// Pearson chi^2 of an occupancy histogram against Poisson(mean), pooling the
// tail into the last bin with expectation >= 5.
std::pair<double, int> poisson_chi2(const std::vector<std::uint64_t> &occ, double mean, std::uint64_t pulses) {
    std::vector<double> expected;
    double pk = std::exp(-mean), cumulative = 0;
    for (int k = 0;; ++k) {
        const double e = pk * static_cast<double>(pulses);
        if (e < 5) {
            break;
        }
        expected.push_back(e);
        cumulative += pk;
        pk *= mean / (k + 1);
    }
    expected.push_back((1 - cumulative) * static_cast<double>(pulses));
    double chi2 = 0;
    const auto last = expected.size() - 1;
    for (std::size_t k = 0; k <= last; ++k) {
        double observed = 0;
        if (k < last) {
            observed = k < occ.size() ? static_cast<double>(occ[k]) : 0.0;
        } else {
            for (std::size_t j = last; j < occ.size(); ++j) {
                observed += static_cast<double>(occ[j]);
            }
        }
        chi2 += (observed - expected[k]) * (observed - expected[k]) / expected[k];
    }
    return {chi2, static_cast<int>(expected.size()) - 1};
}

}  // namespace

TEST(PhotonNumber, OccupancyIsPoisson) {
    // Upper 1 % point of chi^2 (Wilson-Hilferty).
    auto critical = [](int k) {
        const double a = 2.0 / (9.0 * k);
        return k * std::pow(1 - a + 2.3263478740408408 * std::sqrt(a), 3);
    };
    for (double mean : {0.1, 1.0, 3.0}) {
        auto rng = point_stream(99, mean, Stream::source);
        const auto occ = photon_number_histogram(mean, 1'000'000, rng);
        std::uint64_t total = 0;
        for (auto c : occ) {
            total += c;
        }
        EXPECT_EQ(total, 1'000'000u);
        const auto [chi2, dof] = poisson_chi2(occ, mean, 1'000'000);
        ASSERT_GE(dof, 1);
        EXPECT_LT(chi2, critical(dof)) << "mean " << mean << ", " << dof << " dof";
    }
}

TEST(PhotonNumber, IndicesAreSortedAndInRange) {
    CounterRng rng(3);
    const auto idx = sample_photon_pulses(1000, 2.0, rng);
    EXPECT_TRUE(std::is_sorted(idx.begin(), idx.end()));
    for (auto i : idx) {
        EXPECT_LT(i, 1000u);
    }
    const auto occ = occupancy_from_indices(std::vector<std::uint64_t>{0, 0, 3, 5, 5, 5}, 8);
    EXPECT_EQ(occ, (std::vector<std::uint64_t>{5, 1, 1, 1}));
}

TEST(PhaseWalk, CoherenceFactorIsExponential) {
    CounterRng none(1);
    EXPECT_EQ(pump_phase_walk(2.2, std::numeric_limits<double>::infinity(), 16, none), 0.0);
    EXPECT_THROW(pump_phase_walk(2.2, 0.0, 16, none), DomainError);
    for (double tau_c : {2.2, 4.4, 22.0}) {
        CounterRng rng(derive_stream(5, value_label(tau_c), 3));
        const int n = 200000;
        double sc = 0, sc2 = 0;
        for (int i = 0; i < n; ++i) {
            const double c = std::cos(pump_phase_walk(2.2, tau_c, 16, rng));
            sc += c;
            sc2 += c * c;
        }
        const double mean = sc / n;
        const double err = std::sqrt((sc2 / n - mean * mean) / n);
        EXPECT_NEAR(mean, std::exp(-2.2 / tau_c), 3 * err) << tau_c;
    }
}

TEST(FringeScan, DeterministicAndOrderIndependent) {
    auto s = desk();
    s.pulses_per_point = 200'000;
    const auto phases = uniform_phases(6);
    const auto a = run_fringe_scan(s, phases);
    const auto b = run_fringe_scan(s, phases);
    EXPECT_TRUE(same_outcome(a, b));

    std::vector<double> reversed(phases.rbegin(), phases.rend());
    const auto c = run_fringe_scan(s, reversed);
    for (std::size_t i = 0; i < phases.size(); ++i) {
        EXPECT_EQ(a.fringe[i], c.fringe[phases.size() - 1 - i]);
    }
    EXPECT_EQ(a.histogram, c.histogram);

    s.seed += 1;
    EXPECT_FALSE(same_outcome(a, run_fringe_scan(s, phases)));
}

TEST(FringeScan, NeedsTwoPhases) {
    const auto s = desk();
    const std::vector<double> one{0.0};
    EXPECT_THROW(run_fringe_scan(s, one), DomainError);
}

TEST(FringeScan, ErrorHalvesWithFourTimesThePulses) {
    auto s = desk();
    const auto phases = uniform_phases(4);
    s.pulses_per_point = 250'000;
    const auto small = run_fringe_scan(s, phases);
    s.pulses_per_point = 1'000'000;
    const auto large = run_fringe_scan(s, phases);
    for (std::size_t i = 0; i < phases.size(); ++i) {
        const double rel_small = small.fringe[i].stat_error / small.fringe[i].counts;
        const double rel_large = large.fringe[i].stat_error / large.fringe[i].counts;
        EXPECT_NEAR(rel_small / rel_large, 2.0, 0.4) << i;
    }
}

TEST(FringeScan, ConversionEfficiencyIsRealized) {
    auto s = load_scenario(kScenarios / "paper.scenario");
    s.pulses_per_point = 20'000'000;
    const auto r = run_fringe_scan(s, uniform_phases(4));
    const double in = static_cast<double>(r.photons_in);
    const double prep_eta = 0.5 * s.eta_qi();
    EXPECT_NEAR(static_cast<double>(r.photons_out) / in, prep_eta, 3 * std::sqrt(prep_eta / in));
    EXPECT_NEAR(in, 8e7, 3 * std::sqrt(8e7));
}

TEST(FringeScan, NoiselessVisibilityIsUnity) {
    auto s = desk();
    s.calibration = {};
    s.source.cw_fraction = 0.0;
    s.pump.coherence_time_ns = std::numeric_limits<double>::infinity();
    s.detector.dark_count_rate_hz = 0.0;
    const auto r = run_fringe_scan(s, uniform_phases(12));
    EXPECT_EQ(r.mean_background(), 0.0);
    const auto fit = extract_visibility(r.samples(), 0.0);
    EXPECT_NEAR(fit.v_net, 1.0, 3 * fit.sigma_v_net + 2e-3);
    EXPECT_NEAR(fit.v_raw, fit.v_net, 1e-12);
}

TEST(FringeScan, PumpCoherenceSetsVisibility) {
    auto s = desk();
    s.calibration = {};
    s.source.cw_fraction = 0.0;
    s.detector.dark_count_rate_hz = 0.0;
    s.pump.coherence_time_ns = s.analysis.delta_tau_ns;
    const auto r = run_fringe_scan(s, uniform_phases(12));
    const auto fit = extract_visibility(r.samples(), 0.0);
    EXPECT_NEAR(fit.v_net, std::exp(-1.0), 3 * fit.sigma_v_net + 2e-3);
}

TEST(Histogram, PeakWidthIsQuadratureSum) {
    auto s = desk();
    s.calibration = {};
    s.source.cw_fraction = 0.0;
    s.detector.dark_count_rate_hz = 0.0;
    s.pulses_per_point = 400'000;
    const auto r = run_histogram(s);
    const double center = s.sca.center_ns;
    EXPECT_NEAR(peak_fwhm(r.histogram, center), std::hypot(1.0, 0.8), 0.03);

    s.detector.jitter_fwhm_ps = 0.0;
    EXPECT_NEAR(peak_fwhm(run_histogram(s).histogram, center), 1.0, 0.05);
}

TEST(Histogram, BackgroundBroadensPeakAsExpected) {
    // Profile at beta = alpha: central Gaussian, side peaks at a quarter of
    // its height, flat background fixed by B/S = 1/14 in the SCA window.
    auto s = desk();
    s.pulses_per_point = 400'000;
    const double sigma = std::hypot(1.0, 0.8) / kFwhmPerSigma;
    const double window_fraction = std::erf(0.25 / (sigma * std::numbers::sqrt2));
    const double height = 1.0 / (sigma * std::sqrt(2 * kPi));
    const double flat = window_fraction / 14.0 / 0.5;
    auto profile = [&](double x) {
        auto g = [&](double c) { return height * std::exp(-0.5 * (x - c) * (x - c) / (sigma * sigma)); };
        return g(0.0) + 0.25 * (g(2.2) + g(-2.2)) + flat;
    };
    const double half = 0.5 * profile(0.0);
    double lo = 0.0, hi = 1.1;
    for (int i = 0; i < 100; ++i) {
        const double mid = 0.5 * (lo + hi);
        (profile(mid) > half ? lo : hi) = mid;
    }
    const double expected = 2 * lo;
    EXPECT_NEAR(peak_fwhm(run_histogram(s).histogram, s.sca.center_ns) / expected, 1.0, 0.02) << expected;
}

TEST(Histogram, MetadataDescribesRun) {
    auto s = desk();
    s.pulses_per_point = 10'000;
    const auto r = run_histogram(s);
    EXPECT_EQ(r.metadata.seed, s.seed);
    EXPECT_EQ(r.metadata.pulses_per_point, 10'000u);
    EXPECT_EQ(r.metadata.scenario_digest, scenario_digest(s));
    EXPECT_EQ(r.histogram.sync_pulses, 10'000u);
    ASSERT_EQ(r.fringe.size(), 1u);
    EXPECT_EQ(r.fringe[0].phase_rad, s.analysis.phase_rad);
}

TEST(Oracle, MonteCarloAgreesWithExpectation) {
    const auto s = desk();
    const auto rep = validate_against_oracle(s, uniform_phases(24));
    ASSERT_TRUE(rep.chi2_per_dof.has_value());
    EXPECT_EQ(rep.dof, 24u);
    EXPECT_GE(*rep.chi2_per_dof, 0.5);
    EXPECT_LE(*rep.chi2_per_dof, 2.0);
    EXPECT_EQ(rep.flagged, 0u);
}

TEST(Oracle, CorruptedOracleIsFlagged) {
    const auto s = desk();
    const auto r = run_fringe_scan(s, uniform_phases(12));
    auto wrong = scenario_fringe_oracle(s);
    wrong.v_net -= 0.1;
    const auto rep = validate_against_oracle(r, [&](double b) { return wrong.counts(b); });
    EXPECT_GT(rep.flagged, 0u);
    EXPECT_GT(*rep.chi2_per_dof, 10.0);
}

TEST(Oracle, NoExpectationGivesUndefinedChi2) {
    auto s = desk();
    s.pulses_per_point = 1000;
    const auto r = run_fringe_scan(s, uniform_phases(3));
    const auto rep = validate_against_oracle(r, [](double) { return 0.0; });
    EXPECT_FALSE(rep.chi2_per_dof.has_value());
    EXPECT_EQ(rep.dof, 0u);
}

TEST(Oracle, ExpectationMatchesFringeOracle) {
    const auto s = desk();
    const auto o = scenario_fringe_oracle(s);
    for (double b : uniform_phases(8)) {
        EXPECT_NEAR(expected_sca_counts(s, b).total(), o.counts(b), 1e-9 * o.counts(b));
    }
    const auto e = expected_sca_counts(s, s.preparation.phase_rad);
    EXPECT_NEAR(e.cw / e.signal, 0.01, 1e-6);
}

TEST(EfficiencySweep, MonteCarloMatchesAnalytic) {
    const auto s = load_scenario(kScenarios / "paper.scenario");
    const auto powers = s.powers.values();
    const auto rows = run_efficiency_sweep(s, powers);
    ASSERT_EQ(rows.size(), powers.size());
    EXPECT_EQ(rows.front().eta_analytic, 0.0);
    EXPECT_NEAR(rows.back().eta_analytic, 0.00133, 0.000005);
    double chi2 = 0;
    for (const auto &row : rows) {
        const double pull = (row.eta_mc - row.eta_analytic) / row.stat_error;
        EXPECT_LT(std::abs(pull), 4.0) << row.power_w;
        chi2 += pull * pull;
        EXPECT_GE(row.attenuation_db, 0.0);
    }
    EXPECT_LT(chi2 / rows.size(), 2.5);
    EXPECT_NEAR(rows.back().eta_mc, 0.00133, 3 * rows.back().stat_error + 0.00001);
}

TEST(EfficiencySweep, RejectsNegativePower) {
    const auto s = desk();
    const std::vector<double> p{-1.0};
    EXPECT_THROW(run_efficiency_sweep(s, p), DomainError);
}
