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

#include "dfgqi/timebin.h"

#include <array>
#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "dfgqi/errors.h"
#include "interferometer_oracle.h"

using namespace dfgqi;
using namespace dfgqi_oracle;

namespace {

constexpr double kPi = std::numbers::pi;

}  // namespace

TEST(Prepare, AmplitudesMatchTransferMatrix) {
    std::mt19937_64 gen(17);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        const Interferometer ifo{2.2, 2 * kPi * u(gen), 0.5 + 0.5 * u(gen), 0.05 + 0.9 * u(gen)};
        const TimeBinQubit q = prepare_qubit(ifo);
        Field in;
        in.slots[0] = 1.0;
        const Field f = pass(in, ifo.splitting_ratio, ifo.phase_rad, ifo.transmission);
        // Same state up to the global phase of the brute-force splitter.
        const cd g = f.slots.at(0) / q.early;
        EXPECT_NEAR(std::abs(g), 1.0, 1e-12);
        EXPECT_NEAR(std::abs(f.slots.at(1) - g * q.late), 0.0, 1e-12);
    }
}

TEST(Analyze, PathSumEqualsTransferMatrix) {
    std::mt19937_64 gen(23);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 500; ++i) {
        const Interferometer prep{2.2, 2 * kPi * u(gen), 0.3 + 0.7 * u(gen), 0.05 + 0.9 * u(gen)};
        const Interferometer ana{2.2, 2 * kPi * u(gen), 0.3 + 0.7 * u(gen), 0.05 + 0.9 * u(gen)};
        const TimeBinQubit q = prepare_qubit(prep);
        const SlotProbabilities sp = analyze(q, ana);

        Field in;
        in.slots[0] = 1.0;
        const Field prepared = pass(in, prep.splitting_ratio, prep.phase_rad, prep.transmission);
        const Field fwd = pass(prepared, ana.splitting_ratio, ana.phase_rad, ana.transmission);
        const Field back = pass_back(prepared, ana.splitting_ratio, ana.phase_rad, ana.transmission);
        for (int k = 0; k < 3; ++k) {
            EXPECT_NEAR(sp.slots[k].probability, std::norm(fwd.slots.at(k)), 1e-12) << "slot " << k;
        }
        EXPECT_NEAR(sp.back_port, total(back), 1e-12);
        EXPECT_NEAR(sp.forward() + sp.back_port + sp.transmission_loss, q.norm(), 1e-12);
    }
}

TEST(Analyze, PartialCoherenceEqualsMixture) {
    // A coherence factor c is the mixture of the state and its late-bin sign flip.
    const Interferometer prep{2.2, 0.4};
    const Interferometer ana{2.2, 1.1};
    for (double c : {0.0, 0.3, 0.84, 1.0}) {
        const TimeBinQubit q = prepare_qubit(prep);
        const auto mixed = analyze(apply_conversion_phase(q, c), ana);
        const auto plus = analyze(q, ana);
        const auto minus = analyze(shift_late_phase(q, kPi), ana);
        for (int k = 0; k < 3; ++k) {
            const double expect = 0.5 * (1 + c) * plus.slots[k].probability + 0.5 * (1 - c) * minus.slots[k].probability;
            EXPECT_NEAR(mixed.slots[k].probability, expect, 1e-14);
        }
    }
}

TEST(Analyze, BalancedSlotValues) {
    const TimeBinQubit q = prepare_qubit(Interferometer{2.2, 0.0});
    for (double beta : {0.0, 0.7, kPi, 4.0}) {
        const auto sp = analyze(q, Interferometer{2.2, beta});
        EXPECT_NEAR(sp.slots[0].probability, 1.0 / 16, 1e-15);
        EXPECT_NEAR(sp.slots[2].probability, 1.0 / 16, 1e-15);
    }
    EXPECT_NEAR(analyze(q, Interferometer{2.2, 0.0}).slots[1].probability, 0.25, 1e-15);
    EXPECT_NEAR(analyze(q, Interferometer{2.2, kPi}).slots[1].probability, 0.0, 1e-15);
}

TEST(Analyze, CentralSlotIsRaisedCosine) {
    const double alpha = 0.9;
    const TimeBinQubit q = prepare_qubit(Interferometer{2.2, alpha});
    for (double beta = 0; beta < 2 * kPi; beta += 0.1) {
        EXPECT_NEAR(analyze(q, Interferometer{2.2, beta}).slots[1].probability,
                    0.125 * (1 + std::cos(alpha - beta)), 1e-14);
    }
}

TEST(Analyze, SlotTimes) {
    const auto sp = analyze(prepare_qubit(Interferometer{2.2}), Interferometer{2.2}, 3.0);
    EXPECT_DOUBLE_EQ(sp.slots[0].time_ns, 3.0);
    EXPECT_DOUBLE_EQ(sp.slots[1].time_ns, 5.2);
    EXPECT_DOUBLE_EQ(sp.slots[2].time_ns, 7.4);
}

TEST(Analyze, DelayMismatchBeyondOnePercent) {
    const TimeBinQubit q = prepare_qubit(Interferometer{2.2});
    EXPECT_NO_THROW(analyze(q, Interferometer{2.2 * 1.009}));
    EXPECT_THROW(analyze(q, Interferometer{2.2 * 1.02}), DomainError);
}

TEST(Interferometer, Validation) {
    EXPECT_THROW(prepare_qubit(Interferometer{0.0}), DomainError);
    EXPECT_THROW(prepare_qubit(Interferometer{2.2, 0.0, 1.2}), DomainError);
    EXPECT_THROW(prepare_qubit(Interferometer{2.2, 0.0, 1.0, 1.0}), DomainError);
    EXPECT_THROW(apply_conversion_phase(TimeBinQubit{}, 1.5), DomainError);
}

TEST(FringeOracle, RawFromNet) {
    const auto o = fringe_oracle({14.0, 0.96, 1.0, 0.6, 0.4, 0.0});
    EXPECT_NEAR(o.v_raw(), 0.84, 1e-15);
    EXPECT_NEAR(o.counts(0.0), 7.0 * 1.96 + 1.0, 1e-12);
    EXPECT_NEAR(o.counts(kPi), 7.0 * 0.04 + 1.0, 1e-12);
}

TEST(FringeOracle, PenaltiesMultiply) {
    const auto o = fringe_oracle({1.0, 0.9, 0.5, 0.0, 0.0, 0.3});
    EXPECT_DOUBLE_EQ(o.v_net, 0.45);
    EXPECT_DOUBLE_EQ(o.v_raw(), 0.45);
    const std::vector<double> phases{0.3, 0.3 + kPi};
    const auto c = o.curve(phases);
    EXPECT_NEAR(c[0], 0.725, 1e-15);
    EXPECT_NEAR(c[1], 0.275, 1e-15);
}

TEST(FringeOracle, Errors) {
    EXPECT_THROW(fringe_oracle({0.0}), DomainError);
    EXPECT_THROW(fringe_oracle({1.0, 1.2}), DomainError);
    EXPECT_THROW(fringe_oracle({1.0, 1.0, 1.0, -1.0}), DomainError);
}
