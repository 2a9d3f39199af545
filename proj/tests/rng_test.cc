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

#include "dfgqi/rng.h"

#include <cmath>
#include <set>

#include <gtest/gtest.h>

using namespace dfgqi;

TEST(CounterRng, MatchesSplitMix64Reference) {
    // First outputs of splitmix64 seeded with 0.
    CounterRng r(0);
    EXPECT_EQ(r(), 0xe220a8397b1dcdafULL);
    EXPECT_EQ(r(), 0x6e789e6aa1b965f4ULL);
    EXPECT_EQ(r(), 0x06c45d188009454fULL);
}

TEST(CounterRng, IsRandomAccess) {
    CounterRng a(42);
    for (int i = 0; i < 100; ++i) {
        a();
    }
    CounterRng b(42, 100);
    EXPECT_EQ(a(), b());
    CounterRng c(42);
    c.advance(101);
    EXPECT_EQ(c(), CounterRng::at(42, 101));
}

TEST(CounterRng, UniformHasUnitInterval) {
    CounterRng r(7);
    double sum = 0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double u = r.uniform();
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
        sum += u;
    }
    EXPECT_NEAR(sum / n, 0.5, 4 * std::sqrt(1.0 / 12 / n));
}

TEST(DeriveStream, DistinctInputsGiveDistinctKeys) {
    std::set<std::uint64_t> keys;
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        for (std::uint64_t label = 0; label < 16; ++label) {
            for (std::uint64_t purpose = 1; purpose < 10; ++purpose) {
                keys.insert(derive_stream(seed, label, purpose));
            }
        }
    }
    EXPECT_EQ(keys.size(), 8u * 16u * 9u);
    EXPECT_NE(derive_stream(1, 2, 3), derive_stream(1, 3, 2));
}

TEST(DeriveStream, SubstreamsAreUncorrelated) {
    CounterRng a(derive_stream(5, value_label(0.1), 1));
    CounterRng b(derive_stream(5, value_label(0.2), 1));
    const int n = 100000;
    double sab = 0;
    for (int i = 0; i < n; ++i) {
        sab += (a.uniform() - 0.5) * (b.uniform() - 0.5);
    }
    EXPECT_NEAR(sab / n / (1.0 / 12), 0.0, 4 / std::sqrt(static_cast<double>(n)));
}

TEST(ValueLabel, SignedZeroSharesLabel) {
    EXPECT_EQ(value_label(-0.0), value_label(0.0));
    EXPECT_NE(value_label(1.0), value_label(-1.0));
}
