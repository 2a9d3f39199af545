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

#ifndef DFGQI_RNG_H
#define DFGQI_RNG_H

#include <bit>
#include <cstdint>
#include <limits>

namespace dfgqi {

/// Counter-based generator: the n-th output is a pure function of
/// (key, n), namely the SplitMix64 finalizer applied to key + (n+1) * gamma.
/// Streams are therefore reproducible, cheap to fork, and can be advanced
/// without generating the skipped values. Satisfies
/// std::uniform_random_bit_generator, so it plugs into <random> distributions.
class CounterRng {
   public:
    using result_type = std::uint64_t;

    explicit CounterRng(std::uint64_t key, std::uint64_t counter = 0) : key_(key), counter_(counter) {
    }

    static constexpr result_type min() {
        return 0;
    }
    static constexpr result_type max() {
        return std::numeric_limits<result_type>::max();
    }

    result_type operator()() {
        return at(key_, counter_++);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() {
        return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
    }

    void advance(std::uint64_t n) {
        counter_ += n;
    }
    std::uint64_t key() const {
        return key_;
    }
    std::uint64_t counter() const {
        return counter_;
    }

    static constexpr std::uint64_t at(std::uint64_t key, std::uint64_t n) {
        return mix(key + (n + 1) * kGamma);
    }

    static constexpr std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

   private:
    static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;
    std::uint64_t key_;
    std::uint64_t counter_;
};

/// Key of an independent substream. Derivation: fold each label into the
/// master seed with one SplitMix64 round,
///     k0 = mix(seed), k_{i+1} = mix(k_i ^ mix(label_i + gamma)).
/// Labels are the point label (bit pattern of the scanned value), then a
/// purpose tag (source, background, detector, ...).
constexpr std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t label, std::uint64_t purpose) {
    constexpr std::uint64_t gamma = 0x9e3779b97f4a7c15ULL;
    std::uint64_t k = CounterRng::mix(seed);
    k = CounterRng::mix(k ^ CounterRng::mix(label + gamma));
    k = CounterRng::mix(k ^ CounterRng::mix(purpose + gamma));
    return k;
}

/// Point label for a scanned double value; equal values share a stream.
inline std::uint64_t value_label(double v) {
    return std::bit_cast<std::uint64_t>(v == 0.0 ? 0.0 : v);
}

}  // namespace dfgqi

#endif
