// Copyright 2026 The qread Authors
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

#ifndef QREAD_RANDOM_H
#define QREAD_RANDOM_H

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>

namespace qread {

/// Random stream used throughout the simulator. Pinned in run manifests.
using Rng = std::mt19937_64;

inline constexpr const char* kRngName = "mt19937_64/seed_seq(splitmix64-path-hash)";

/// Deterministic mapping from (master seed, index path) to an independent
/// stream. Distinct paths give unrelated seeds; the same path always gives the
/// same stream.
Rng derive_substream(std::uint64_t master_seed, std::span<const std::uint64_t> path);
Rng derive_substream(std::uint64_t master_seed, std::initializer_list<std::uint64_t> path);

std::uint64_t splitmix64(std::uint64_t x);

// The helpers below avoid std::*_distribution, whose algorithms are
// implementation-defined, so outputs are reproducible across standard
// libraries.

/// Uniform on [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Exponential with the given rate (> 0).
inline double exponential(Rng& rng, double rate) { return -std::log1p(-uniform01(rng)) / rate; }

inline bool bernoulli(Rng& rng, double p) { return uniform01(rng) < p; }

/// Uniform integer on [lo, hi].
inline int uniform_int(Rng& rng, int lo, int hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<int>(static_cast<std::uint64_t>(uniform01(rng) * static_cast<double>(span)));
}

}  // namespace qread

#endif  // QREAD_RANDOM_H
