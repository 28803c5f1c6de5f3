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

#include "qread/random.h"

#include <array>
#include <vector>

namespace qread {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

Rng derive_substream(std::uint64_t master_seed, std::span<const std::uint64_t> path) {
    // Hash the path with its length folded in so [a] and [a, 0] differ.
    std::uint64_t h = splitmix64(master_seed ^ 0x6a09e667f3bcc908ULL);
    h = splitmix64(h ^ static_cast<std::uint64_t>(path.size()));
    for (std::uint64_t index : path) {
        h = splitmix64(h ^ splitmix64(index + 0x3c6ef372fe94f82bULL));
    }
    std::array<std::uint32_t, 8> words{};
    std::uint64_t state = h;
    for (std::size_t i = 0; i < words.size(); i += 2) {
        state = splitmix64(state);
        words[i] = static_cast<std::uint32_t>(state);
        words[i + 1] = static_cast<std::uint32_t>(state >> 32);
    }
    std::seed_seq seq(words.begin(), words.end());
    return Rng(seq);
}

Rng derive_substream(std::uint64_t master_seed, std::initializer_list<std::uint64_t> path) {
    const std::vector<std::uint64_t> v(path);
    return derive_substream(master_seed, std::span<const std::uint64_t>(v));
}

}  // namespace qread
