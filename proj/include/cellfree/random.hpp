// SPDX-License-Identifier: Apache-2.0
//
// cellfree: multi-CPU cell-free massive MIMO downlink simulator
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------


#ifndef CELLFREE_RANDOM_HPP
#define CELLFREE_RANDOM_HPP

#include "cellfree/types.hpp"

#include <cstdint>
#include <random>

namespace cellfree {

using Rng = std::mt19937_64;

// SplitMix64 finalizer. Used both as the seed-derivation hash and to decorrelate
// neighbouring indices before they reach the Mersenne Twister seeding.
constexpr std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Child seed for `index` under `parent`. Seeds form a tree
// (base_seed -> drop -> stream), so a drop's randomness depends only on its
// own path and never on scheduling order.
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index) {
    return splitmix64(parent ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

enum class Stream : std::uint64_t {
    deployment = 1,
    shadowing = 2,
    pilots = 3,
    oracle = 4,
};

inline Rng make_rng(std::uint64_t seed, Stream stream) {
    return Rng(derive_seed(seed, static_cast<std::uint64_t>(stream)));
}

// Standard circularly-symmetric complex Gaussian, CN(0, 1).
template <typename Generator>
Complex complex_normal(Generator &gen) {
    std::normal_distribution<double> half(0.0, std::sqrt(0.5));
    const double re = half(gen);
    const double im = half(gen);
    return {re, im};
}

template <typename Generator>
CVector complex_normal_vector(Eigen::Index n, Generator &gen) {
    CVector v(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        v(i) = complex_normal(gen);
    }
    return v;
}

} // namespace cellfree

#endif // CELLFREE_RANDOM_HPP
