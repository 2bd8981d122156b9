/*
 Copyright 2026 The ldslab Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#ifndef LDSLAB_RNG_HPP
#define LDSLAB_RNG_HPP

#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace ldslab {

// Random streams.
//
// Every random quantity in the library is drawn from a std::mt19937_64 engine.
// Engines are never shared between independent units of work; instead a
// substream is derived from (seed, index) by two rounds of the SplitMix64
// finalizer. Trajectory i of a dataset always uses substream(seed, i), so a
// dataset is bit-identical no matter how many worker threads produced it.

/// SplitMix64 finalizer (Steele, Lea & Flood).
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept {
    return splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632BE59BD9B4E019ULL));
}

using Engine = std::mt19937_64;

inline Engine substream(std::uint64_t seed, std::uint64_t index) {
    return Engine(derive_seed(seed, index));
}

/// Standard normal vector of the given length.
inline Eigen::VectorXd standard_normal(Engine& eng, Eigen::Index size) {
    std::normal_distribution<double> nd(0.0, 1.0);
    Eigen::VectorXd v(size);
    for (Eigen::Index i = 0; i < size; ++i) v(i) = nd(eng);
    return v;
}

/// Uniformly distributed point on the unit sphere.
inline Eigen::VectorXd random_unit_vector(Engine& eng, Eigen::Index size) {
    Eigen::VectorXd v = standard_normal(eng, size);
    while (v.norm() == 0.0) v = standard_normal(eng, size);
    return v / v.norm();
}

}  // namespace ldslab

#endif  // LDSLAB_RNG_HPP
