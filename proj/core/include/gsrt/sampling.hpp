// Copyright Contributors to the gsrt Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>

#include <array>
#include <cstdint>

namespace gsrt {

/// SplitMix64 finalizer; a bijective 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Stateless generator: the same (seed, pixel, sample) key always yields the
/// same pair of uniforms in [0, 1).
std::array<double, 2> counter_uniform2(std::uint64_t seed, std::uint32_t px, std::uint32_t py,
                                       std::uint64_t sample_index);

/// Shirley-Chiu concentric map from [0,1)^2 onto the unit disk.
Eigen::Vector2d concentric_disk(double u1, double u2);

} // namespace gsrt
