// Copyright Contributors to the gsrt Project
// SPDX-License-Identifier: Apache-2.0

#include "gsrt/sampling.hpp"

#include <cmath>
#include <numbers>

namespace gsrt {

namespace {

double to_unit(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

} // namespace

std::array<double, 2> counter_uniform2(std::uint64_t seed, std::uint32_t px, std::uint32_t py,
                                       std::uint64_t sample_index) {
    const std::uint64_t pixel_key = (static_cast<std::uint64_t>(py) << 32) | px;
    std::uint64_t h = mix64(seed);
    h = mix64(h ^ pixel_key);
    h = mix64(h ^ sample_index);
    return {to_unit(mix64(h ^ 0x1ULL)), to_unit(mix64(h ^ 0x2ULL))};
}

Eigen::Vector2d concentric_disk(double u1, double u2) {
    const double a = 2.0 * u1 - 1.0;
    const double b = 2.0 * u2 - 1.0;
    if (a == 0.0 && b == 0.0) {
        return Eigen::Vector2d::Zero();
    }
    double r = 0.0;
    double phi = 0.0;
    if (std::abs(a) > std::abs(b)) {
        r = a;
        phi = (std::numbers::pi / 4.0) * (b / a);
    } else {
        r = b;
        phi = std::numbers::pi / 2.0 - (std::numbers::pi / 4.0) * (a / b);
    }
    return {r * std::cos(phi), r * std::sin(phi)};
}

} // namespace gsrt
