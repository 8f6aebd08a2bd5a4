// Copyright Contributors to the gsrt Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "gsrt/types.hpp"

#include <limits>

namespace gsrt {

struct Ray {
    Vec3 origin = Vec3::Zero();
    Vec3 direction = Vec3(0.0, 0.0, -1.0); // unit length
    double t_min = 0.0;
    double t_max = std::numeric_limits<double>::infinity();

    Vec3 at(double t) const { return origin + t * direction; }
};

} // namespace gsrt
