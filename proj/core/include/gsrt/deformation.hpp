// Copyright Contributors to the gsrt Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "gsrt/gaussian.hpp"
#include "gsrt/hexplane.hpp"

#include <variant>
#include <vector>

namespace gsrt {

inline constexpr double kMinScale = 1e-6;

struct NoDeformation {};

/// Per-keyframe, per-gaussian residuals, linearly interpolated in time.
struct KeyframeTrack {
    std::vector<double> times;
    std::vector<std::vector<Residuals>> deltas; // [keyframe][gaussian]

    void validate(std::size_t gaussian_count) const;
    /// Residual of gaussian `index` at time t; clamps t to the keyframe range.
    Residuals at(std::size_t index, double t) const;
};

using Deformation = std::variant<NoDeformation, KeyframeTrack, HexPlaneField>;

void validate_deformation(const Deformation &deformation, std::size_t gaussian_count);

/// Adds residuals to one gaussian. Rotation is renormalized after the
/// componentwise sum (left untouched for a zero increment), scales are
/// floored at kMinScale; opacity and SH pass through.
Gaussian apply_residuals(const Gaussian &g, const Residuals &r);

/// Residuals of every canonical gaussian at time t.
std::vector<Residuals> residuals_at(const SceneSnapshot &canonical, const Deformation &deformation,
                                    double t);

/// Deformed snapshot G_t. Throws InvalidParameter when t is outside [0, 1].
SceneSnapshot deform_snapshot(const SceneSnapshot &canonical, const Deformation &deformation,
                              double t);

} // namespace gsrt
