// Copyright Contributors to the gsrt Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "gsrt/types.hpp"

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace gsrt {

inline constexpr int kMaxShDegree = 3;

/// Number of SH coefficients per color channel for a given degree.
constexpr std::size_t sh_coeff_count(int degree) {
    return static_cast<std::size_t>((degree + 1) * (degree + 1));
}

/// One anisotropic primitive. Opacity is post-activation and scale holds
/// standard deviations along the rotated principal axes.
struct Gaussian {
    Vec3 mean = Vec3::Zero();
    Quat rotation = Quat::Identity();
    Vec3 scale = Vec3::Ones();
    double opacity = 1.0;
    std::vector<Rgb> sh; // (degree + 1)^2 entries, band-major
};

/// All Gaussians of a scene at one instant.
struct SceneSnapshot {
    std::vector<Gaussian> gaussians;
    double time = 0.0;
    int sh_degree = 0;

    std::size_t size() const { return gaussians.size(); }
};

/// Throws InvariantViolation naming the offending field.
void validate_gaussian(const Gaussian &g, int sh_degree, std::size_t index);

/// Throws on an empty snapshot or any invalid member.
void validate_snapshot(const SceneSnapshot &snapshot);

/// Rotation matrix of a unit quaternion.
Mat3 rotation_matrix(const Quat &q);

/// Sigma = R S S^T R^T with S = diag(scale).
Mat3 covariance_from_params(const Quat &rotation, const Vec3 &scale);

/// Sigma^-1 = R S^-2 R^T, formed directly from the factors.
Mat3 precision_from_params(const Quat &rotation, const Vec3 &scale);

/// Real SH basis values Y_b(dir) for b < (degree+1)^2.
std::array<double, 16> sh_basis(int degree, const Vec3 &dir);

/// Degree implied by a coefficient count; throws InvalidParameter unless the
/// count is one of 1, 4, 9, 16.
int sh_degree_from_count(std::size_t count);

struct ShColor {
    Rgb color;
    /// Per channel: true when 0.5 + sum lies strictly inside (0, 1), so the
    /// clamp is inactive and the color is differentiable in the coefficients.
    std::array<bool, 3> unclamped;
};

ShColor sh_eval_color_detail(std::span<const Rgb> coeffs, const Vec3 &view_dir);

/// 0.5 + sum_b Y_b(view_dir) k_b, clamped to [0, 1] per channel.
Rgb sh_eval_color(std::span<const Rgb> coeffs, const Vec3 &view_dir);

/// Axis-aligned half extent of the kappa-sigma ellipsoid: kappa * sqrt(diag(Sigma)).
Vec3 axis_aligned_extent(const Quat &rotation, const Vec3 &scale, double kappa);

} // namespace gsrt
