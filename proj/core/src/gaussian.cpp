// Copyright Contributors to the gsrt Project
// SPDX-License-Identifier: Apache-2.0

#include "gsrt/gaussian.hpp"

#include "gsrt/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace gsrt {

namespace {

constexpr double kShC0 = 0.28209479177387814;
constexpr double kShC1 = 0.4886025119029199;
constexpr double kShC2[] = {1.0925484305920792, -1.0925484305920792, 0.31539156525252005,
                            -1.0925484305920792, 0.5462742152960396};
constexpr double kShC3[] = {-0.5900435899266435, 2.890611442640554, -0.4570457994644658,
                            0.3731763325901154,  -0.4570457994644658, 1.445305721320277,
                            -0.5900435899266435};

bool finite(const Vec3 &v) { return v.allFinite(); }

void require_finite_params(const Quat &rotation, const Vec3 &scale) {
    if (!rotation.coeffs().allFinite() || !scale.allFinite()) {
        throw InvalidParameter("covariance parameters must be finite");
    }
}

} // namespace

void validate_gaussian(const Gaussian &g, int sh_degree, std::size_t index) {
    if (!finite(g.mean)) {
        throw InvariantViolation(index, "mean", "non-finite component");
    }
    if (!g.rotation.coeffs().allFinite() || std::abs(g.rotation.norm() - 1.0) > 1e-6) {
        throw InvariantViolation(index, "rotation", "quaternion must have unit norm");
    }
    if (!finite(g.scale) || (g.scale.array() <= 0.0).any()) {
        throw InvariantViolation(index, "scale", "components must be finite and strictly positive");
    }
    if (!std::isfinite(g.opacity) || g.opacity < 0.0 || g.opacity > 1.0) {
        throw InvariantViolation(index, "opacity", "must lie in [0, 1]");
    }
    if (g.sh.size() != sh_coeff_count(sh_degree)) {
        throw InvariantViolation(index, "sh",
                                 "expected " + std::to_string(sh_coeff_count(sh_degree)) +
                                     " coefficients, got " + std::to_string(g.sh.size()));
    }
    for (const auto &c : g.sh) {
        if (!finite(c)) {
            throw InvariantViolation(index, "sh", "non-finite coefficient");
        }
    }
}

void validate_snapshot(const SceneSnapshot &snapshot) {
    if (snapshot.sh_degree < 0 || snapshot.sh_degree > kMaxShDegree) {
        throw InvalidParameter("sh_degree must be in [0, 3], got " +
                               std::to_string(snapshot.sh_degree));
    }
    if (snapshot.gaussians.empty()) {
        throw InvalidParameter("scene has no gaussians");
    }
    for (std::size_t i = 0; i < snapshot.gaussians.size(); ++i) {
        validate_gaussian(snapshot.gaussians[i], snapshot.sh_degree, i);
    }
}

Mat3 rotation_matrix(const Quat &q) {
    const double w = q.w(), x = q.x(), y = q.y(), z = q.z();
    Mat3 r;
    r << 1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - w * z), 2.0 * (x * z + w * y),
        2.0 * (x * y + w * z), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - w * x),
        2.0 * (x * z - w * y), 2.0 * (y * z + w * x), 1.0 - 2.0 * (x * x + y * y);
    return r;
}

Mat3 covariance_from_params(const Quat &rotation, const Vec3 &scale) {
    require_finite_params(rotation, scale);
    const Mat3 r = rotation_matrix(rotation);
    const Mat3 m = r * scale.asDiagonal();
    return m * m.transpose();
}

Mat3 precision_from_params(const Quat &rotation, const Vec3 &scale) {
    require_finite_params(rotation, scale);
    const Mat3 r = rotation_matrix(rotation);
    const Mat3 m = r * scale.cwiseInverse().asDiagonal();
    return m * m.transpose();
}

Vec3 axis_aligned_extent(const Quat &rotation, const Vec3 &scale, double kappa) {
    const Mat3 cov = covariance_from_params(rotation, scale);
    return kappa * cov.diagonal().cwiseMax(0.0).cwiseSqrt();
}

std::array<double, 16> sh_basis(int degree, const Vec3 &dir) {
    std::array<double, 16> b{};
    const double x = dir.x(), y = dir.y(), z = dir.z();
    b[0] = kShC0;
    if (degree < 1) {
        return b;
    }
    b[1] = -kShC1 * y;
    b[2] = kShC1 * z;
    b[3] = -kShC1 * x;
    if (degree < 2) {
        return b;
    }
    const double xx = x * x, yy = y * y, zz = z * z;
    const double xy = x * y, yz = y * z, xz = x * z;
    b[4] = kShC2[0] * xy;
    b[5] = kShC2[1] * yz;
    b[6] = kShC2[2] * (2.0 * zz - xx - yy);
    b[7] = kShC2[3] * xz;
    b[8] = kShC2[4] * (xx - yy);
    if (degree < 3) {
        return b;
    }
    b[9] = kShC3[0] * y * (3.0 * xx - yy);
    b[10] = kShC3[1] * xy * z;
    b[11] = kShC3[2] * y * (4.0 * zz - xx - yy);
    b[12] = kShC3[3] * z * (2.0 * zz - 3.0 * xx - 3.0 * yy);
    b[13] = kShC3[4] * x * (4.0 * zz - xx - yy);
    b[14] = kShC3[5] * z * (xx - yy);
    b[15] = kShC3[6] * x * (xx - 3.0 * yy);
    return b;
}

int sh_degree_from_count(std::size_t count) {
    for (int d = 0; d <= kMaxShDegree; ++d) {
        if (sh_coeff_count(d) == count) {
            return d;
        }
    }
    throw InvalidParameter("SH coefficient count " + std::to_string(count) +
                           " is not one of 1, 4, 9, 16");
}

ShColor sh_eval_color_detail(std::span<const Rgb> coeffs, const Vec3 &view_dir) {
    const int degree = sh_degree_from_count(coeffs.size());
    const auto basis = sh_basis(degree, view_dir);
    Rgb sum = Rgb::Zero();
    for (std::size_t b = 0; b < coeffs.size(); ++b) {
        sum += basis[b] * coeffs[b];
    }
    ShColor out;
    for (int c = 0; c < 3; ++c) {
        const double v = 0.5 + sum[c];
        out.unclamped[c] = v > 0.0 && v < 1.0;
        out.color[c] = std::clamp(v, 0.0, 1.0);
    }
    return out;
}

Rgb sh_eval_color(std::span<const Rgb> coeffs, const Vec3 &view_dir) {
    return sh_eval_color_detail(coeffs, view_dir).color;
}

} // namespace gsrt
