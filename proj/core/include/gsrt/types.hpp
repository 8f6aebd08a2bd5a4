// Copyright Contributors to the gsrt Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace gsrt {

using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat3 = Eigen::Matrix3d;
using Quat = Eigen::Quaterniond;
using Rgb = Eigen::Vector3d;

/// Quaternion from (w, x, y, z) order, the order used in every file format.
inline Quat quat_wxyz(double w, double x, double y, double z) { return Quat(w, x, y, z); }

inline Vec4 to_wxyz(const Quat &q) { return Vec4(q.w(), q.x(), q.y(), q.z()); }

inline Quat from_wxyz(const Vec4 &v) { return Quat(v[0], v[1], v[2], v[3]); }

} // namespace gsrt
