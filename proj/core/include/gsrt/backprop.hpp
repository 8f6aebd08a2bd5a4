// Copyright Contributors to the gsrt Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "gsrt/bvh.hpp"
#include "gsrt/gaussian.hpp"
#include "gsrt/ray.hpp"
#include "gsrt/tracer.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace gsrt {

/// Gradient with respect to the optimizer's raw parameters of one gaussian:
/// mean, log of scale, the unnormalized quaternion (w, x, y, z), the logit of
/// opacity, and the SH coefficients.
struct GaussianGradient {
    Vec3 mean = Vec3::Zero();
    Vec3 log_scale = Vec3::Zero();
    Vec4 rotation = Vec4::Zero();
    double opacity_logit = 0.0;
    std::array<Rgb, 16> sh{};

    GaussianGradient() { sh.fill(Rgb::Zero()); }
    GaussianGradient &operator+=(const GaussianGradient &o);
};

struct HitGradient {
    std::uint32_t gaussian_index = 0;
    GaussianGradient grad;
};

/// Adjoint of one recorded trace for an upstream radiance gradient dC.
/// Hits are returned in compositing order.
std::vector<HitGradient> backprop_record(const TraceRecord &record, const Ray &ray,
                                         const SceneSnapshot &snapshot, const Bvh &bvh,
                                         const Rgb &d_radiance, const Rgb &background);

/// Replays the forward trace of `ray` and backpropagates dC through it.
std::vector<HitGradient> backprop_ray(const Ray &ray, const SceneSnapshot &snapshot,
                                      const Bvh &bvh, const Rgb &d_radiance,
                                      const TraceOptions &options = {});

} // namespace gsrt
