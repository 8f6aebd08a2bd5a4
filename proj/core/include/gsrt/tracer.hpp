// Copyright Contributors to the gsrt Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "gsrt/bvh.hpp"
#include "gsrt/gaussian.hpp"
#include "gsrt/ray.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

namespace gsrt {

inline constexpr double kAlphaMax = 0.999;
inline constexpr double kMinTransmittance = 1e-4;
inline constexpr int kDefaultKBuffer = 16;

struct GaussianHit {
    std::uint32_t gaussian_index = 0;
    double t_peak = 0.0;
    double response = 0.0;
};

/// Orders hits by t_peak, then by gaussian index.
inline bool hit_before(const GaussianHit &a, const GaussianHit &b) {
    return a.t_peak < b.t_peak || (a.t_peak == b.t_peak && a.gaussian_index < b.gaussian_index);
}

/// Peak of the gaussian density along the ray segment. Empty when the peak
/// response is below kResponseEpsilon.
std::optional<GaussianHit> gaussian_peak_response(const Ray &ray, const Gaussian &g,
                                                  std::uint32_t index = 0);

/// Same evaluation against a cached primitive.
std::optional<GaussianHit> peak_response(const Ray &ray, const BvhPrimitive &prim,
                                         std::uint32_t index);

struct TraceOptions {
    int k = kDefaultKBuffer;
    Rgb background = Rgb::Zero();
};

struct TraceResult {
    Rgb radiance = Rgb::Zero(); // includes background * transmittance
    double transmittance = 1.0;
};

/// One composited hit, kept for the adjoint pass.
struct CompositedHit {
    GaussianHit hit;
    double alpha = 0.0;
    bool alpha_clamped = false;
    double transmittance = 1.0; // T_i, before this hit
    Rgb color = Rgb::Zero();
    std::array<bool, 3> color_unclamped{};
};

struct TraceRecord {
    TraceResult result;
    std::vector<CompositedHit> hits; // front to back
};

/// Front-to-back compositing of the ray's hits with a k-buffer: each pass
/// gathers the k nearest hits beyond the last consumed one, composites them,
/// and resumes. Stops once transmittance drops below kMinTransmittance.
TraceResult trace_ray(const Ray &ray, const SceneSnapshot &snapshot, const Bvh &bvh,
                      const TraceOptions &options = {});

TraceRecord trace_ray_recorded(const Ray &ray, const SceneSnapshot &snapshot, const Bvh &bvh,
                               const TraceOptions &options = {});

/// Every hit along the ray found through the BVH, ordered by hit_before.
std::vector<GaussianHit> collect_hits(const Ray &ray, const Bvh &bvh);

/// Composites hits already sorted front to back; shared by the k-buffer
/// tracer and reference compositors.
class Compositor {
public:
    Compositor(const SceneSnapshot &snapshot, const Vec3 &view_dir, TraceRecord *record = nullptr)
        : snapshot_(snapshot), view_dir_(view_dir), record_(record) {}

    /// Returns false once the ray is saturated.
    bool add(const GaussianHit &hit);
    bool saturated() const { return transmittance_ < kMinTransmittance; }
    TraceResult finish(const Rgb &background) const;

private:
    const SceneSnapshot &snapshot_;
    Vec3 view_dir_;
    TraceRecord *record_;
    Rgb radiance_ = Rgb::Zero();
    double transmittance_ = 1.0;
};

} // namespace gsrt
