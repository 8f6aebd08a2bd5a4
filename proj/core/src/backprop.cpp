// Copyright Contributors to the gsrt Project
// SPDX-License-Identifier: Apache-2.0

#include "gsrt/backprop.hpp"

#include <cmath>

namespace gsrt {

GaussianGradient &GaussianGradient::operator+=(const GaussianGradient &o) {
    mean += o.mean;
    log_scale += o.log_scale;
    rotation += o.rotation;
    opacity_logit += o.opacity_logit;
    for (std::size_t b = 0; b < sh.size(); ++b) {
        sh[b] += o.sh[b];
    }
    return *this;
}

namespace {

// dL/dq for R(q) with q = (w, x, y, z) unit, given dL/dR.
Vec4 rotation_adjoint(const Quat &q, const Mat3 &g) {
    const double w = q.w(), x = q.x(), y = q.y(), z = q.z();
    Vec4 d;
    d[0] = 2.0 * (-z * g(0, 1) + y * g(0, 2) + z * g(1, 0) - x * g(1, 2) - y * g(2, 0) +
                  x * g(2, 1));
    d[1] = 2.0 * (y * g(0, 1) + z * g(0, 2) + y * g(1, 0) - 2.0 * x * g(1, 1) - w * g(1, 2) +
                  z * g(2, 0) + w * g(2, 1) - 2.0 * x * g(2, 2));
    d[2] = 2.0 * (-2.0 * y * g(0, 0) + x * g(0, 1) + w * g(0, 2) + x * g(1, 0) + z * g(1, 2) -
                  w * g(2, 0) + z * g(2, 1) - 2.0 * y * g(2, 2));
    d[3] = 2.0 * (-2.0 * z * g(0, 0) - w * g(0, 1) + x * g(0, 2) + w * g(1, 0) -
                  2.0 * z * g(1, 1) + y * g(1, 2) + x * g(2, 0) + y * g(2, 1));
    // The forward pass normalizes q; project out the radial component.
    const Vec4 qv = to_wxyz(q);
    const double n = qv.norm();
    const Vec4 u = qv / n;
    return (d - u * u.dot(d)) / n;
}

} // namespace

std::vector<HitGradient> backprop_record(const TraceRecord &record, const Ray &ray,
                                         const SceneSnapshot &snapshot, const Bvh &bvh,
                                         const Rgb &d_radiance, const Rgb &background) {
    const auto &hits = record.hits;
    std::vector<HitGradient> out(hits.size());

    // suffix = sum_{j > i} T_j a_j c_j + T_final * background
    Rgb suffix = record.result.transmittance * background;
    for (std::size_t n = hits.size(); n-- > 0;) {
        const CompositedHit &h = hits[n];
        const Gaussian &g = snapshot.gaussians[h.hit.gaussian_index];
        HitGradient &hg = out[n];
        hg.gaussian_index = h.hit.gaussian_index;

        const double weight = h.transmittance * h.alpha;
        const Rgb d_color = weight * d_radiance;
        const double d_alpha =
            d_radiance.dot(h.transmittance * h.color - suffix / (1.0 - h.alpha));
        suffix += weight * h.color;

        const int degree = sh_degree_from_count(g.sh.size());
        const auto basis = sh_basis(degree, ray.direction);
        for (std::size_t b = 0; b < g.sh.size(); ++b) {
            for (int c = 0; c < 3; ++c) {
                hg.grad.sh[b][c] = h.color_unclamped[c] ? d_color[c] * basis[b] : 0.0;
            }
        }

        if (h.alpha_clamped) {
            continue;
        }
        const double rho = h.hit.response;
        hg.grad.opacity_logit = d_alpha * rho * g.opacity * (1.0 - g.opacity);
        const double d_rho = d_alpha * g.opacity;
        if (d_rho == 0.0) {
            continue;
        }

        // rho = exp(-q/2), q = D^T A D with D = o + t d - mu at the recorded t.
        const BvhPrimitive &prim = bvh.primitives()[h.hit.gaussian_index];
        const Vec3 delta = ray.at(h.hit.t_peak) - prim.mean;
        const Vec3 a_delta = prim.precision * delta;
        hg.grad.mean = d_rho * rho * a_delta;

        const Mat3 d_precision = (-0.5 * d_rho * rho) * (delta * delta.transpose());
        const Mat3 rot = rotation_matrix(g.rotation);
        Mat3 d_rot;
        for (int k = 0; k < 3; ++k) {
            const Vec3 col = rot.col(k);
            const double inv_s2 = 1.0 / (g.scale[k] * g.scale[k]);
            hg.grad.log_scale[k] = -2.0 * inv_s2 * col.dot(d_precision * col);
            d_rot.col(k) = 2.0 * inv_s2 * (d_precision * col);
        }
        hg.grad.rotation = rotation_adjoint(g.rotation, d_rot);
    }
    return out;
}

std::vector<HitGradient> backprop_ray(const Ray &ray, const SceneSnapshot &snapshot,
                                      const Bvh &bvh, const Rgb &d_radiance,
                                      const TraceOptions &options) {
    const TraceRecord record = trace_ray_recorded(ray, snapshot, bvh, options);
    return backprop_record(record, ray, snapshot, bvh, d_radiance, options.background);
}

} // namespace gsrt
