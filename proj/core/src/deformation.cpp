// Copyright Contributors to the gsrt Project
// SPDX-License-Identifier: Apache-2.0

#include "gsrt/deformation.hpp"

#include "gsrt/error.hpp"

#include <algorithm>
#include <string>

namespace gsrt {

void KeyframeTrack::validate(std::size_t gaussian_count) const {
    if (times.empty()) {
        throw InvalidParameter("keyframe track has no keyframes");
    }
    if (deltas.size() != times.size()) {
        throw InvalidParameter("keyframe track needs one delta array per keyframe");
    }
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (!(times[k] >= 0.0 && times[k] <= 1.0)) {
            throw InvalidParameter("keyframe time " + std::to_string(k) + " outside [0, 1]");
        }
        if (k > 0 && !(times[k] > times[k - 1])) {
            throw InvalidParameter("keyframe times must be strictly increasing");
        }
        if (deltas[k].size() != gaussian_count) {
            throw InvalidParameter("keyframe " + std::to_string(k) + " has " +
                                   std::to_string(deltas[k].size()) + " deltas for " +
                                   std::to_string(gaussian_count) + " gaussians");
        }
    }
}

Residuals KeyframeTrack::at(std::size_t index, double t) const {
    if (t <= times.front()) {
        return deltas.front()[index];
    }
    if (t >= times.back()) {
        return deltas.back()[index];
    }
    const auto hi = static_cast<std::size_t>(std::upper_bound(times.begin(), times.end(), t) -
                                             times.begin());
    const std::size_t lo = hi - 1;
    const double w = (t - times[lo]) / (times[hi] - times[lo]);
    const Residuals &a = deltas[lo][index];
    const Residuals &b = deltas[hi][index];
    Residuals r;
    r.mean = (1.0 - w) * a.mean + w * b.mean;
    r.rotation = (1.0 - w) * a.rotation + w * b.rotation;
    r.scale = (1.0 - w) * a.scale + w * b.scale;
    return r;
}

void validate_deformation(const Deformation &deformation, std::size_t gaussian_count) {
    if (const auto *track = std::get_if<KeyframeTrack>(&deformation)) {
        track->validate(gaussian_count);
    } else if (const auto *field = std::get_if<HexPlaneField>(&deformation)) {
        field->validate();
    }
}

Gaussian apply_residuals(const Gaussian &g, const Residuals &r) {
    Gaussian out = g;
    out.mean = g.mean + r.mean;
    if (!r.rotation.isZero(0.0)) {
        const Vec4 q = to_wxyz(g.rotation) + r.rotation;
        const double n = q.norm();
        out.rotation = n > 0.0 ? from_wxyz(q / n) : g.rotation;
    }
    out.scale = (g.scale + r.scale).cwiseMax(kMinScale);
    return out;
}

std::vector<Residuals> residuals_at(const SceneSnapshot &canonical, const Deformation &deformation,
                                    double t) {
    std::vector<Residuals> out(canonical.size());
    if (const auto *track = std::get_if<KeyframeTrack>(&deformation)) {
        for (std::size_t i = 0; i < out.size(); ++i) {
            out[i] = track->at(i, t);
        }
    } else if (const auto *field = std::get_if<HexPlaneField>(&deformation)) {
        for (std::size_t i = 0; i < out.size(); ++i) {
            out[i] = decode_residuals(encode_spacetime(*field, canonical.gaussians[i].mean, t),
                                      field->heads);
        }
    }
    return out;
}

SceneSnapshot deform_snapshot(const SceneSnapshot &canonical, const Deformation &deformation,
                              double t) {
    if (!(t >= 0.0 && t <= 1.0)) {
        throw InvalidParameter("deformation time " + std::to_string(t) + " outside [0, 1]");
    }
    SceneSnapshot out;
    out.sh_degree = canonical.sh_degree;
    out.time = t;
    if (std::holds_alternative<NoDeformation>(deformation)) {
        out.gaussians = canonical.gaussians;
        return out;
    }
    const auto residuals = residuals_at(canonical, deformation, t);
    out.gaussians.reserve(canonical.size());
    for (std::size_t i = 0; i < canonical.size(); ++i) {
        out.gaussians.push_back(apply_residuals(canonical.gaussians[i], residuals[i]));
    }
    return out;
}

} // namespace gsrt
