// Copyright Contributors to the gsrt Project
// SPDX-License-Identifier: Apache-2.0

#include "gsrt/fitter.hpp"

#include "gsrt/bvh.hpp"
#include "gsrt/deformation.hpp"
#include "gsrt/error.hpp"
#include "gsrt/metrics.hpp"
#include "gsrt/parallel.hpp"
#include "gsrt/tracer.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace gsrt {

void FitConfig::validate() const {
    for (double r : {lr.mean, lr.log_scale, lr.rotation, lr.opacity_logit, lr.sh}) {
        if (!(r >= 0.0)) {
            throw InvalidParameter("learning rates must be non-negative");
        }
    }
    if (iterations < 1 || coarse_iterations < 0) {
        throw InvalidParameter("iteration count must be at least 1");
    }
    if (densify_interval < 0) {
        throw InvalidParameter("densify interval must be non-negative");
    }
    if (!(densify_threshold > 0.0)) {
        throw InvalidParameter("densify threshold must be positive");
    }
    if (!(split_scale_divisor > 0.0) || !(split_scale_fraction >= 0.0)) {
        throw InvalidParameter("split parameters must be positive");
    }
    if (!(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0 && adam_epsilon > 0.0)) {
        throw InvalidParameter("Adam constants out of range");
    }
    if (k < 1 || threads < 1) {
        throw InvalidParameter("k and threads must be at least 1");
    }
}

void ParamGradients::zero_step() {
    std::fill(per_gaussian.begin(), per_gaussian.end(), GaussianGradient{});
}

void ParamGradients::reset_accumulators() {
    std::fill(mean_grad_max.begin(), mean_grad_max.end(), 0.0);
    std::fill(camera_distance.begin(), camera_distance.end(), 0.0);
}

double l1_loss(const ImageBuffer &rendered, const ImageBuffer &reference) {
    if (rendered.width() != reference.width() || rendered.height() != reference.height()) {
        throw InvalidParameter("l1_loss: image dimensions differ");
    }
    if (rendered.data().empty()) {
        throw InvalidParameter("l1_loss: empty images");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < rendered.data().size(); ++i) {
        sum += std::abs(rendered.data()[i] - reference.data()[i]);
    }
    return sum / static_cast<double>(rendered.data().size());
}

// ---------------------------------------------------------------------------
// Optimizer

AdamOptimizer::AdamOptimizer(const FitConfig &config, std::size_t gaussian_count, int sh_count)
    : config_(config), sh_count_(sh_count) {
    state_.resize(gaussian_count, zero_moments());
}

AdamOptimizer::GaussianMoments AdamOptimizer::zero_moments() const {
    auto moments = [](std::size_t n) { return Moments{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)}; };
    return {moments(3), moments(3), moments(4), moments(1),
            moments(static_cast<std::size_t>(sh_count_) * 3)};
}

void AdamOptimizer::remap(const std::vector<std::size_t> &parent, const std::vector<bool> &fresh) {
    std::vector<GaussianMoments> next;
    next.reserve(parent.size());
    for (std::size_t i = 0; i < parent.size(); ++i) {
        next.push_back(fresh[i] ? zero_moments() : state_.at(parent[i]));
    }
    state_ = std::move(next);
}

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double logit(double p) {
    const double c = std::clamp(p, 1e-12, 1.0 - 1e-12);
    return std::log(c / (1.0 - c));
}

} // namespace

void AdamOptimizer::step(SceneSnapshot &scene, const ParamGradients &grads) {
    if (state_.size() != scene.size() || grads.size() != scene.size()) {
        throw InvalidParameter("optimizer state does not match the scene size");
    }
    ++steps_;
    const double b1 = config_.beta1;
    const double b2 = config_.beta2;
    const double c1 = 1.0 - std::pow(b1, static_cast<double>(steps_));
    const double c2 = 1.0 - std::pow(b2, static_cast<double>(steps_));
    auto update = [&](Moments &mo, std::size_t j, double g, double lr, double &param) {
        mo.m[j] = b1 * mo.m[j] + (1.0 - b1) * g;
        mo.v[j] = b2 * mo.v[j] + (1.0 - b2) * g * g;
        param -= lr * (mo.m[j] / c1) / (std::sqrt(mo.v[j] / c2) + config_.adam_epsilon);
    };
    const LearningRates &lr = config_.lr;
    for (std::size_t i = 0; i < scene.size(); ++i) {
        Gaussian &g = scene.gaussians[i];
        const GaussianGradient &d = grads.per_gaussian[i];
        GaussianMoments &st = state_[i];
        if (lr.mean > 0.0) {
            for (int a = 0; a < 3; ++a) {
                update(st.mean, a, d.mean[a], lr.mean, g.mean[a]);
            }
        }
        if (lr.log_scale > 0.0) {
            for (int a = 0; a < 3; ++a) {
                double raw = std::log(g.scale[a]);
                update(st.log_scale, a, d.log_scale[a], lr.log_scale, raw);
                g.scale[a] = std::max(std::exp(raw), kMinScale);
            }
        }
        if (lr.rotation > 0.0) {
            Vec4 q = to_wxyz(g.rotation);
            for (int a = 0; a < 4; ++a) {
                update(st.rotation, a, d.rotation[a], lr.rotation, q[a]);
            }
            const double n = q.norm();
            if (n > 0.0 && std::isfinite(n)) {
                g.rotation = from_wxyz(q / n);
            }
        }
        if (lr.opacity_logit > 0.0) {
            double raw = logit(g.opacity);
            update(st.opacity, 0, d.opacity_logit, lr.opacity_logit, raw);
            g.opacity = sigmoid(raw);
        }
        if (lr.sh > 0.0) {
            for (std::size_t b = 0; b < g.sh.size(); ++b) {
                for (int c = 0; c < 3; ++c) {
                    update(st.sh, b * 3 + c, d.sh[b][c], lr.sh, g.sh[b][c]);
                }
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Densification

double scene_diagonal(const SceneSnapshot &scene) {
    Aabb box;
    for (const auto &g : scene.gaussians) {
        const Vec3 extent = axis_aligned_extent(g.rotation, g.scale, 1.0);
        box.grow(Vec3(g.mean - extent));
        box.grow(Vec3(g.mean + extent));
    }
    return scene.gaussians.empty() ? 0.0 : (box.hi - box.lo).norm();
}

DensifyReport densify_and_prune(SceneSnapshot &scene, ParamGradients &grads,
                                const std::vector<double> &camera_distances,
                                const FitConfig &config) {
    const std::size_t n = scene.size();
    if (grads.size() != n) {
        throw InvalidParameter("gradient statistics do not match the scene size");
    }
    const double split_threshold = config.split_scale_fraction * scene_diagonal(scene);

    DensifyReport report;
    std::vector<Gaussian> kept;
    std::vector<std::size_t> parent;
    std::vector<bool> fresh;
    std::vector<Gaussian> added;
    std::vector<std::size_t> added_parent;
    kept.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Gaussian &g = scene.gaussians[i];
        double magnitude = grads.mean_grad_max[i];
        if (config.densify_distance_scaling && i < camera_distances.size()) {
            magnitude *= camera_distances[i];
        }
        if (!(magnitude > config.densify_threshold)) {
            kept.push_back(g);
            parent.push_back(i);
            fresh.push_back(false);
            continue;
        }
        int axis = 0;
        const double largest = g.scale.maxCoeff(&axis);
        if (largest > split_threshold) {
            const Vec3 offset = 0.5 * largest * rotation_matrix(g.rotation).col(axis);
            Gaussian child = g;
            child.scale = (g.scale / config.split_scale_divisor).cwiseMax(kMinScale);
            Gaussian a = child;
            Gaussian b = child;
            a.mean = g.mean + offset;
            b.mean = g.mean - offset;
            kept.push_back(a);
            parent.push_back(i);
            fresh.push_back(true);
            added.push_back(b);
            added_parent.push_back(i);
            ++report.split;
        } else {
            kept.push_back(g);
            parent.push_back(i);
            fresh.push_back(false);
            added.push_back(g);
            added_parent.push_back(i);
            ++report.cloned;
        }
    }
    for (std::size_t j = 0; j < added.size(); ++j) {
        kept.push_back(added[j]);
        parent.push_back(added_parent[j]);
        fresh.push_back(true);
    }

    std::vector<Gaussian> out;
    out.reserve(kept.size());
    for (std::size_t i = 0; i < kept.size(); ++i) {
        if (kept[i].opacity < config.prune_opacity) {
            ++report.pruned;
            continue;
        }
        out.push_back(std::move(kept[i]));
        report.parent.push_back(parent[i]);
        report.fresh.push_back(fresh[i]);
    }
    scene.gaussians = std::move(out);
    grads = ParamGradients(scene.size());
    return report;
}

// ---------------------------------------------------------------------------
// Forward + adjoint over one reference view

namespace {

struct TileAccum {
    std::vector<GaussianGradient> grads;
    double loss_sum = 0.0;
};

// Maps gradients of deformed parameters back to the canonical raw parameters.
GaussianGradient to_canonical(const GaussianGradient &d, const Gaussian &canonical,
                              const Gaussian &deformed, const Residuals &r) {
    GaussianGradient out = d;
    for (int a = 0; a < 3; ++a) {
        const bool floored = canonical.scale[a] + r.scale[a] <= kMinScale;
        out.log_scale[a] = floored ? 0.0 : canonical.scale[a] * d.log_scale[a] / deformed.scale[a];
    }
    if (!r.rotation.isZero(0.0)) {
        const double n = (to_wxyz(canonical.rotation) + r.rotation).norm();
        const Vec4 q = to_wxyz(canonical.rotation).normalized();
        const Vec4 g = d.rotation / n;
        out.rotation = g - q * q.dot(g);
    }
    return out;
}

} // namespace

double render_and_backprop(const Scene &scene, const ReferenceView &reference,
                           const FitConfig &config, ParamGradients &grads, ImageBuffer *rendered) {
    const Camera &camera = reference.camera;
    if (std::holds_alternative<RollingShutterParams>(camera.effect)) {
        throw InvalidParameter("rolling-shutter reference views are not supported by the fitter");
    }
    const int w = camera.sensor.width_px;
    const int h = camera.sensor.height_px;
    if (reference.image.width() != w || reference.image.height() != h) {
        throw InvalidParameter("reference image size does not match its camera sensor");
    }
    const bool deformed = !std::holds_alternative<NoDeformation>(scene.deformation);
    const SceneSnapshot snapshot =
        deformed ? deform_snapshot(scene.canonical, scene.deformation, reference.time)
                 : scene.canonical;
    const auto residuals =
        deformed ? residuals_at(scene.canonical, scene.deformation, reference.time)
                 : std::vector<Residuals>{};
    const Bvh bvh = build_bvh(snapshot);
    const TraceOptions options{config.k, config.background};
    const std::size_t n = snapshot.size();
    const double inv_count = 1.0 / (3.0 * w * h);

    constexpr int kTileRows = 8;
    const int tiles = (h + kTileRows - 1) / kTileRows;
    std::vector<TileAccum> accum(static_cast<std::size_t>(tiles));
    if (rendered != nullptr) {
        *rendered = ImageBuffer(w, h);
    }

    parallel_for(accum.size(), config.threads, [&](std::size_t t) {
        TileAccum &acc = accum[t];
        acc.grads.assign(n, GaussianGradient{});
        std::vector<Ray> rays;
        std::vector<TraceRecord> records;
        for (int y = static_cast<int>(t) * kTileRows; y < std::min(h, static_cast<int>(t + 1) * kTileRows); ++y) {
            for (int x = 0; x < w; ++x) {
                rays.clear();
                if (const auto *lens = std::get_if<FisheyeLens>(&camera.effect)) {
                    if (auto r = fisheye_ray(camera.pose, camera.sensor, *lens, x, y)) {
                        rays.push_back(*r);
                    }
                } else if (const auto *dof = std::get_if<DofParams>(&camera.effect)) {
                    for (int s = 0; s < dof->samples_per_pixel; ++s) {
                        rays.push_back(dof_sample_ray(camera.pose, camera.sensor, *dof, x, y, s));
                    }
                } else {
                    rays.push_back(pinhole_ray(camera.pose, camera.sensor, x, y));
                }
                records.clear();
                Rgb color = config.background;
                if (!rays.empty()) {
                    Rgb sum = Rgb::Zero();
                    for (const Ray &ray : rays) {
                        records.push_back(trace_ray_recorded(ray, snapshot, bvh, options));
                        sum += records.back().result.radiance;
                    }
                    color = rays.size() == 1 ? sum : Rgb(sum / static_cast<double>(rays.size()));
                }
                if (rendered != nullptr) {
                    rendered->set_pixel(x, y, color);
                }
                const Rgb target = reference.image.pixel(x, y);
                Rgb d_color;
                for (int c = 0; c < 3; ++c) {
                    const double diff = color[c] - target[c];
                    acc.loss_sum += std::abs(diff);
                    d_color[c] = (diff > 0.0 ? 1.0 : (diff < 0.0 ? -1.0 : 0.0)) * inv_count;
                }
                if (d_color.isZero(0.0) || rays.empty()) {
                    continue;
                }
                const Rgb d_sample = d_color / static_cast<double>(rays.size());
                for (std::size_t r = 0; r < rays.size(); ++r) {
                    for (const auto &hg : backprop_record(records[r], rays[r], snapshot, bvh,
                                                          d_sample, config.background)) {
                        acc.grads[hg.gaussian_index] += hg.grad;
                    }
                }
            }
        }
    });

    // Tiles are reduced in index order.
    double loss_sum = 0.0;
    std::vector<GaussianGradient> total(n);
    for (const TileAccum &acc : accum) {
        loss_sum += acc.loss_sum;
        for (std::size_t i = 0; i < n; ++i) {
            total[i] += acc.grads[i];
        }
    }
    if (grads.size() != n) {
        grads = ParamGradients(n);
    }
    for (std::size_t i = 0; i < n; ++i) {
        const GaussianGradient g =
            deformed ? to_canonical(total[i], scene.canonical.gaussians[i], snapshot.gaussians[i],
                                    residuals[i])
                     : total[i];
        grads.per_gaussian[i] += g;
        const double magnitude = g.mean.norm();
        if (magnitude > grads.mean_grad_max[i]) {
            grads.mean_grad_max[i] = magnitude;
            grads.camera_distance[i] = (snapshot.gaussians[i].mean - camera.pose.position).norm();
        }
    }
    return loss_sum * inv_count;
}

// ---------------------------------------------------------------------------

namespace {

bool all_finite(const SceneSnapshot &s) {
    for (const auto &g : s.gaussians) {
        if (!g.mean.allFinite() || !g.scale.allFinite() || !g.rotation.coeffs().allFinite() ||
            !std::isfinite(g.opacity)) {
            return false;
        }
        for (const auto &c : g.sh) {
            if (!c.allFinite()) {
                return false;
            }
        }
    }
    return true;
}

void remap_deformation(Deformation &deformation, const std::vector<std::size_t> &parent) {
    auto *track = std::get_if<KeyframeTrack>(&deformation);
    if (track == nullptr) {
        return;
    }
    for (auto &frame : track->deltas) {
        std::vector<Residuals> next;
        next.reserve(parent.size());
        for (std::size_t p : parent) {
            next.push_back(frame[p]);
        }
        frame = std::move(next);
    }
}

} // namespace

FitResult fit(const Scene &initial, const std::vector<ReferenceView> &references,
              const FitConfig &config) {
    config.validate();
    validate_snapshot(initial.canonical);
    if (references.empty()) {
        throw InvalidParameter("fit needs at least one reference image");
    }
    double first_time = references.front().time;
    for (const auto &ref : references) {
        ref.camera.sensor.validate();
        first_time = std::min(first_time, ref.time);
    }
    std::vector<std::size_t> all(references.size());
    std::vector<std::size_t> first_frame;
    for (std::size_t i = 0; i < references.size(); ++i) {
        all[i] = i;
        if (references[i].time == first_time) {
            first_frame.push_back(i);
        }
    }

    FitResult result{initial, {}};
    Scene &scene = result.scene;
    AdamOptimizer optimizer(config, scene.canonical.size(),
                            static_cast<int>(sh_coeff_count(scene.canonical.sh_degree)));
    ParamGradients grads(scene.canonical.size());
    std::mt19937_64 rng(config.rng_seed);
    const int total = config.coarse_iterations + config.iterations;
    result.trace.reserve(static_cast<std::size_t>(total));
    ImageBuffer rendered;

    for (int it = 0; it < total; ++it) {
        const auto &pool = it < config.coarse_iterations ? first_frame : all;
        std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
        const ReferenceView &ref = references[pool[pick(rng)]];

        grads.zero_step();
        const double loss = render_and_backprop(scene, ref, config, grads, &rendered);
        if (!std::isfinite(loss)) {
            throw NumericalError("non-finite loss at iteration " + std::to_string(it));
        }
        result.trace.push_back({it, loss, psnr(rendered, ref.image)});
        optimizer.step(scene.canonical, grads);
        if (!all_finite(scene.canonical)) {
            throw NumericalError("parameters diverged to non-finite values at iteration " +
                                 std::to_string(it));
        }

        if (config.densify_interval > 0 && (it + 1) % config.densify_interval == 0 &&
            it + 1 < total) {
            const auto report =
                densify_and_prune(scene.canonical, grads, std::vector<double>(grads.camera_distance), config);
            if (scene.canonical.gaussians.empty()) {
                throw NumericalError("densification pruned every gaussian at iteration " +
                                     std::to_string(it));
            }
            optimizer.remap(report.parent, report.fresh);
            remap_deformation(scene.deformation, report.parent);
        }
    }
    return result;
}

} // namespace gsrt
