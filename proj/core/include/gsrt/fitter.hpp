// Copyright Contributors to the gsrt Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "gsrt/backprop.hpp"
#include "gsrt/camera.hpp"
#include "gsrt/image.hpp"
#include "gsrt/scene_io.hpp"

#include <cstdint>
#include <vector>

namespace gsrt {

struct LearningRates {
    double mean = 1.6e-4;
    double log_scale = 5e-3;
    double rotation = 1e-3;
    double opacity_logit = 5e-2;
    double sh = 2.5e-3;
};

struct FitConfig {
    LearningRates lr;
    int iterations = 1000;
    /// Iterations fitted on the earliest reference time only, before `iterations`.
    int coarse_iterations = 0;
    /// 0 disables densification.
    int densify_interval = 0;
    double densify_threshold = 2.5e-5;
    bool densify_distance_scaling = true;
    double prune_opacity = 0.005;
    /// Split when the largest scale exceeds this fraction of the scene diagonal.
    double split_scale_fraction = 0.01;
    double split_scale_divisor = 1.6;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_epsilon = 1e-8;
    std::uint64_t rng_seed = 0;
    int k = kDefaultKBuffer;
    int threads = 1;
    Rgb background = Rgb::Zero();

    void validate() const;
};

/// Gradients for every gaussian of a scene plus the densification statistics.
struct ParamGradients {
    std::vector<GaussianGradient> per_gaussian;
    /// Largest |dL/dmean| seen since the last densification, and the camera
    /// distance of the gaussian at that iteration.
    std::vector<double> mean_grad_max;
    std::vector<double> camera_distance;

    explicit ParamGradients(std::size_t n = 0)
        : per_gaussian(n), mean_grad_max(n, 0.0), camera_distance(n, 0.0) {}
    void zero_step();
    void reset_accumulators();
    std::size_t size() const { return per_gaussian.size(); }
};

/// Mean absolute difference over all pixels and channels.
double l1_loss(const ImageBuffer &rendered, const ImageBuffer &reference);

struct ReferenceView {
    ImageBuffer image;
    Camera camera;
    double time = 0.0;
};

/// Adam state for the raw parameters of every gaussian.
class AdamOptimizer {
public:
    AdamOptimizer(const FitConfig &config, std::size_t gaussian_count, int sh_count);

    /// One update of `scene` from `grads`. Groups with a zero learning rate
    /// are left untouched bit for bit.
    void step(SceneSnapshot &scene, const ParamGradients &grads);

    /// Keeps moment buffers aligned with a densified scene. Gaussian i of the
    /// new scene inherits the moments of `parent[i]` unless `fresh[i]` is set.
    void remap(const std::vector<std::size_t> &parent, const std::vector<bool> &fresh);

    std::size_t step_count() const { return steps_; }

private:
    struct Moments {
        std::vector<double> m, v;
    };
    struct GaussianMoments {
        Moments mean, log_scale, rotation, opacity, sh;
    };
    GaussianMoments zero_moments() const;

    FitConfig config_;
    int sh_count_;
    std::size_t steps_ = 0;
    std::vector<GaussianMoments> state_;
};

struct DensifyReport {
    std::size_t split = 0;
    std::size_t cloned = 0;
    std::size_t pruned = 0;
    /// For each output gaussian: index of the gaussian it came from, and
    /// whether it was created by this call.
    std::vector<std::size_t> parent;
    std::vector<bool> fresh;
};

/// Splits or clones gaussians whose accumulated mean-gradient magnitude
/// (times camera distance when enabled) exceeds the threshold, then prunes
/// low-opacity ones. Resets the accumulators.
DensifyReport densify_and_prune(SceneSnapshot &scene, ParamGradients &grads,
                                const std::vector<double> &camera_distances,
                                const FitConfig &config);

/// Diagonal of the box spanned by gaussian means widened by one standard deviation.
double scene_diagonal(const SceneSnapshot &scene);

/// Renders one view and accumulates dL/dparams of the canonical gaussians for
/// the L1 loss against `reference`. Returns the loss; `rendered` receives the image.
double render_and_backprop(const Scene &scene, const ReferenceView &reference,
                           const FitConfig &config, ParamGradients &grads, ImageBuffer *rendered);

struct IterationStats {
    int iteration = 0;
    double loss = 0.0;
    double psnr = 0.0;
};

struct FitResult {
    Scene scene;
    std::vector<IterationStats> trace;
};

/// Gradient descent on the L1 loss over randomly sampled reference views.
/// Throws NumericalError naming the iteration on a non-finite loss.
FitResult fit(const Scene &initial, const std::vector<ReferenceView> &references,
              const FitConfig &config);

} // namespace gsrt
