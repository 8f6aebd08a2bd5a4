// Copyright Contributors to the gsrt Project
// SPDX-License-Identifier: Apache-2.0

#include "gsrt/error.hpp"
#include "gsrt/fitter.hpp"
#include "gsrt/render.hpp"

#include "scenes.hpp"

#include <gtest/gtest.h>

namespace gsrt {
namespace {

TEST(L1, Examples) {
    EXPECT_EQ(l1_loss(ImageBuffer(2, 2), ImageBuffer(2, 2)), 0.0);
    EXPECT_EQ(l1_loss(ImageBuffer(2, 2), ImageBuffer(2, 2, Rgb::Ones())), 1.0);
    ImageBuffer a(2, 2);
    a.set_pixel(1, 0, Rgb(0, 0.1, 0));
    EXPECT_NEAR(l1_loss(a, ImageBuffer(2, 2)), 0.1 / 12, 1e-15);
    EXPECT_THROW(l1_loss(ImageBuffer(2, 2), ImageBuffer(3, 2)), InvalidParameter);
}

ParamGradients random_grads(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1, 1);
    ParamGradients g(n);
    for (auto &pg : g.per_gaussian) {
        pg.mean = Vec3(u(rng), u(rng), u(rng));
        pg.log_scale = Vec3(u(rng), u(rng), u(rng));
        pg.rotation = Vec4(u(rng), u(rng), u(rng), u(rng));
        pg.opacity_logit = u(rng);
        for (auto &c : pg.sh) {
            c = Rgb(u(rng), u(rng), u(rng));
        }
    }
    return g;
}

TEST(Adam, ZeroLearningRateIsBitIdentical) {
    const SceneSnapshot s = testing::random_snapshot(1, {.count = 10, .sh_degree = 2});
    FitConfig cfg;
    cfg.lr = {0, 0, 0, 0, 0};
    AdamOptimizer opt(cfg, s.size(), static_cast<int>(sh_coeff_count(2)));
    SceneSnapshot t = s;
    for (int i = 0; i < 5; ++i) {
        opt.step(t, random_grads(s.size(), i));
    }
    for (std::size_t i = 0; i < s.size(); ++i) {
        EXPECT_EQ(t.gaussians[i].mean, s.gaussians[i].mean);
        EXPECT_EQ(t.gaussians[i].rotation.coeffs(), s.gaussians[i].rotation.coeffs());
        EXPECT_EQ(t.gaussians[i].scale, s.gaussians[i].scale);
        EXPECT_EQ(t.gaussians[i].opacity, s.gaussians[i].opacity);
        EXPECT_EQ(t.gaussians[i].sh, s.gaussians[i].sh);
    }
}

TEST(Adam, StepsPreserveInvariants) {
    SceneSnapshot s = testing::random_snapshot(2, {.count = 10, .sh_degree = 1});
    FitConfig cfg;
    cfg.lr = {0.5, 2.0, 1.0, 5.0, 1.0};
    AdamOptimizer opt(cfg, s.size(), 4);
    for (int i = 0; i < 200; ++i) {
        ParamGradients g = random_grads(s.size(), 100 + i);
        for (auto &pg : g.per_gaussian) {
            pg.log_scale *= 1e3;
            pg.opacity_logit *= 1e3;
        }
        opt.step(s, g);
        ASSERT_NO_THROW(validate_snapshot(s)) << "step " << i;
    }
    EXPECT_EQ(opt.step_count(), 200u);
}

TEST(Adam, FirstStepMovesByLearningRate) {
    SceneSnapshot s = testing::random_snapshot(3, {.count = 1, .sh_degree = 0});
    FitConfig cfg;
    cfg.lr = {0.01, 0, 0, 0, 0};
    AdamOptimizer opt(cfg, 1, 1);
    ParamGradients g(1);
    g.per_gaussian[0].mean = Vec3(2.0, -3.0, 0.0);
    const Vec3 before = s.gaussians[0].mean;
    opt.step(s, g);
    const Vec3 delta = s.gaussians[0].mean - before;
    EXPECT_NEAR(delta.x(), -0.01, 1e-9);
    EXPECT_NEAR(delta.y(), 0.01, 1e-9);
    EXPECT_EQ(delta.z(), 0.0);
}

SceneSnapshot two_blobs() {
    SceneSnapshot s;
    Gaussian a;
    a.mean = Vec3(-1, 0, 0);
    a.scale = Vec3(0.5, 0.1, 0.1);
    a.opacity = 0.5;
    a.sh = {Rgb::Zero()};
    Gaussian b = a;
    b.mean = Vec3(1, 0, 0);
    s.gaussians = {a, b};
    return s;
}

TEST(Densify, BelowThresholdOnlyPrunes) {
    SceneSnapshot s = two_blobs();
    s.gaussians[1].opacity = 0.001;
    ParamGradients g(2);
    g.mean_grad_max = {1e-9, 1e-9};
    g.camera_distance = {1.0, 1.0};
    FitConfig cfg;
    const auto report = densify_and_prune(s, g, g.camera_distance, cfg);
    ASSERT_EQ(s.size(), 1u);
    EXPECT_EQ(s.gaussians[0].mean, Vec3(-1, 0, 0));
    EXPECT_EQ(report.pruned, 1u);
    EXPECT_EQ(report.split + report.cloned, 0u);
    EXPECT_EQ(report.parent, std::vector<std::size_t>{0});
}

TEST(Densify, SplitLargeGaussian) {
    SceneSnapshot s = two_blobs();
    ParamGradients g(2);
    g.mean_grad_max = {1.0, 0.0};
    const std::vector<double> dist = {1.0, 1.0};
    FitConfig cfg;
    const auto report = densify_and_prune(s, g, dist, cfg);
    ASSERT_EQ(s.size(), 3u);
    EXPECT_EQ(report.split, 1u);
    const Vec3 parent_scale(0.5, 0.1, 0.1);
    EXPECT_EQ(s.gaussians[0].scale, parent_scale / 1.6);
    EXPECT_EQ(s.gaussians[2].scale, parent_scale / 1.6);
    EXPECT_NEAR((s.gaussians[0].mean - Vec3(-0.75, 0, 0)).norm(), 0.0, 1e-15);
    EXPECT_NEAR((s.gaussians[2].mean - Vec3(-1.25, 0, 0)).norm(), 0.0, 1e-15);
    EXPECT_EQ(report.parent, (std::vector<std::size_t>{0, 1, 0}));
    EXPECT_EQ(report.fresh, (std::vector<bool>{true, false, true}));
    EXPECT_NO_THROW(validate_snapshot(s));
    EXPECT_EQ(g.size(), 3u);
    EXPECT_EQ(g.mean_grad_max, (std::vector<double>{0, 0, 0}));
}

TEST(Densify, CloneSmallGaussian) {
    SceneSnapshot s = two_blobs();
    FitConfig cfg;
    cfg.split_scale_fraction = 0.9;
    ParamGradients g(2);
    g.mean_grad_max = {0.0, 1.0};
    densify_and_prune(s, g, {1.0, 1.0}, cfg);
    ASSERT_EQ(s.size(), 3u);
    EXPECT_EQ(s.gaussians[2].mean, s.gaussians[1].mean);
    EXPECT_EQ(s.gaussians[2].scale, s.gaussians[1].scale);
}

TEST(Densify, DistanceScaling) {
    SceneSnapshot s = two_blobs();
    FitConfig cfg;
    cfg.densify_threshold = 1.0;
    ParamGradients g(2);
    g.mean_grad_max = {0.5, 0.5};
    densify_and_prune(s, g, {3.0, 1.0}, cfg);
    EXPECT_EQ(s.size(), 3u);
    s = two_blobs();
    cfg.densify_distance_scaling = false;
    g = ParamGradients(2);
    g.mean_grad_max = {0.5, 0.5};
    densify_and_prune(s, g, {3.0, 1.0}, cfg);
    EXPECT_EQ(s.size(), 2u);
}

TEST(Densify, DiagonalSpansOneSigma) {
    SceneSnapshot s = two_blobs();
    const double want = Vec3(3.0, 0.2, 0.2).norm();
    EXPECT_NEAR(scene_diagonal(s), want, 1e-12);
}

struct Rig {
    Scene truth;
    std::vector<ReferenceView> refs;
};

Rig single_blob_rig() {
    Rig rig;
    Gaussian g;
    g.mean = Vec3(0.1, 0.0, 0.0);
    g.scale = Vec3(0.3, 0.2, 0.25);
    g.opacity = 0.8;
    g.sh = {Rgb(0.3, -0.2, 0.1)};
    rig.truth.canonical.gaussians = {g};
    const Camera cam =
        testing::pinhole_camera(32, 32, testing::look_at(Vec3(0, 0, 3), Vec3::Zero()), 35.0);
    rig.refs.push_back({render_snapshot(rig.truth.canonical, cam, {}), cam, 0.0});
    return rig;
}

TEST(Fit, FixedPointWithZeroRates) {
    const Rig rig = single_blob_rig();
    FitConfig cfg;
    cfg.lr = {0, 0, 0, 0, 0};
    cfg.iterations = 5;
    const FitResult r = fit(rig.truth, rig.refs, cfg);
    ASSERT_EQ(r.trace.size(), 5u);
    for (const auto &s : r.trace) {
        EXPECT_EQ(s.loss, r.trace[0].loss);
        EXPECT_EQ(s.loss, 0.0);
    }
}

TEST(Fit, RecoversShiftedMean) {
    const Rig rig = single_blob_rig();
    Scene init = rig.truth;
    init.canonical.gaussians[0].mean.x() = 0.0;
    FitConfig cfg;
    cfg.lr = {2e-3, 0, 0, 0, 0};
    cfg.iterations = 2000;
    const FitResult r = fit(init, rig.refs, cfg);
    EXPECT_LT((r.scene.canonical.gaussians[0].mean - rig.truth.canonical.gaussians[0].mean).norm(),
              1e-3);
}

TEST(Fit, DeterministicTrace) {
    const Rig rig = single_blob_rig();
    Scene init = rig.truth;
    init.canonical.gaussians[0].mean.x() = -0.1;
    FitConfig cfg;
    cfg.iterations = 20;
    cfg.densify_interval = 5;
    cfg.densify_threshold = 1e-6;
    const FitResult a = fit(init, rig.refs, cfg);
    cfg.threads = 4;
    const FitResult b = fit(init, rig.refs, cfg);
    ASSERT_EQ(a.trace.size(), b.trace.size());
    for (std::size_t i = 0; i < a.trace.size(); ++i) {
        EXPECT_EQ(a.trace[i].loss, b.trace[i].loss);
    }
    EXPECT_NO_THROW(validate_snapshot(a.scene.canonical));
}

TEST(Fit, NonFiniteLossAborts) {
    Rig rig = single_blob_rig();
    rig.refs[0].image.set_pixel(3, 3, Rgb(NAN, 0, 0));
    FitConfig cfg;
    cfg.iterations = 3;
    try {
        fit(rig.truth, rig.refs, cfg);
        FAIL();
    } catch (const NumericalError &e) {
        EXPECT_NE(std::string(e.what()).find("iteration 0"), std::string::npos);
    }
}

TEST(Fit, RejectsRollingReference) {
    Rig rig = single_blob_rig();
    RollingShutterParams rs;
    rs.readout_time = 0.1;
    rig.refs[0].camera.effect = rs;
    EXPECT_THROW(fit(rig.truth, rig.refs, FitConfig{}), InvalidParameter);
}

TEST(Fit, CoarseStageUsesEarliestViews) {
    Rig rig = single_blob_rig();
    ReferenceView late = rig.refs[0];
    late.time = 0.7;
    late.image = ImageBuffer(32, 32, Rgb::Ones());
    rig.refs.push_back(late);
    FitConfig cfg;
    cfg.lr = {0, 0, 0, 0, 0};
    cfg.coarse_iterations = 10;
    cfg.iterations = 1;
    const FitResult r = fit(rig.truth, rig.refs, cfg);
    ASSERT_EQ(r.trace.size(), 11u);
    for (int i = 0; i < 10; ++i) {
        EXPECT_EQ(r.trace[i].loss, 0.0);
    }
}

TEST(Backward, ThreadCountDoesNotChangeGradients) {
    Scene scene;
    scene.canonical = testing::random_snapshot(4, {.count = 20, .sh_degree = 1});
    const Camera cam =
        testing::pinhole_camera(24, 20, testing::look_at(Vec3(0, 0.5, 4), Vec3::Zero()));
    const ReferenceView ref{ImageBuffer(24, 20, Rgb::Constant(0.3)), cam, 0.0};
    FitConfig cfg;
    ParamGradients a(20), b(20);
    const double la = render_and_backprop(scene, ref, cfg, a, nullptr);
    cfg.threads = 6;
    const double lb = render_and_backprop(scene, ref, cfg, b, nullptr);
    EXPECT_EQ(la, lb);
    for (std::size_t i = 0; i < 20; ++i) {
        EXPECT_EQ(a.per_gaussian[i].mean, b.per_gaussian[i].mean);
        EXPECT_EQ(a.per_gaussian[i].sh[0], b.per_gaussian[i].sh[0]);
    }
}

} // namespace
} // namespace gsrt
