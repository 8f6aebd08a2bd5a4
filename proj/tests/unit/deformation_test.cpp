// Copyright Contributors to the gsrt Project
// SPDX-License-Identifier: Apache-2.0

#include "gsrt/deformation.hpp"
#include "gsrt/error.hpp"

#include "scenes.hpp"

#include <gtest/gtest.h>

namespace gsrt {
namespace {

void expect_bit_identical(const SceneSnapshot &a, const SceneSnapshot &b) {
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        const Gaussian &x = a.gaussians[i];
        const Gaussian &y = b.gaussians[i];
        EXPECT_EQ(x.mean, y.mean);
        EXPECT_EQ(x.rotation.coeffs(), y.rotation.coeffs());
        EXPECT_EQ(x.scale, y.scale);
        EXPECT_EQ(x.opacity, y.opacity);
        EXPECT_EQ(x.sh, y.sh);
    }
}

TEST(Deform, NoneIsIdentity) {
    const SceneSnapshot s = testing::random_snapshot(1, {.count = 20});
    for (double t : {0.0, 0.4, 1.0}) {
        const SceneSnapshot d = deform_snapshot(s, NoDeformation{}, t);
        expect_bit_identical(s, d);
        EXPECT_EQ(d.time, t);
    }
}

TEST(Deform, ZeroHeadsAreIdentity) {
    const SceneSnapshot s = testing::random_snapshot(2, {.count = 20});
    const HexPlaneField f = make_zero_head_field(4, {1, 2}, 4, Bounds3{Vec3::Constant(-1), Vec3::Ones()});
    for (double t : {0.0, 0.25, 0.9}) {
        expect_bit_identical(s, deform_snapshot(s, f, t));
    }
}

TEST(Deform, KeyframeMidpoint) {
    const SceneSnapshot s = testing::random_snapshot(3, {.count = 5});
    KeyframeTrack track;
    track.times = {0.0, 1.0};
    track.deltas.assign(2, std::vector<Residuals>(5));
    for (auto &r : track.deltas[1]) {
        r.mean = Vec3(1, 0, 0);
    }
    const SceneSnapshot d = deform_snapshot(s, track, 0.5);
    for (std::size_t i = 0; i < 5; ++i) {
        EXPECT_EQ(d.gaussians[i].mean, s.gaussians[i].mean + Vec3(0.5, 0, 0));
        EXPECT_EQ(d.gaussians[i].rotation.coeffs(), s.gaussians[i].rotation.coeffs());
    }
}

TEST(Deform, KeyframeClampsOutsideRange) {
    const SceneSnapshot s = testing::random_snapshot(4, {.count = 1});
    KeyframeTrack track;
    track.times = {0.2, 0.6};
    track.deltas.assign(2, std::vector<Residuals>(1));
    track.deltas[0][0].mean = Vec3(1, 2, 3);
    track.deltas[1][0].mean = Vec3(-1, 0, 0);
    EXPECT_EQ(track.at(0, 0.0).mean, Vec3(1, 2, 3));
    EXPECT_EQ(track.at(0, 1.0).mean, Vec3(-1, 0, 0));
    EXPECT_NEAR(track.at(0, 0.4).mean.x(), 0.0, 1e-15);
}

TEST(Deform, ResultsSatisfyInvariants) {
    const SceneSnapshot s = testing::random_snapshot(5, {.count = 30});
    const HexPlaneField f = make_random_field(2, {1, 2}, 3, 8, 6, Bounds3{Vec3::Constant(-1), Vec3::Ones()}, 5, 0.8);
    for (double t : {0.0, 0.5, 1.0}) {
        EXPECT_NO_THROW(validate_snapshot(deform_snapshot(s, f, t)));
    }
}

TEST(Deform, ScaleFloor) {
    Gaussian g;
    g.sh = {Rgb::Zero()};
    g.scale = Vec3(0.1, 0.1, 0.1);
    Residuals r;
    r.scale = Vec3(-1, 0, 0);
    EXPECT_EQ(apply_residuals(g, r).scale.x(), kMinScale);
}

TEST(Deform, RotationRenormalized) {
    Gaussian g;
    g.sh = {Rgb::Zero()};
    Residuals r;
    r.rotation = Vec4(0, 1, 0, 0);
    const Gaussian out = apply_residuals(g, r);
    EXPECT_NEAR(out.rotation.norm(), 1.0, 1e-15);
    EXPECT_NEAR(out.rotation.x(), std::sqrt(0.5), 1e-15);
}

TEST(Deform, TimeOutsideUnitIntervalThrows) {
    const SceneSnapshot s = testing::random_snapshot(6, {.count = 2});
    EXPECT_THROW(deform_snapshot(s, NoDeformation{}, 1.5), InvalidParameter);
    EXPECT_THROW(deform_snapshot(s, NoDeformation{}, -0.1), InvalidParameter);
}

TEST(Deform, TrackValidation) {
    KeyframeTrack track;
    track.times = {0.5, 0.2};
    track.deltas.assign(2, std::vector<Residuals>(1));
    EXPECT_THROW(track.validate(1), InvalidParameter);
    track.times = {0.2, 0.5};
    EXPECT_NO_THROW(track.validate(1));
    EXPECT_THROW(track.validate(2), InvalidParameter);
}

} // namespace
} // namespace gsrt
