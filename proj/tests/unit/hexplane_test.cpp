// Copyright Contributors to the gsrt Project
// SPDX-License-Identifier: Apache-2.0

#include "gsrt/error.hpp"
#include "gsrt/hexplane.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>

namespace gsrt {
namespace {

Mlp identity_mlp(int width) {
    Mlp m;
    m.layers.push_back({Eigen::MatrixXd::Identity(width, width), Eigen::VectorXd::Zero(width)});
    return m;
}

HexPlaneField constant_field(int h, std::vector<int> levels, int n, double value) {
    HexPlaneField f = make_zero_head_field(h, std::move(levels), n, Bounds3{});
    for (auto &grids : f.planes) {
        for (auto &g : grids) {
            g = FeatureGrid(g.width(), g.height(), h, value);
        }
    }
    return f;
}

TEST(InterpPlane, ConstantGrid) {
    const FeatureGrid g(5, 7, 3, 2.5);
    for (double u : {0.0, 0.13, 0.5, 1.0}) {
        for (double v : {0.0, 0.77, 1.0}) {
            const auto f = interp_plane(g, u, v);
            for (int c = 0; c < 3; ++c) {
                EXPECT_DOUBLE_EQ(f[c], 2.5);
            }
        }
    }
}

TEST(InterpPlane, TwoByTwoCentre) {
    FeatureGrid g(2, 2, 2, 0.0);
    g.at(1, 1, 0) = 1.0;
    g.at(1, 1, 1) = 1.0;
    const auto f = interp_plane(g, 0.5, 0.5);
    EXPECT_DOUBLE_EQ(f[0], 0.25);
    EXPECT_DOUBLE_EQ(f[1], 0.25);
}

TEST(InterpPlane, TexelCentresReturnStoredValues) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-1, 1);
    FeatureGrid g(8, 8, 2);
    for (int iv = 0; iv < 8; ++iv) {
        for (int iu = 0; iu < 8; ++iu) {
            g.at(iu, iv, 0) = u(rng);
            g.at(iu, iv, 1) = u(rng);
        }
    }
    for (int iv = 0; iv < 8; ++iv) {
        for (int iu = 0; iu < 8; ++iu) {
            const auto f = interp_plane(g, iu / 7.0, iv / 7.0);
            EXPECT_NEAR(f[0], g.at(iu, iv, 0), 1e-12);
            EXPECT_NEAR(f[1], g.at(iu, iv, 1), 1e-12);
        }
    }
}

TEST(InterpPlane, MatchesTentOracle) {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0, 1);
    FeatureGrid g(6, 4, 3);
    for (int iv = 0; iv < 4; ++iv) {
        for (int iu = 0; iu < 6; ++iu) {
            for (int c = 0; c < 3; ++c) {
                g.at(iu, iv, c) = u(rng);
            }
        }
    }
    for (int trial = 0; trial < 200; ++trial) {
        const double a = u(rng), b = u(rng);
        const auto f = interp_plane(g, a, b);
        const auto want = oracle::bilinear(g, a, b);
        for (int c = 0; c < 3; ++c) {
            EXPECT_NEAR(f[c], want[c], 1e-12);
        }
    }
}

TEST(InterpPlane, OutsideUnitSquareThrows) {
    const FeatureGrid g(4, 4, 1, 0.0);
    EXPECT_THROW(interp_plane(g, -0.01, 0.5), OutOfBounds);
    EXPECT_THROW(interp_plane(g, 0.5, 1.01), OutOfBounds);
}

TEST(Encode, AllOnesThroughIdentity) {
    HexPlaneField f = constant_field(4, {1, 2}, 3, 1.0);
    f.fuse = identity_mlp(8);
    const auto out = encode_spacetime(f, Vec3(0.2, 0.4, 0.9), 0.3);
    ASSERT_EQ(out.size(), 8);
    for (Eigen::Index i = 0; i < 8; ++i) {
        EXPECT_EQ(out[i], 1.0);
    }
}

TEST(Encode, OnePlaneScalesProduct) {
    HexPlaneField f = constant_field(3, {1, 2}, 4, 1.0);
    for (auto &g : f.planes[static_cast<int>(PlaneAxes::YT)]) {
        g = FeatureGrid(g.width(), g.height(), 3, 2.0);
    }
    const auto fh = spacetime_features(f, Vec3(0.5, 0.5, 0.5), 0.7);
    for (Eigen::Index i = 0; i < fh.size(); ++i) {
        EXPECT_EQ(fh[i], 2.0);
    }
}

TEST(Encode, MatchesScalarOracle) {
    Bounds3 b{Vec3(-1, -2, -0.5), Vec3(1, 2, 1.5)};
    for (unsigned long long seed = 0; seed < 5; ++seed) {
        const HexPlaneField f = make_random_field(3, {1, 2, 4}, 3, 6, 5, b, seed);
        ASSERT_NO_THROW(f.validate());
        std::mt19937_64 rng(seed + 100);
        std::uniform_real_distribution<double> u(-2.5, 2.5), t(0, 1);
        for (int trial = 0; trial < 50; ++trial) {
            const Vec3 x(u(rng), u(rng), u(rng));
            const double tt = t(rng);
            const auto fh = spacetime_features(f, x, tt);
            const auto want = oracle::spacetime_features(f, x, tt);
            ASSERT_EQ(static_cast<std::size_t>(fh.size()), want.size());
            for (std::size_t i = 0; i < want.size(); ++i) {
                EXPECT_NEAR(fh[static_cast<Eigen::Index>(i)], want[i], 1e-9);
            }
            const auto fused = encode_spacetime(f, x, tt);
            const auto want_fused = oracle::mlp(f.fuse, want);
            for (std::size_t i = 0; i < want_fused.size(); ++i) {
                EXPECT_NEAR(fused[static_cast<Eigen::Index>(i)], want_fused[i], 1e-9);
            }
        }
    }
}

TEST(Decode, ZeroHeadsGiveZero) {
    const HexPlaneField f = make_zero_head_field(2, {1}, 2, Bounds3{});
    const Residuals r = decode_residuals(Eigen::VectorXd::Constant(2, 3.0), f.heads);
    EXPECT_TRUE(r.mean.isZero(0.0));
    EXPECT_TRUE(r.rotation.isZero(0.0));
    EXPECT_TRUE(r.scale.isZero(0.0));
}

TEST(Decode, IdentityReadout) {
    DeformationHeads heads;
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(3, 5);
    w.leftCols(3).setIdentity();
    heads.position.layers.push_back({w, Eigen::VectorXd::Zero(3)});
    heads.rotation.layers.push_back({Eigen::MatrixXd::Zero(4, 5), Eigen::VectorXd::Zero(4)});
    heads.scale.layers.push_back({Eigen::MatrixXd::Zero(3, 5), Eigen::VectorXd::Zero(3)});
    Eigen::VectorXd f(5);
    f << 0.1, -0.2, 0.3, 9, 9;
    EXPECT_EQ(decode_residuals(f, heads).mean, Vec3(0.1, -0.2, 0.3));
}

TEST(Decode, TwoLayerHeadsMatchOracle) {
    const HexPlaneField f = make_random_field(2, {1}, 2, 7, 4, Bounds3{}, 42);
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int trial = 0; trial < 50; ++trial) {
        Eigen::VectorXd x(4);
        std::vector<double> xs(4);
        for (int i = 0; i < 4; ++i) {
            xs[i] = x[i] = u(rng);
        }
        const Residuals r = decode_residuals(x, f.heads);
        const auto dm = oracle::mlp(f.heads.position, xs);
        const auto dr = oracle::mlp(f.heads.rotation, xs);
        const auto ds = oracle::mlp(f.heads.scale, xs);
        for (int i = 0; i < 3; ++i) {
            EXPECT_NEAR(r.mean[i], dm[i], 1e-9);
            EXPECT_NEAR(r.scale[i], ds[i], 1e-9);
        }
        for (int i = 0; i < 4; ++i) {
            EXPECT_NEAR(r.rotation[i], dr[i], 1e-9);
        }
    }
}

TEST(Decode, WidthMismatchThrows) {
    const HexPlaneField f = make_zero_head_field(2, {1}, 2, Bounds3{});
    EXPECT_THROW(decode_residuals(Eigen::VectorXd::Zero(3), f.heads), InvalidParameter);
}

TEST(Field, ValidateCatchesResolution) {
    HexPlaneField f = make_zero_head_field(2, {1, 2}, 3, Bounds3{});
    f.planes[2][1] = FeatureGrid(5, 6, 2, 1.0);
    EXPECT_THROW(f.validate(), InvalidParameter);
}

} // namespace
} // namespace gsrt
