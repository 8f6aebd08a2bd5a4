// Copyright Contributors to the gsrt Project
// SPDX-License-Identifier: Apache-2.0

#include "gsrt/error.hpp"
#include "gsrt/metrics.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

namespace gsrt {
namespace {

ImageBuffer random_image(int w, int h, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0, 1);
    ImageBuffer img(w, h);
    for (auto &v : img.data()) {
        v = u(rng);
    }
    return img;
}

ImageBuffer noisy(const ImageBuffer &img, double amplitude, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1, 1);
    ImageBuffer out = img;
    for (auto &v : out.data()) {
        v = std::clamp(v + amplitude * u(rng), 0.0, 1.0);
    }
    return out;
}

TEST(Psnr, IdenticalIsInfinite) {
    const ImageBuffer a = random_image(8, 8, 1);
    EXPECT_EQ(psnr(a, a), kPsnrIdentical);
}

TEST(Psnr, HalfVersusZero) {
    EXPECT_NEAR(psnr(ImageBuffer(4, 4, Rgb::Constant(0.5)), ImageBuffer(4, 4)), 6.0206, 1e-4);
}

TEST(Psnr, MatchesScalarOracle) {
    for (std::uint64_t s = 0; s < 5; ++s) {
        const ImageBuffer a = random_image(31, 17, s), b = random_image(31, 17, s + 50);
        EXPECT_NEAR(psnr(a, b), oracle::psnr(a, b), 1e-9);
    }
}

TEST(Psnr, SymmetricAndMonotone) {
    const ImageBuffer a = random_image(32, 32, 3);
    EXPECT_EQ(psnr(a, noisy(a, 0.1, 4)), psnr(noisy(a, 0.1, 4), a));
    double prev = kPsnrIdentical;
    for (double amp : {0.01, 0.02, 0.05, 0.1, 0.2}) {
        const double p = psnr(a, noisy(a, amp, 5));
        EXPECT_LT(p, prev);
        prev = p;
    }
}

TEST(Psnr, DimensionMismatch) {
    EXPECT_THROW(psnr(ImageBuffer(4, 4), ImageBuffer(4, 5)), InvalidParameter);
}

TEST(Ssim, IdenticalIsOne) {
    const ImageBuffer a = random_image(20, 20, 6);
    EXPECT_NEAR(ssim(a, a), 1.0, 1e-12);
}

TEST(Ssim, ConstantOffsetClosedForm) {
    const double m1 = 0.4, m2 = 0.5;
    const double want = (2 * m1 * m2 + kSsimC1) / (m1 * m1 + m2 * m2 + kSsimC1);
    EXPECT_NEAR(ssim(ImageBuffer(16, 16, Rgb::Constant(m1)), ImageBuffer(16, 16, Rgb::Constant(m2))),
                want, 1e-12);
}

TEST(Ssim, OnesVersusZeros) {
    const double want = kSsimC1 / (1.0 + kSsimC1);
    EXPECT_NEAR(ssim(ImageBuffer(12, 12, Rgb::Ones()), ImageBuffer(12, 12)), want, 1e-12);
}

TEST(Ssim, MatchesDirectWindowOracle) {
    for (std::uint64_t s = 0; s < 3; ++s) {
        const ImageBuffer a = random_image(29, 23, s);
        const ImageBuffer b = noisy(a, 0.2, s + 9);
        EXPECT_NEAR(ssim(a, b), oracle::ssim(a, b), 1e-6);
    }
}

TEST(Ssim, TooSmallThrows) {
    EXPECT_THROW(ssim(ImageBuffer(10, 20), ImageBuffer(10, 20)), InvalidParameter);
}

TEST(Mask, Diameter409CountMatchesEnumeration) {
    const CircularMask mask{512, 512, 409.6};
    EXPECT_EQ(mask.pixel_count(), oracle::circle_count(512, 512, 409.6));
    EXPECT_NEAR(static_cast<double>(mask.pixel_count()), M_PI * 204.8 * 204.8, 300.0);
}

TEST(Mask, ContainsMatchesOracle) {
    const CircularMask mask{37, 21, 15.3};
    for (int y = 0; y < 21; ++y) {
        for (int x = 0; x < 37; ++x) {
            EXPECT_EQ(mask.contains(x, y), oracle::in_circle(37, 21, 15.3, x, y));
        }
    }
}

TEST(MaskedMetric, FullCoverageEqualsUnmasked) {
    const ImageBuffer a = random_image(64, 64, 7), b = noisy(a, 0.1, 8);
    const double d = std::sqrt(2.0) * 64 + 1;
    EXPECT_EQ(masked_metric(a, b, d, Metric::Psnr), psnr(a, b));
    EXPECT_NEAR(masked_metric(a, b, d, Metric::Ssim), ssim(a, b), 1e-12);
}

TEST(MaskedMetric, IdenticalUnderMask) {
    const ImageBuffer a = random_image(40, 40, 9);
    EXPECT_EQ(masked_metric(a, a, 30.0, Metric::Psnr), kPsnrIdentical);
    EXPECT_NEAR(masked_metric(a, a, 30.0, Metric::Ssim), 1.0, 1e-12);
}

TEST(MaskedMetric, MatchesOracles) {
    const ImageBuffer a = random_image(48, 40, 10), b = noisy(a, 0.15, 11);
    const double d = 33.3;
    EXPECT_NEAR(masked_metric(a, b, d, Metric::Psnr), oracle::masked_psnr(a, b, d), 1e-9);
    const auto keep = [&](int x, int y) { return oracle::in_circle(48, 40, d, x, y); };
    EXPECT_NEAR(masked_metric(a, b, d, Metric::Ssim), oracle::ssim(a, b, keep), 1e-6);
}

TEST(MaskedMetric, EmptyMaskThrows) {
    const ImageBuffer a = random_image(40, 40, 12);
    EXPECT_THROW(masked_metric(a, a, 0.1, Metric::Psnr), InvalidParameter);
    EXPECT_THROW(masked_metric(a, a, 8.0, Metric::Ssim), InvalidParameter);
}

} // namespace
} // namespace gsrt
