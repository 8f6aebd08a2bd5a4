// Copyright Contributors to the gsrt Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "gsrt/image.hpp"

#include <cstddef>
#include <limits>

namespace gsrt {

/// Returned by psnr for identical images.
inline constexpr double kPsnrIdentical = std::numeric_limits<double>::infinity();

inline constexpr int kSsimWindow = 11;
inline constexpr double kSsimSigma = 1.5;
inline constexpr double kSsimC1 = 0.01 * 0.01;
inline constexpr double kSsimC2 = 0.03 * 0.03;

double mse(const ImageBuffer &a, const ImageBuffer &b);

/// 10 log10(1 / MSE) for [0,1] images.
double psnr(const ImageBuffer &a, const ImageBuffer &b);

/// Single-scale SSIM with an 11x11 Gaussian window (sigma 1.5), averaged over
/// every window that fits inside the image, then over channels.
double ssim(const ImageBuffer &a, const ImageBuffer &b);

/// Circle centred on the principal point (image centre); a pixel belongs to
/// the mask when its centre lies strictly inside.
struct CircularMask {
    int width = 0;
    int height = 0;
    double diameter_px = 0.0;

    bool contains(int x, int y) const;
    std::size_t pixel_count() const;
};

enum class Metric { Psnr, Ssim };

/// PSNR over masked pixels, or SSIM over windows lying wholly inside the mask.
/// Throws InvalidParameter when nothing survives the mask.
double masked_metric(const ImageBuffer &a, const ImageBuffer &b, double mask_diameter_px,
                     Metric metric);

} // namespace gsrt
