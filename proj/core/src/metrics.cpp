// Copyright Contributors to the gsrt Project
// SPDX-License-Identifier: Apache-2.0

#include "gsrt/metrics.hpp"

#include "gsrt/error.hpp"

#include <array>
#include <cmath>
#include <functional>
#include <vector>

namespace gsrt {

namespace {

void require_same_size(const ImageBuffer &a, const ImageBuffer &b) {
    if (a.width() != b.width() || a.height() != b.height()) {
        throw InvalidParameter("image dimensions differ: " + std::to_string(a.width()) + "x" +
                               std::to_string(a.height()) + " vs " + std::to_string(b.width()) +
                               "x" + std::to_string(b.height()));
    }
    if (a.pixel_count() == 0) {
        throw InvalidParameter("metrics need non-empty images");
    }
}

double psnr_from_mse(double m) {
    return m == 0.0 ? kPsnrIdentical : 10.0 * std::log10(1.0 / m);
}

using PixelPredicate = std::function<bool(int, int)>;

double masked_mse(const ImageBuffer &a, const ImageBuffer &b, const PixelPredicate &inside) {
    double sum = 0.0;
    std::size_t n = 0;
    for (int y = 0; y < a.height(); ++y) {
        for (int x = 0; x < a.width(); ++x) {
            if (!inside(x, y)) {
                continue;
            }
            for (int c = 0; c < 3; ++c) {
                const double d = a.channel(x, y, c) - b.channel(x, y, c);
                sum += d * d;
            }
            n += 3;
        }
    }
    if (n == 0) {
        throw InvalidParameter("mask selects no pixels");
    }
    return sum / static_cast<double>(n);
}

std::array<double, kSsimWindow> gaussian_window() {
    std::array<double, kSsimWindow> w{};
    double sum = 0.0;
    const int half = kSsimWindow / 2;
    for (int i = 0; i < kSsimWindow; ++i) {
        const double d = i - half;
        w[i] = std::exp(-(d * d) / (2.0 * kSsimSigma * kSsimSigma));
        sum += w[i];
    }
    for (double &v : w) {
        v /= sum;
    }
    return w;
}

// Valid-region separable filtering of one plane: out is (w-10) x (h-10).
std::vector<double> filter_valid(const std::vector<double> &plane, int w, int h) {
    static const auto kWin = gaussian_window();
    const int ow = w - kSsimWindow + 1;
    const int oh = h - kSsimWindow + 1;
    std::vector<double> horiz(static_cast<std::size_t>(ow) * h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < ow; ++x) {
            double s = 0.0;
            for (int k = 0; k < kSsimWindow; ++k) {
                s += kWin[k] * plane[static_cast<std::size_t>(y) * w + x + k];
            }
            horiz[static_cast<std::size_t>(y) * ow + x] = s;
        }
    }
    std::vector<double> out(static_cast<std::size_t>(ow) * oh);
    for (int y = 0; y < oh; ++y) {
        for (int x = 0; x < ow; ++x) {
            double s = 0.0;
            for (int k = 0; k < kSsimWindow; ++k) {
                s += kWin[k] * horiz[static_cast<std::size_t>(y + k) * ow + x];
            }
            out[static_cast<std::size_t>(y) * ow + x] = s;
        }
    }
    return out;
}

// Mean SSIM over windows whose top-left corner satisfies `keep`.
double ssim_windows(const ImageBuffer &a, const ImageBuffer &b, const PixelPredicate &keep) {
    const int w = a.width();
    const int h = a.height();
    if (w < kSsimWindow || h < kSsimWindow) {
        throw InvalidParameter("SSIM needs images of at least 11x11 pixels");
    }
    const int ow = w - kSsimWindow + 1;
    const int oh = h - kSsimWindow + 1;
    const std::size_t n = static_cast<std::size_t>(w) * h;

    double total = 0.0;
    for (int c = 0; c < 3; ++c) {
        std::vector<double> pa(n), pb(n), paa(n), pbb(n), pab(n);
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                const std::size_t i = static_cast<std::size_t>(y) * w + x;
                pa[i] = a.channel(x, y, c);
                pb[i] = b.channel(x, y, c);
                paa[i] = pa[i] * pa[i];
                pbb[i] = pb[i] * pb[i];
                pab[i] = pa[i] * pb[i];
            }
        }
        const auto ma = filter_valid(pa, w, h);
        const auto mb = filter_valid(pb, w, h);
        const auto maa = filter_valid(paa, w, h);
        const auto mbb = filter_valid(pbb, w, h);
        const auto mab = filter_valid(pab, w, h);
        double channel_sum = 0.0;
        std::size_t channel_windows = 0;
        for (int y = 0; y < oh; ++y) {
            for (int x = 0; x < ow; ++x) {
                if (!keep(x, y)) {
                    continue;
                }
                const std::size_t i = static_cast<std::size_t>(y) * ow + x;
                const double mu_a = ma[i], mu_b = mb[i];
                const double var_a = maa[i] - mu_a * mu_a;
                const double var_b = mbb[i] - mu_b * mu_b;
                const double cov = mab[i] - mu_a * mu_b;
                channel_sum += ((2.0 * mu_a * mu_b + kSsimC1) * (2.0 * cov + kSsimC2)) /
                               ((mu_a * mu_a + mu_b * mu_b + kSsimC1) * (var_a + var_b + kSsimC2));
                ++channel_windows;
            }
        }
        if (channel_windows == 0) {
            throw InvalidParameter("mask contains no complete SSIM window");
        }
        total += channel_sum / static_cast<double>(channel_windows);
    }
    return total / 3.0;
}

} // namespace

double mse(const ImageBuffer &a, const ImageBuffer &b) {
    require_same_size(a, b);
    return masked_mse(a, b, [](int, int) { return true; });
}

double psnr(const ImageBuffer &a, const ImageBuffer &b) { return psnr_from_mse(mse(a, b)); }

double ssim(const ImageBuffer &a, const ImageBuffer &b) {
    require_same_size(a, b);
    return ssim_windows(a, b, [](int, int) { return true; });
}

bool CircularMask::contains(int x, int y) const {
    const double dx = x + 0.5 - 0.5 * width;
    const double dy = y + 0.5 - 0.5 * height;
    const double r = 0.5 * diameter_px;
    return dx * dx + dy * dy < r * r;
}

std::size_t CircularMask::pixel_count() const {
    std::size_t n = 0;
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            n += contains(x, y) ? 1 : 0;
        }
    }
    return n;
}

double masked_metric(const ImageBuffer &a, const ImageBuffer &b, double mask_diameter_px,
                     Metric metric) {
    require_same_size(a, b);
    if (!(mask_diameter_px > 0.0)) {
        throw InvalidParameter("mask diameter must be positive");
    }
    const CircularMask mask{a.width(), a.height(), mask_diameter_px};
    if (metric == Metric::Psnr) {
        return psnr_from_mse(masked_mse(a, b, [&](int x, int y) { return mask.contains(x, y); }));
    }
    // The disk is convex, so a window is inside when its four corner pixels are.
    const int last = kSsimWindow - 1;
    return ssim_windows(a, b, [&](int x, int y) {
        return mask.contains(x, y) && mask.contains(x + last, y) && mask.contains(x, y + last) &&
               mask.contains(x + last, y + last);
    });
}

} // namespace gsrt
