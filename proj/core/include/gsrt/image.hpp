// Copyright Contributors to the gsrt Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "gsrt/types.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace gsrt {

/// Linear RGB image, row-major with the top row first.
class ImageBuffer {
public:
    ImageBuffer() = default;
    ImageBuffer(int width, int height, const Rgb &fill = Rgb::Zero());

    int width() const { return width_; }
    int height() const { return height_; }
    std::size_t pixel_count() const { return static_cast<std::size_t>(width_) * height_; }

    Rgb pixel(int x, int y) const {
        const std::size_t o = offset(x, y);
        return {data_[o], data_[o + 1], data_[o + 2]};
    }
    void set_pixel(int x, int y, const Rgb &c) {
        const std::size_t o = offset(x, y);
        data_[o] = c[0];
        data_[o + 1] = c[1];
        data_[o + 2] = c[2];
    }
    double channel(int x, int y, int c) const { return data_[offset(x, y) + c]; }

    const std::vector<double> &data() const { return data_; }
    std::vector<double> &data() { return data_; }

    bool operator==(const ImageBuffer &) const = default;

private:
    std::size_t offset(int x, int y) const {
        return (static_cast<std::size_t>(y) * width_ + x) * 3;
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<double> data_;
};

/// round(clamp(v, 0, 1) * 255), halves rounding up.
std::uint8_t quantize(double v);

/// Binary PPM (P6): "P6\n<w> <h>\n255\n" then RGB bytes, top row first.
std::string encode_ppm(const ImageBuffer &img);
ImageBuffer decode_ppm(const std::string &bytes);

void save_image(const ImageBuffer &img, const std::filesystem::path &path);
ImageBuffer load_image(const std::filesystem::path &path);

} // namespace gsrt
