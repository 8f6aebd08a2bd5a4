// Copyright Contributors to the gsrt Project
// SPDX-License-Identifier: Apache-2.0

#include "gsrt/image.hpp"

#include "gsrt/error.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

namespace gsrt {

ImageBuffer::ImageBuffer(int width, int height, const Rgb &fill)
    : width_(width), height_(height) {
    if (width < 0 || height < 0) {
        throw InvalidParameter("image dimensions must be non-negative");
    }
    data_.resize(pixel_count() * 3);
    for (std::size_t p = 0; p < pixel_count(); ++p) {
        data_[3 * p] = fill[0];
        data_[3 * p + 1] = fill[1];
        data_[3 * p + 2] = fill[2];
    }
}

std::uint8_t quantize(double v) {
    const double c = std::isnan(v) ? 0.0 : std::clamp(v, 0.0, 1.0);
    return static_cast<std::uint8_t>(std::floor(c * 255.0 + 0.5));
}

std::string encode_ppm(const ImageBuffer &img) {
    std::string out = "P6\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) +
                      "\n255\n";
    const std::size_t header = out.size();
    out.resize(header + img.data().size());
    for (std::size_t i = 0; i < img.data().size(); ++i) {
        out[header + i] = static_cast<char>(quantize(img.data()[i]));
    }
    return out;
}

namespace {

// Reads one whitespace-delimited header token, skipping '#' comments.
std::string header_token(const std::string &bytes, std::size_t &pos) {
    while (pos < bytes.size()) {
        const auto c = static_cast<unsigned char>(bytes[pos]);
        if (c == '#') {
            while (pos < bytes.size() && bytes[pos] != '\n') {
                ++pos;
            }
        } else if (std::isspace(c)) {
            ++pos;
        } else {
            break;
        }
    }
    const std::size_t start = pos;
    while (pos < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[pos]))) {
        ++pos;
    }
    if (start == pos) {
        throw SchemaError("malformed PPM header: unexpected end of data");
    }
    return bytes.substr(start, pos - start);
}

int header_int(const std::string &bytes, std::size_t &pos, const char *what) {
    const std::string tok = header_token(bytes, pos);
    if (!std::all_of(tok.begin(), tok.end(), [](unsigned char c) { return std::isdigit(c); }) ||
        tok.size() > 9) {
        throw SchemaError(std::string("malformed PPM header: bad ") + what + " \"" + tok + "\"");
    }
    return std::stoi(tok);
}

} // namespace

ImageBuffer decode_ppm(const std::string &bytes) {
    std::size_t pos = 0;
    if (header_token(bytes, pos) != "P6") {
        throw SchemaError("malformed PPM header: expected magic P6");
    }
    const int w = header_int(bytes, pos, "width");
    const int h = header_int(bytes, pos, "height");
    const int maxval = header_int(bytes, pos, "maxval");
    if (w < 1 || h < 1 || maxval != 255) {
        throw SchemaError("malformed PPM header: need positive size and maxval 255");
    }
    if (pos >= bytes.size() || !std::isspace(static_cast<unsigned char>(bytes[pos]))) {
        throw SchemaError("malformed PPM header: missing separator before pixel data");
    }
    ++pos;
    const std::size_t expected = static_cast<std::size_t>(w) * h * 3;
    if (bytes.size() - pos != expected) {
        throw SchemaError("PPM pixel data has " + std::to_string(bytes.size() - pos) +
                          " bytes, expected " + std::to_string(expected));
    }
    ImageBuffer img(w, h);
    for (std::size_t i = 0; i < expected; ++i) {
        img.data()[i] = static_cast<unsigned char>(bytes[pos + i]) / 255.0;
    }
    return img;
}

void save_image(const ImageBuffer &img, const std::filesystem::path &path) {
    std::ofstream out(path, std::ios::binary);
    const std::string bytes = encode_ppm(img);
    if (!out || !out.write(bytes.data(), static_cast<std::streamsize>(bytes.size())) ||
        !out.flush()) {
        throw IoError("cannot write " + path.string());
    }
}

ImageBuffer load_image(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return decode_ppm(ss.str());
}

} // namespace gsrt
