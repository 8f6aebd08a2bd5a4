// Copyright Contributors to the gsrt Project
// SPDX-License-Identifier: Apache-2.0

#include "gsrt/hexplane.hpp"

#include "gsrt/error.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace gsrt {

FeatureGrid::FeatureGrid(int width, int height, int channels, double fill)
    : width_(width), height_(height), channels_(channels),
      data_(static_cast<std::size_t>(width) * height * channels, fill) {
    if (width < 1 || height < 1 || channels < 1) {
        throw InvalidParameter("feature grid dimensions must be positive");
    }
}

FeatureGrid::FeatureGrid(int width, int height, int channels, std::vector<double> data)
    : width_(width), height_(height), channels_(channels), data_(std::move(data)) {
    if (width < 1 || height < 1 || channels < 1) {
        throw InvalidParameter("feature grid dimensions must be positive");
    }
    if (data_.size() != static_cast<std::size_t>(width) * height * channels) {
        throw InvalidParameter("feature grid data has " + std::to_string(data_.size()) +
                               " values, expected " +
                               std::to_string(static_cast<std::size_t>(width) * height * channels));
    }
}

namespace {

// Lower sample index and fractional weight along one axis.
std::pair<int, double> axis_cell(double coord, int samples) {
    if (samples == 1) {
        return {0, 0.0};
    }
    const double x = coord * (samples - 1);
    const int i0 = std::min(static_cast<int>(std::floor(x)), samples - 2);
    return {i0, x - i0};
}

} // namespace

Eigen::VectorXd interp_plane(const FeatureGrid &grid, double u, double v) {
    if (grid.empty()) {
        throw InvalidParameter("interpolation on an empty grid");
    }
    if (!(u >= 0.0 && u <= 1.0 && v >= 0.0 && v <= 1.0)) {
        throw OutOfBounds("plane lookup (" + std::to_string(u) + ", " + std::to_string(v) +
                          ") outside [0,1]^2");
    }
    const auto [iu, fu] = axis_cell(u, grid.width());
    const auto [iv, fv] = axis_cell(v, grid.height());
    const int iu1 = std::min(iu + 1, grid.width() - 1);
    const int iv1 = std::min(iv + 1, grid.height() - 1);
    const double w00 = (1.0 - fu) * (1.0 - fv);
    const double w10 = fu * (1.0 - fv);
    const double w01 = (1.0 - fu) * fv;
    const double w11 = fu * fv;

    Eigen::VectorXd out(grid.channels());
    for (int c = 0; c < grid.channels(); ++c) {
        out[c] = w00 * grid.at(iu, iv, c) + w10 * grid.at(iu1, iv, c) + w01 * grid.at(iu, iv1, c) +
                 w11 * grid.at(iu1, iv1, c);
    }
    return out;
}

Eigen::Index Mlp::input_width() const { return layers.empty() ? 0 : layers.front().weights.cols(); }

Eigen::Index Mlp::output_width() const { return layers.empty() ? 0 : layers.back().weights.rows(); }

Eigen::VectorXd Mlp::forward(const Eigen::VectorXd &x) const {
    if (x.size() != input_width()) {
        throw InvalidParameter("MLP input width " + std::to_string(x.size()) + ", expected " +
                               std::to_string(input_width()));
    }
    Eigen::VectorXd h = x;
    for (std::size_t i = 0; i < layers.size(); ++i) {
        h = layers[i].weights * h + layers[i].bias;
        if (i + 1 < layers.size()) {
            h = h.cwiseMax(0.0);
        }
    }
    return h;
}

void Mlp::validate(std::string_view name) const {
    const std::string label(name);
    if (layers.empty()) {
        throw InvalidParameter("MLP " + label + " has no layers");
    }
    for (std::size_t i = 0; i < layers.size(); ++i) {
        const auto &layer = layers[i];
        if (layer.bias.size() != layer.weights.rows()) {
            throw InvalidParameter("MLP " + label + " layer " + std::to_string(i) +
                                   ": bias width does not match output width");
        }
        if (i > 0 && layer.weights.cols() != layers[i - 1].weights.rows()) {
            throw InvalidParameter("MLP " + label + " layer " + std::to_string(i) +
                                   ": input width does not match previous output width");
        }
        if (!layer.weights.allFinite() || !layer.bias.allFinite()) {
            throw InvalidParameter("MLP " + label + " layer " + std::to_string(i) +
                                   ": non-finite weights");
        }
    }
}

void HexPlaneField::validate() const {
    if (feature_dim < 1 || base_resolution < 1 || levels.empty()) {
        throw InvalidParameter("hexplane field needs feature_dim, base_resolution and levels > 0");
    }
    for (int l : levels) {
        if (l < 1) {
            throw InvalidParameter("hexplane level scales must be positive");
        }
    }
    if (!((bounds.max - bounds.min).array() > 0.0).all()) {
        throw InvalidParameter("hexplane bounds must have positive extent");
    }
    for (int p = 0; p < kPlaneCount; ++p) {
        const std::string name(kPlaneNames[p]);
        if (planes[p].size() != levels.size()) {
            throw InvalidParameter("plane " + name + " must have one grid per level");
        }
        for (std::size_t k = 0; k < levels.size(); ++k) {
            const auto &g = planes[p][k];
            const int res = levels[k] * base_resolution;
            if (g.width() != res || g.height() != res || g.channels() != feature_dim) {
                throw InvalidParameter("plane " + name + " level " + std::to_string(k) +
                                       ": expected " + std::to_string(res) + "x" +
                                       std::to_string(res) + "x" + std::to_string(feature_dim));
            }
        }
    }
    fuse.validate("fuse");
    heads.position.validate("position head");
    heads.rotation.validate("rotation head");
    heads.scale.validate("scale head");
    const Eigen::Index fh = static_cast<Eigen::Index>(feature_dim) * levels.size();
    if (fuse.input_width() != fh) {
        throw InvalidParameter("fuse MLP input width must equal feature_dim * |levels| = " +
                               std::to_string(fh));
    }
    for (const Mlp *head : {&heads.position, &heads.rotation, &heads.scale}) {
        if (head->input_width() != fuse.output_width()) {
            throw InvalidParameter("head input width must equal fuse output width");
        }
    }
    if (heads.position.output_width() != 3 || heads.rotation.output_width() != 4 ||
        heads.scale.output_width() != 3) {
        throw InvalidParameter("head output widths must be 3 (position), 4 (rotation), 3 (scale)");
    }
}

Eigen::Vector4d normalized_coords(const HexPlaneField &field, const Vec3 &position, double t) {
    const Vec3 extent = field.bounds.max - field.bounds.min;
    Eigen::Vector4d c;
    for (int a = 0; a < 3; ++a) {
        c[a] = std::clamp((position[a] - field.bounds.min[a]) / extent[a], 0.0, 1.0);
    }
    c[3] = std::clamp(t, 0.0, 1.0);
    return c;
}

Eigen::VectorXd spacetime_features(const HexPlaneField &field, const Vec3 &position, double t) {
    static constexpr std::array<std::array<int, 2>, kPlaneCount> kAxes = {
        {{0, 1}, {0, 2}, {1, 2}, {0, 3}, {1, 3}, {2, 3}}};
    const Eigen::Vector4d c = normalized_coords(field, position, t);
    const int h = field.feature_dim;
    Eigen::VectorXd fh(static_cast<Eigen::Index>(h) * field.levels.size());
    for (std::size_t k = 0; k < field.levels.size(); ++k) {
        Eigen::VectorXd prod = Eigen::VectorXd::Ones(h);
        for (int p = 0; p < kPlaneCount; ++p) {
            prod.array() *= interp_plane(field.planes[p][k], c[kAxes[p][0]], c[kAxes[p][1]]).array();
        }
        fh.segment(static_cast<Eigen::Index>(k) * h, h) = prod;
    }
    return fh;
}

Eigen::VectorXd encode_spacetime(const HexPlaneField &field, const Vec3 &position, double t) {
    return field.fuse.forward(spacetime_features(field, position, t));
}

Residuals decode_residuals(const Eigen::VectorXd &f, const DeformationHeads &heads) {
    for (const Mlp *head : {&heads.position, &heads.rotation, &heads.scale}) {
        if (head->input_width() != f.size()) {
            throw InvalidParameter("feature width " + std::to_string(f.size()) +
                                   " does not match head input width " +
                                   std::to_string(head->input_width()));
        }
    }
    const Eigen::VectorXd dx = heads.position.forward(f);
    const Eigen::VectorXd dr = heads.rotation.forward(f);
    const Eigen::VectorXd ds = heads.scale.forward(f);
    if (dx.size() != 3 || dr.size() != 4 || ds.size() != 3) {
        throw InvalidParameter("head output widths must be 3, 4 and 3");
    }
    Residuals r;
    r.mean = dx;
    r.rotation = dr;
    r.scale = ds;
    return r;
}

namespace {

DenseLayer random_layer(int in, int out, std::mt19937_64 &rng, double scale) {
    std::uniform_real_distribution<double> u(-scale, scale);
    DenseLayer layer{Eigen::MatrixXd(out, in), Eigen::VectorXd(out)};
    for (int r = 0; r < out; ++r) {
        for (int c = 0; c < in; ++c) {
            layer.weights(r, c) = u(rng);
        }
        layer.bias[r] = u(rng);
    }
    return layer;
}

DenseLayer zero_layer(int in, int out) {
    return {Eigen::MatrixXd::Zero(out, in), Eigen::VectorXd::Zero(out)};
}

HexPlaneField field_shell(int feature_dim, std::vector<int> levels, int base_resolution,
                          Bounds3 bounds) {
    HexPlaneField field;
    field.feature_dim = feature_dim;
    field.levels = std::move(levels);
    field.base_resolution = base_resolution;
    field.bounds = bounds;
    return field;
}

} // namespace

HexPlaneField make_random_field(int feature_dim, std::vector<int> levels, int base_resolution,
                                int hidden_width, int fused_width, Bounds3 bounds,
                                unsigned long long seed, double weight_scale) {
    std::mt19937_64 rng(seed);
    HexPlaneField field = field_shell(feature_dim, std::move(levels), base_resolution, bounds);
    // Plane values are drawn near 1.
    std::uniform_real_distribution<double> texel(0.5, 1.5);
    for (int p = 0; p < kPlaneCount; ++p) {
        for (int l : field.levels) {
            const int res = l * base_resolution;
            FeatureGrid g(res, res, feature_dim);
            for (int iv = 0; iv < res; ++iv) {
                for (int iu = 0; iu < res; ++iu) {
                    for (int c = 0; c < feature_dim; ++c) {
                        g.at(iu, iv, c) = texel(rng);
                    }
                }
            }
            field.planes[p].push_back(std::move(g));
        }
    }
    const int fh = feature_dim * static_cast<int>(field.levels.size());
    field.fuse.layers.push_back(random_layer(fh, hidden_width, rng, weight_scale));
    field.fuse.layers.push_back(random_layer(hidden_width, fused_width, rng, weight_scale));
    auto head = [&](int out) {
        Mlp m;
        m.layers.push_back(random_layer(fused_width, hidden_width, rng, weight_scale));
        m.layers.push_back(random_layer(hidden_width, out, rng, weight_scale));
        return m;
    };
    field.heads.position = head(3);
    field.heads.rotation = head(4);
    field.heads.scale = head(3);
    return field;
}

HexPlaneField make_zero_head_field(int feature_dim, std::vector<int> levels, int base_resolution,
                                   Bounds3 bounds) {
    HexPlaneField field = field_shell(feature_dim, std::move(levels), base_resolution, bounds);
    for (int p = 0; p < kPlaneCount; ++p) {
        for (int l : field.levels) {
            field.planes[p].emplace_back(l * base_resolution, l * base_resolution, feature_dim, 1.0);
        }
    }
    const int fh = feature_dim * static_cast<int>(field.levels.size());
    field.fuse.layers.push_back(zero_layer(fh, fh));
    field.heads.position.layers.push_back(zero_layer(fh, 3));
    field.heads.rotation.layers.push_back(zero_layer(fh, 4));
    field.heads.scale.layers.push_back(zero_layer(fh, 3));
    return field;
}

} // namespace gsrt
