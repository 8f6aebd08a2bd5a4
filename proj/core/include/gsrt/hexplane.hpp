// Copyright Contributors to the gsrt Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "gsrt/types.hpp"

#include <Eigen/Core>

#include <array>
#include <cstddef>
#include <string_view>
#include <vector>

namespace gsrt {

/// 2D grid of feature vectors. Sample (iu, iv) sits at u = iu / (width - 1),
/// v = iv / (height - 1); storage is row-major over (iv, iu, channel).
class FeatureGrid {
public:
    FeatureGrid() = default;
    FeatureGrid(int width, int height, int channels, double fill = 0.0);
    FeatureGrid(int width, int height, int channels, std::vector<double> data);

    int width() const { return width_; }
    int height() const { return height_; }
    int channels() const { return channels_; }
    bool empty() const { return data_.empty(); }

    double &at(int iu, int iv, int c) { return data_[index(iu, iv, c)]; }
    double at(int iu, int iv, int c) const { return data_[index(iu, iv, c)]; }

    const std::vector<double> &data() const { return data_; }

private:
    std::size_t index(int iu, int iv, int c) const {
        return (static_cast<std::size_t>(iv) * width_ + iu) * channels_ + c;
    }

    int width_ = 0;
    int height_ = 0;
    int channels_ = 0;
    std::vector<double> data_;
};

/// Bilinear lookup at (u, v) in [0,1]^2. Throws OutOfBounds outside the unit
/// square; callers clamp world coordinates first.
Eigen::VectorXd interp_plane(const FeatureGrid &grid, double u, double v);

struct DenseLayer {
    Eigen::MatrixXd weights; // out x in
    Eigen::VectorXd bias;    // out
};

/// Fully connected network: ReLU after every hidden layer, linear output layer.
struct Mlp {
    std::vector<DenseLayer> layers;

    Eigen::Index input_width() const;
    Eigen::Index output_width() const;
    Eigen::VectorXd forward(const Eigen::VectorXd &x) const;
    /// Throws InvalidParameter when consecutive layer widths disagree.
    void validate(std::string_view name) const;
};

enum class PlaneAxes : int { XY = 0, XZ, YZ, XT, YT, ZT };
inline constexpr int kPlaneCount = 6;
inline constexpr std::array<std::string_view, kPlaneCount> kPlaneNames = {"xy", "xz", "yz",
                                                                         "xt", "yt", "zt"};

struct DeformationHeads {
    Mlp position; // -> 3
    Mlp rotation; // -> 4, (w, x, y, z) increment
    Mlp scale;    // -> 3
};

struct Bounds3 {
    Vec3 min = Vec3::Zero();
    Vec3 max = Vec3::Ones();
};

struct HexPlaneField {
    int feature_dim = 0;
    std::vector<int> levels;
    int base_resolution = 0;
    Bounds3 bounds;
    /// planes[p][k]: plane p at level index k, resolution levels[k] * base_resolution.
    std::array<std::vector<FeatureGrid>, kPlaneCount> planes;
    Mlp fuse;
    DeformationHeads heads;

    void validate() const;
};

struct Residuals {
    Vec3 mean = Vec3::Zero();
    Vec4 rotation = Vec4::Zero(); // (w, x, y, z)
    Vec3 scale = Vec3::Zero();
};

/// Normalized lookup coordinates (x, y, z, t), each clamped to [0, 1].
Eigen::Vector4d normalized_coords(const HexPlaneField &field, const Vec3 &position, double t);

/// Pre-MLP feature f_h: per level, the channelwise product of the six
/// interpolated plane features; levels concatenated in order.
Eigen::VectorXd spacetime_features(const HexPlaneField &field, const Vec3 &position, double t);

/// f = fuse(f_h).
Eigen::VectorXd encode_spacetime(const HexPlaneField &field, const Vec3 &position, double t);

Residuals decode_residuals(const Eigen::VectorXd &f, const DeformationHeads &heads);

/// Random field of the given shape; weights drawn uniformly from [-scale, scale].
HexPlaneField make_random_field(int feature_dim, std::vector<int> levels, int base_resolution,
                                int hidden_width, int fused_width, Bounds3 bounds,
                                unsigned long long seed, double weight_scale = 0.5);

/// Field of the given shape whose heads are all-zero networks.
HexPlaneField make_zero_head_field(int feature_dim, std::vector<int> levels, int base_resolution,
                                   Bounds3 bounds);

} // namespace gsrt
