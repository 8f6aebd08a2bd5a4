// Copyright Contributors to the gsrt Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "gsrt/ray.hpp"
#include "gsrt/types.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

namespace gsrt {

/// Camera-to-world pose. In camera space the camera looks down -z with +x
/// right and +y up.
struct CameraPose {
    Vec3 position = Vec3::Zero();
    Quat orientation = Quat::Identity();

    Vec3 forward() const { return orientation * Vec3(0.0, 0.0, -1.0); }
    Vec3 right() const { return orientation * Vec3(1.0, 0.0, 0.0); }
    Vec3 up() const { return orientation * Vec3(0.0, 1.0, 0.0); }
};

struct SensorSpec {
    int width_px = 0;
    int height_px = 0;
    double sensor_width_mm = 36.0;
    double sensor_height_mm = 36.0;
    double focal_length_mm = 50.0;

    void validate() const;
};

/// Continuous pixel position (x right, y down, both in pixels) to sensor
/// millimetres centred on the principal point, +y up.
Eigen::Vector2d sensor_point_mm(const SensorSpec &sensor, double px, double py);

struct PixelJitter {
    double u = 0.5;
    double v = 0.5;
};

/// Polar angle theta(r) = k0 + k1 r + ... + k4 r^4, r in millimetres.
struct FisheyeParams {
    std::array<double, 5> k{};

    double theta(double r_mm) const;
};

/// Fisheye lens validated against a sensor: theta must be strictly
/// increasing over the sensor's radial range.
class FisheyeLens {
public:
    FisheyeLens(const FisheyeParams &params, const SensorSpec &sensor);

    const FisheyeParams &params() const { return params_; }
    double max_radius_mm() const { return max_radius_mm_; }

private:
    FisheyeParams params_;
    double max_radius_mm_ = 0.0;
};

struct DofParams {
    double focus_distance = 1.0;
    double aperture_radius = 0.0;
    int samples_per_pixel = 1;
    std::uint64_t rng_seed = 0;

    void validate() const;
};

struct RollingShutterParams {
    double readout_time = 0.0; // seconds
    double frame_time = 0.0;   // normalized scene time of row 0
    double time_scale = 1.0;   // seconds per unit of scene time
    int chunk_rows = 4;

    void validate() const;
};

struct PinholeEffect {};

using CameraEffect = std::variant<PinholeEffect, FisheyeLens, DofParams, RollingShutterParams>;

struct Camera {
    CameraPose pose;
    SensorSpec sensor;
    CameraEffect effect = PinholeEffect{};
};

/// Camera-space direction to a world-space ray from the camera position.
Ray camera_ray(const CameraPose &pose, const Vec3 &camera_dir);

/// Ray through the sensor point of pixel (i + u, j + v) and the pinhole.
Ray pinhole_ray(const CameraPose &pose, const SensorSpec &sensor, int i, int j,
                PixelJitter jitter = {});

/// Camera-space unit direction for polar angle theta and azimuth phi.
Vec3 fisheye_direction(double theta, double phi);

/// Empty when theta(r) falls outside [0, pi].
std::optional<Ray> fisheye_ray(const CameraPose &pose, const SensorSpec &sensor,
                               const FisheyeLens &lens, int i, int j, PixelJitter jitter = {});

/// Aperture point on the lens disk of radius r_a for one sample.
Eigen::Vector2d aperture_sample(const DofParams &dof, int i, int j, int sample_index);

/// Thin-lens sample: jitters the pinhole origin across the aperture and
/// re-aims at the point f_z along the pinhole ray.
Ray dof_sample_ray(const CameraPose &pose, const SensorSpec &sensor, const DofParams &dof, int i,
                   int j, int sample_index);

/// Scene time at which `row` is read out, clamped to [0, 1].
double row_sensing_time(const RollingShutterParams &rs, int row, int height);

struct RowChunk {
    int first_row = 0;
    int row_count = 0;
    double time = 0.0; // mean sensing time of the chunk's rows
};

std::vector<RowChunk> chunk_schedule(const RollingShutterParams &rs, int height);

} // namespace gsrt
