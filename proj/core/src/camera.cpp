// Copyright Contributors to the gsrt Project
// SPDX-License-Identifier: Apache-2.0

#include "gsrt/camera.hpp"

#include "gsrt/error.hpp"
#include "gsrt/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace gsrt {

void SensorSpec::validate() const {
    if (width_px < 1 || height_px < 1) {
        throw InvalidParameter("sensor pixel dimensions must be positive");
    }
    if (!(sensor_width_mm > 0.0) || !(sensor_height_mm > 0.0) || !(focal_length_mm > 0.0)) {
        throw InvalidParameter("sensor size and focal length must be positive");
    }
    const double pixel_aspect = static_cast<double>(width_px) / height_px;
    const double sensor_aspect = sensor_width_mm / sensor_height_mm;
    if (std::abs(pixel_aspect - sensor_aspect) > 1e-9 * sensor_aspect) {
        throw InvalidParameter("sensor aspect ratio must match the pixel aspect ratio");
    }
}

Eigen::Vector2d sensor_point_mm(const SensorSpec &sensor, double px, double py) {
    return {(px / sensor.width_px - 0.5) * sensor.sensor_width_mm,
            (0.5 - py / sensor.height_px) * sensor.sensor_height_mm};
}

double FisheyeParams::theta(double r) const {
    return k[0] + r * (k[1] + r * (k[2] + r * (k[3] + r * k[4])));
}

FisheyeLens::FisheyeLens(const FisheyeParams &params, const SensorSpec &sensor)
    : params_(params),
      max_radius_mm_(0.5 * std::hypot(sensor.sensor_width_mm, sensor.sensor_height_mm)) {
    for (double k : params.k) {
        if (!std::isfinite(k)) {
            throw InvalidParameter("fisheye coefficients must be finite");
        }
    }
    constexpr int kSamples = 4096;
    double prev = params_.theta(0.0);
    for (int s = 1; s <= kSamples; ++s) {
        const double cur = params_.theta(max_radius_mm_ * s / kSamples);
        if (!(cur > prev)) {
            throw InvalidParameter("invalid lens: theta(r) is not strictly increasing over the "
                                   "sensor radius (fails near r = " +
                                   std::to_string(max_radius_mm_ * s / kSamples) + " mm)");
        }
        prev = cur;
    }
}

void DofParams::validate() const {
    if (!(focus_distance > 0.0)) {
        throw InvalidParameter("focus distance must be positive");
    }
    if (!(aperture_radius >= 0.0)) {
        throw InvalidParameter("aperture radius must be non-negative");
    }
    if (samples_per_pixel < 1) {
        throw InvalidParameter("samples per pixel must be at least 1");
    }
}

void RollingShutterParams::validate() const {
    if (!(readout_time > 0.0) || !(time_scale > 0.0)) {
        throw InvalidParameter("readout time and time scale must be positive");
    }
    if (chunk_rows < 1) {
        throw InvalidParameter("chunk rows must be at least 1");
    }
    if (!(frame_time >= 0.0 && frame_time <= 1.0)) {
        throw InvalidParameter("frame time must lie in [0, 1]");
    }
}

Ray camera_ray(const CameraPose &pose, const Vec3 &camera_dir) {
    Ray ray;
    ray.origin = pose.position;
    ray.direction = pose.orientation * camera_dir.normalized();
    return ray;
}

Ray pinhole_ray(const CameraPose &pose, const SensorSpec &sensor, int i, int j,
                PixelJitter jitter) {
    const Eigen::Vector2d s = sensor_point_mm(sensor, i + jitter.u, j + jitter.v);
    return camera_ray(pose, Vec3(s.x(), s.y(), -sensor.focal_length_mm));
}

Vec3 fisheye_direction(double theta, double phi) {
    const double st = std::sin(theta);
    return {st * std::cos(phi), st * std::sin(phi), -std::cos(theta)};
}

std::optional<Ray> fisheye_ray(const CameraPose &pose, const SensorSpec &sensor,
                               const FisheyeLens &lens, int i, int j, PixelJitter jitter) {
    const Eigen::Vector2d s = sensor_point_mm(sensor, i + jitter.u, j + jitter.v);
    const double r = s.norm();
    const double theta = lens.params().theta(r);
    if (!(theta >= 0.0 && theta <= std::numbers::pi)) {
        return std::nullopt;
    }
    const double phi = std::atan2(s.y(), s.x());
    Ray ray;
    ray.origin = pose.position;
    ray.direction = (pose.orientation * fisheye_direction(theta, phi)).normalized();
    return ray;
}

Eigen::Vector2d aperture_sample(const DofParams &dof, int i, int j, int sample_index) {
    const auto u = counter_uniform2(dof.rng_seed, static_cast<std::uint32_t>(i),
                                    static_cast<std::uint32_t>(j),
                                    static_cast<std::uint64_t>(sample_index));
    return dof.aperture_radius * concentric_disk(u[0], u[1]);
}

Ray dof_sample_ray(const CameraPose &pose, const SensorSpec &sensor, const DofParams &dof, int i,
                   int j, int sample_index) {
    const Ray pinhole = pinhole_ray(pose, sensor, i, j);
    if (dof.aperture_radius == 0.0) {
        return pinhole;
    }
    const Vec3 focus = pinhole.origin + dof.focus_distance * pinhole.direction;
    const Eigen::Vector2d l = aperture_sample(dof, i, j, sample_index);
    Ray ray;
    ray.origin = pinhole.origin + l.x() * pose.right() + l.y() * pose.up();
    ray.direction = (focus - ray.origin).normalized();
    return ray;
}

double row_sensing_time(const RollingShutterParams &rs, int row, int height) {
    const double offset = (static_cast<double>(row) / height) * rs.readout_time / rs.time_scale;
    return std::clamp(rs.frame_time + offset, 0.0, 1.0);
}

std::vector<RowChunk> chunk_schedule(const RollingShutterParams &rs, int height) {
    if (height < 1) {
        throw InvalidParameter("image height must be at least 1");
    }
    const int n = std::max(rs.chunk_rows, 1);
    std::vector<RowChunk> chunks;
    chunks.reserve(static_cast<std::size_t>((height + n - 1) / n));
    for (int first = 0; first < height; first += n) {
        const int count = std::min(n, height - first);
        double sum = 0.0;
        for (int r = first; r < first + count; ++r) {
            sum += row_sensing_time(rs, r, height);
        }
        chunks.push_back({first, count, sum / count});
    }
    return chunks;
}

} // namespace gsrt
