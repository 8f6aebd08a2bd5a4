// Copyright Contributors to the gsrt Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "gsrt/bvh.hpp"
#include "gsrt/camera.hpp"
#include "gsrt/image.hpp"
#include "gsrt/scene_io.hpp"
#include "gsrt/tracer.hpp"

#include <filesystem>
#include <optional>
#include <string>

namespace gsrt {

struct RenderSettings {
    int k = kDefaultKBuffer;
    int tile_size = 16;
    int threads = 1;
    Rgb background = Rgb::Zero();
    /// Overrides the depth-of-field sample count when set.
    std::optional<int> samples_per_pixel;

    void validate() const;
    TraceOptions trace_options() const { return {k, background}; }
};

/// Radiance of pixel (i, j) for a non-rolling camera. Rolling-shutter cameras
/// are treated as pinhole here; their timing lives in render_rolling_frame.
Rgb render_pixel(const Camera &camera, const SceneSnapshot &snapshot, const Bvh *bvh, int i, int j,
                 const RenderSettings &settings);

/// Renders one snapshot, parallel over tiles. Output is bit-identical for any
/// thread count or tile size.
ImageBuffer render_snapshot(const SceneSnapshot &snapshot, const Camera &camera,
                            const RenderSettings &settings);

/// Deforms the scene at t and renders it. Rolling-shutter cameras start
/// their readout at t.
ImageBuffer render_frame(const Scene &scene, const Camera &camera, const RenderSettings &settings,
                         double t);

/// Chunked rolling-shutter render: each chunk of rows is traced through the
/// scene deformed at the chunk's mean sensing time.
ImageBuffer render_rolling_frame(const Scene &scene, const SensorSpec &sensor,
                                 const CameraPose &pose, const RollingShutterParams &rs,
                                 const RenderSettings &settings);

/// CLI unit of work.
struct RenderJob {
    std::filesystem::path scene_path;
    std::filesystem::path camera_path;
    std::filesystem::path output; // file for a single frame, directory for sequences
    double t0 = 0.0;
    double t1 = 0.0;
    int frames = 1;
    RenderSettings settings;

    void validate() const;
    /// t0 + i (t1 - t0) / (frames - 1); a single frame maps to t0.
    double frame_time(int i) const;
};

/// "frame_%05d.ppm"
std::string frame_filename(int index);

ImageBuffer render_job_frame(const RenderJob &job, double t);

} // namespace gsrt
