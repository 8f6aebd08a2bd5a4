// Copyright Contributors to the gsrt Project
// SPDX-License-Identifier: Apache-2.0

#include "gsrt/render.hpp"

#include "gsrt/config_io.hpp"
#include "gsrt/deformation.hpp"
#include "gsrt/error.hpp"
#include "gsrt/parallel.hpp"

#include <cstdio>

namespace gsrt {

void RenderSettings::validate() const {
    if (k < 1) {
        throw InvalidParameter("k-buffer size must be at least 1");
    }
    if (tile_size < 1) {
        throw InvalidParameter("tile size must be at least 1");
    }
    if (threads < 1) {
        throw InvalidParameter("thread count must be at least 1");
    }
    if (samples_per_pixel && *samples_per_pixel < 1) {
        throw InvalidParameter("samples per pixel must be at least 1");
    }
}

namespace {

Rgb trace(const Ray &ray, const SceneSnapshot &snapshot, const Bvh *bvh,
          const RenderSettings &settings) {
    if (bvh == nullptr) {
        return settings.background;
    }
    return trace_ray(ray, snapshot, *bvh, settings.trace_options()).radiance;
}

std::optional<Bvh> maybe_bvh(const SceneSnapshot &snapshot) {
    if (snapshot.gaussians.empty()) {
        return std::nullopt;
    }
    return build_bvh(snapshot);
}

template <typename PixelFn>
void render_tiles(ImageBuffer &img, int row_begin, int row_end, const RenderSettings &settings,
                  PixelFn &&pixel) {
    const int tile = settings.tile_size;
    const int tiles_x = (img.width() + tile - 1) / tile;
    const int tiles_y = (row_end - row_begin + tile - 1) / tile;
    parallel_for(static_cast<std::size_t>(tiles_x) * tiles_y, settings.threads, [&](std::size_t t) {
        const int tx = static_cast<int>(t % tiles_x);
        const int ty = static_cast<int>(t / tiles_x);
        const int y0 = row_begin + ty * tile;
        const int x0 = tx * tile;
        for (int y = y0; y < std::min(y0 + tile, row_end); ++y) {
            for (int x = x0; x < std::min(x0 + tile, img.width()); ++x) {
                img.set_pixel(x, y, pixel(x, y));
            }
        }
    });
}

} // namespace

Rgb render_pixel(const Camera &camera, const SceneSnapshot &snapshot, const Bvh *bvh, int i, int j,
                 const RenderSettings &settings) {
    if (const auto *lens = std::get_if<FisheyeLens>(&camera.effect)) {
        const auto ray = fisheye_ray(camera.pose, camera.sensor, *lens, i, j);
        return ray ? trace(*ray, snapshot, bvh, settings) : settings.background;
    }
    if (const auto *dof = std::get_if<DofParams>(&camera.effect)) {
        const int spp = settings.samples_per_pixel.value_or(dof->samples_per_pixel);
        Rgb sum = Rgb::Zero();
        for (int s = 0; s < spp; ++s) {
            sum += trace(dof_sample_ray(camera.pose, camera.sensor, *dof, i, j, s), snapshot, bvh,
                         settings);
        }
        return spp == 1 ? sum : Rgb(sum / spp);
    }
    return trace(pinhole_ray(camera.pose, camera.sensor, i, j), snapshot, bvh, settings);
}

ImageBuffer render_snapshot(const SceneSnapshot &snapshot, const Camera &camera,
                            const RenderSettings &settings) {
    settings.validate();
    camera.sensor.validate();
    const auto bvh = maybe_bvh(snapshot);
    const Bvh *bvh_ptr = bvh ? &*bvh : nullptr;
    ImageBuffer img(camera.sensor.width_px, camera.sensor.height_px);
    render_tiles(img, 0, img.height(), settings, [&](int x, int y) {
        return render_pixel(camera, snapshot, bvh_ptr, x, y, settings);
    });
    return img;
}

ImageBuffer render_frame(const Scene &scene, const Camera &camera, const RenderSettings &settings,
                         double t) {
    if (const auto *rs = std::get_if<RollingShutterParams>(&camera.effect)) {
        RollingShutterParams frame = *rs;
        frame.frame_time = t;
        return render_rolling_frame(scene, camera.sensor, camera.pose, frame, settings);
    }
    return render_snapshot(deform_snapshot(scene.canonical, scene.deformation, t), camera, settings);
}

ImageBuffer render_rolling_frame(const Scene &scene, const SensorSpec &sensor,
                                 const CameraPose &pose, const RollingShutterParams &rs,
                                 const RenderSettings &settings) {
    settings.validate();
    sensor.validate();
    rs.validate();
    const auto chunks = chunk_schedule(rs, sensor.height_px);
    const Camera pinhole{pose, sensor, PinholeEffect{}};
    ImageBuffer img(sensor.width_px, sensor.height_px);
    // Chunks write disjoint rows.
    parallel_for(chunks.size(), settings.threads, [&](std::size_t c) {
        const RowChunk &chunk = chunks[c];
        const SceneSnapshot snapshot = deform_snapshot(scene.canonical, scene.deformation, chunk.time);
        const auto bvh = maybe_bvh(snapshot);
        const Bvh *bvh_ptr = bvh ? &*bvh : nullptr;
        for (int y = chunk.first_row; y < chunk.first_row + chunk.row_count; ++y) {
            for (int x = 0; x < sensor.width_px; ++x) {
                img.set_pixel(x, y, render_pixel(pinhole, snapshot, bvh_ptr, x, y, settings));
            }
        }
    });
    return img;
}

void RenderJob::validate() const {
    if (frames < 1) {
        throw InvalidParameter("frame count must be at least 1");
    }
    if (!(t0 <= t1)) {
        throw InvalidParameter("time range requires t0 <= t1");
    }
    if (!(t0 >= 0.0 && t1 <= 1.0)) {
        throw InvalidParameter("time range must lie within [0, 1]");
    }
    settings.validate();
}

double RenderJob::frame_time(int i) const {
    if (frames == 1) {
        return t0;
    }
    return t0 + i * (t1 - t0) / (frames - 1);
}

std::string frame_filename(int index) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "frame_%05d.ppm", index);
    return buf;
}

ImageBuffer render_job_frame(const RenderJob &job, double t) {
    job.validate();
    const Scene scene = load_scene(job.scene_path);
    const Camera camera = load_camera(job.camera_path);
    return render_frame(scene, camera, job.settings, t);
}

} // namespace gsrt
