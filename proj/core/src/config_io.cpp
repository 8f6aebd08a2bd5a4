// Copyright Contributors to the gsrt Project
// SPDX-License-Identifier: Apache-2.0

#include "gsrt/config_io.hpp"

#include "json_util.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace gsrt {

using detail::json;

namespace {

template <typename T>
T optional_number(const json &obj, const char *key, T fallback, const std::string &path) {
    const auto it = obj.find(key);
    if (it == obj.end()) {
        return fallback;
    }
    if constexpr (std::is_integral_v<T>) {
        return static_cast<T>(detail::as_integer(*it, path + "." + key));
    } else {
        return static_cast<T>(detail::as_number(*it, path + "." + key));
    }
}

Camera camera_from_json(const json &root) {
    Camera cam;
    const json &pose = detail::require(root, "pose", "camera");
    cam.pose.position = detail::as_vec3(detail::require(pose, "position", "pose"), "pose.position");
    const Vec4 q = detail::as_vec4(detail::require(pose, "orientation", "pose"), "pose.orientation");
    if (std::abs(q.norm() - 1.0) > 1e-6) {
        throw InvalidParameter("pose.orientation must be a unit quaternion");
    }
    cam.pose.orientation = from_wxyz(q);

    const json &s = detail::require(root, "sensor", "camera");
    cam.sensor.width_px =
        static_cast<int>(detail::as_integer(detail::require(s, "width_px", "sensor"), "sensor.width_px"));
    cam.sensor.height_px =
        static_cast<int>(detail::as_integer(detail::require(s, "height_px", "sensor"), "sensor.height_px"));
    cam.sensor.sensor_width_mm = detail::as_number(detail::require(s, "sensor_width_mm", "sensor"),
                                                   "sensor.sensor_width_mm");
    cam.sensor.sensor_height_mm = detail::as_number(detail::require(s, "sensor_height_mm", "sensor"),
                                                    "sensor.sensor_height_mm");
    cam.sensor.focal_length_mm =
        optional_number(s, "focal_length_mm", cam.sensor.focal_length_mm, "sensor");
    cam.sensor.validate();

    const auto eff_it = root.find("effect");
    if (eff_it == root.end()) {
        return cam;
    }
    const json &e = *eff_it;
    const json &kind_j = detail::require(e, "kind", "effect");
    if (!kind_j.is_string()) {
        throw SchemaError("effect.kind: expected a string");
    }
    const auto kind = kind_j.get<std::string>();
    if (kind == "pinhole") {
        cam.effect = PinholeEffect{};
    } else if (kind == "fisheye") {
        const auto k = detail::as_numbers(detail::require(e, "k", "effect"), "effect.k", 5);
        FisheyeParams p;
        std::copy(k.begin(), k.end(), p.k.begin());
        cam.effect = FisheyeLens(p, cam.sensor);
    } else if (kind == "dof") {
        DofParams d;
        d.focus_distance = detail::as_number(detail::require(e, "focus_distance", "effect"),
                                             "effect.focus_distance");
        d.aperture_radius = detail::as_number(detail::require(e, "aperture_radius", "effect"),
                                              "effect.aperture_radius");
        d.samples_per_pixel = optional_number(e, "samples_per_pixel", d.samples_per_pixel, "effect");
        d.rng_seed = optional_number<std::uint64_t>(e, "seed", d.rng_seed, "effect");
        d.validate();
        cam.effect = d;
    } else if (kind == "rolling") {
        RollingShutterParams r;
        r.readout_time = detail::as_number(detail::require(e, "readout_time", "effect"),
                                           "effect.readout_time");
        r.time_scale = optional_number(e, "time_scale", r.time_scale, "effect");
        r.frame_time = optional_number(e, "frame_time", r.frame_time, "effect");
        r.chunk_rows = optional_number(e, "chunk_rows", r.chunk_rows, "effect");
        r.validate();
        cam.effect = r;
    } else {
        throw SchemaError("effect.kind: unknown kind \"" + kind + "\"");
    }
    return cam;
}

json camera_to_json(const Camera &cam) {
    json effect;
    if (const auto *lens = std::get_if<FisheyeLens>(&cam.effect)) {
        effect = {{"kind", "fisheye"}, {"k", lens->params().k}};
    } else if (const auto *d = std::get_if<DofParams>(&cam.effect)) {
        effect = {{"kind", "dof"},
                  {"focus_distance", d->focus_distance},
                  {"aperture_radius", d->aperture_radius},
                  {"samples_per_pixel", d->samples_per_pixel},
                  {"seed", d->rng_seed}};
    } else if (const auto *r = std::get_if<RollingShutterParams>(&cam.effect)) {
        effect = {{"kind", "rolling"},
                  {"readout_time", r->readout_time},
                  {"time_scale", r->time_scale},
                  {"frame_time", r->frame_time},
                  {"chunk_rows", r->chunk_rows}};
    } else {
        effect = {{"kind", "pinhole"}};
    }
    return json{{"pose",
                 {{"position", detail::to_json(cam.pose.position)},
                  {"orientation", detail::to_json(to_wxyz(cam.pose.orientation))}}},
                {"sensor",
                 {{"width_px", cam.sensor.width_px},
                  {"height_px", cam.sensor.height_px},
                  {"sensor_width_mm", cam.sensor.sensor_width_mm},
                  {"sensor_height_mm", cam.sensor.sensor_height_mm},
                  {"focal_length_mm", cam.sensor.focal_length_mm}}},
                {"effect", std::move(effect)}};
}

} // namespace

Camera parse_camera(std::string_view json_text) {
    return camera_from_json(detail::parse_json(json_text, "camera"));
}

std::string serialize_camera(const Camera &camera) { return camera_to_json(camera).dump(2); }

Camera load_camera(const std::filesystem::path &path) {
    return parse_camera(detail::read_text(path));
}

void save_camera(const Camera &camera, const std::filesystem::path &path) {
    detail::write_text(path, serialize_camera(camera));
}

FitConfig parse_fit_config(std::string_view json_text) {
    const json root = detail::parse_json(json_text, "fit config");
    if (!root.is_object()) {
        throw SchemaError("fit config: expected an object");
    }
    FitConfig c;
    if (const auto it = root.find("learning_rates"); it != root.end()) {
        const std::string p = "learning_rates";
        c.lr.mean = optional_number(*it, "mean", c.lr.mean, p);
        c.lr.log_scale = optional_number(*it, "scale", c.lr.log_scale, p);
        c.lr.rotation = optional_number(*it, "rotation", c.lr.rotation, p);
        c.lr.opacity_logit = optional_number(*it, "opacity", c.lr.opacity_logit, p);
        c.lr.sh = optional_number(*it, "sh", c.lr.sh, p);
    }
    const std::string p = "fit";
    c.iterations = optional_number(root, "iterations", c.iterations, p);
    c.coarse_iterations = optional_number(root, "coarse_iterations", c.coarse_iterations, p);
    c.densify_interval = optional_number(root, "densify_interval", c.densify_interval, p);
    c.densify_threshold = optional_number(root, "densify_threshold", c.densify_threshold, p);
    if (const auto it = root.find("densify_distance_scaling"); it != root.end()) {
        if (!it->is_boolean()) {
            throw SchemaError("fit.densify_distance_scaling: expected a boolean");
        }
        c.densify_distance_scaling = it->get<bool>();
    }
    c.prune_opacity = optional_number(root, "prune_opacity", c.prune_opacity, p);
    c.split_scale_fraction = optional_number(root, "split_scale_fraction", c.split_scale_fraction, p);
    c.rng_seed = optional_number<std::uint64_t>(root, "seed", c.rng_seed, p);
    c.k = optional_number(root, "k", c.k, p);
    c.threads = optional_number(root, "threads", c.threads, p);
    if (const auto it = root.find("background"); it != root.end()) {
        c.background = detail::as_vec3(*it, "fit.background");
    }
    c.validate();
    return c;
}

FitConfig load_fit_config(const std::filesystem::path &path) {
    return parse_fit_config(detail::read_text(path));
}

std::vector<ReferenceView> load_references(const std::filesystem::path &path) {
    const json root = detail::parse_json(detail::read_text(path), "references");
    const std::filesystem::path base = path.parent_path();
    const json &views = detail::require(root, "views", "references");
    if (!views.is_array() || views.empty()) {
        throw SchemaError("references.views: expected a non-empty array");
    }
    std::vector<ReferenceView> out;
    for (std::size_t i = 0; i < views.size(); ++i) {
        const std::string vp = "views[" + std::to_string(i) + "]";
        ReferenceView ref;
        const json &img = detail::require(views[i], "image", vp);
        if (!img.is_string()) {
            throw SchemaError(vp + ".image: expected a path");
        }
        ref.image = load_image(base / img.get<std::string>());
        const json &cam = detail::require(views[i], "camera", vp);
        if (cam.is_string()) {
            ref.camera = load_camera(base / cam.get<std::string>());
        } else {
            ref.camera = camera_from_json(cam);
        }
        ref.time = optional_number(views[i], "time", 0.0, vp);
        if (!(ref.time >= 0.0 && ref.time <= 1.0)) {
            throw InvalidParameter(vp + ".time must lie in [0, 1]");
        }
        out.push_back(std::move(ref));
    }
    return out;
}

std::string format_trace_csv(const std::vector<IterationStats> &trace) {
    std::ostringstream out;
    out << "iteration,loss,psnr\n";
    char buf[96];
    for (const auto &s : trace) {
        std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g\n", s.iteration, s.loss, s.psnr);
        out << buf;
    }
    return out.str();
}

} // namespace gsrt
