// Copyright Contributors to the gsrt Project
// SPDX-License-Identifier: Apache-2.0

#include "gsrt/scene_io.hpp"

#include "json_util.hpp"

#include <string>

namespace gsrt {

using detail::json;

namespace {

std::string idx(const std::string &path, std::size_t i) {
    return path + "[" + std::to_string(i) + "]";
}

Gaussian parse_gaussian(const json &j, const std::string &path) {
    Gaussian g;
    g.mean = detail::as_vec3(detail::require(j, "mean", path), path + ".mean");
    g.rotation = from_wxyz(detail::as_vec4(detail::require(j, "rotation", path), path + ".rotation"));
    g.scale = detail::as_vec3(detail::require(j, "scale", path), path + ".scale");
    g.opacity = detail::as_number(detail::require(j, "opacity", path), path + ".opacity");
    const json &sh = detail::require(j, "sh", path);
    if (!sh.is_array()) {
        throw SchemaError(path + ".sh: expected an array of [r, g, b] triples");
    }
    g.sh.reserve(sh.size());
    for (std::size_t b = 0; b < sh.size(); ++b) {
        g.sh.push_back(detail::as_vec3(sh[b], idx(path + ".sh", b)));
    }
    return g;
}

json gaussian_to_json(const Gaussian &g) {
    json sh = json::array();
    for (const auto &c : g.sh) {
        sh.push_back(detail::to_json(c));
    }
    return json{{"mean", detail::to_json(g.mean)},
                {"rotation", detail::to_json(to_wxyz(g.rotation))},
                {"scale", detail::to_json(g.scale)},
                {"opacity", g.opacity},
                {"sh", std::move(sh)}};
}

Residuals parse_residuals(const json &j, const std::string &path) {
    Residuals r;
    r.mean = detail::as_vec3(detail::require(j, "mean", path), path + ".mean");
    r.rotation = detail::as_vec4(detail::require(j, "rotation", path), path + ".rotation");
    r.scale = detail::as_vec3(detail::require(j, "scale", path), path + ".scale");
    return r;
}

json residuals_to_json(const Residuals &r) {
    return json{{"mean", detail::to_json(r.mean)},
                {"rotation", detail::to_json(r.rotation)},
                {"scale", detail::to_json(r.scale)}};
}

Mlp parse_mlp(const json &j, const std::string &path) {
    const json &layers = detail::require(j, "layers", path);
    if (!layers.is_array()) {
        throw SchemaError(path + ".layers: expected an array");
    }
    Mlp mlp;
    for (std::size_t i = 0; i < layers.size(); ++i) {
        const std::string lp = idx(path + ".layers", i);
        const auto in = detail::as_integer(detail::require(layers[i], "in", lp), lp + ".in");
        const auto out = detail::as_integer(detail::require(layers[i], "out", lp), lp + ".out");
        if (in < 1 || out < 1) {
            throw SchemaError(lp + ": layer widths must be positive");
        }
        const auto w = detail::as_numbers(detail::require(layers[i], "weights", lp), lp + ".weights",
                                          static_cast<std::size_t>(in * out));
        const auto b = detail::as_numbers(detail::require(layers[i], "bias", lp), lp + ".bias",
                                          static_cast<std::size_t>(out));
        DenseLayer layer{Eigen::MatrixXd(out, in), Eigen::VectorXd(out)};
        for (Eigen::Index r = 0; r < out; ++r) {
            for (Eigen::Index c = 0; c < in; ++c) {
                layer.weights(r, c) = w[static_cast<std::size_t>(r * in + c)];
            }
            layer.bias[r] = b[static_cast<std::size_t>(r)];
        }
        mlp.layers.push_back(std::move(layer));
    }
    return mlp;
}

json mlp_to_json(const Mlp &mlp) {
    json layers = json::array();
    for (const auto &layer : mlp.layers) {
        json w = json::array();
        for (Eigen::Index r = 0; r < layer.weights.rows(); ++r) {
            for (Eigen::Index c = 0; c < layer.weights.cols(); ++c) {
                w.push_back(layer.weights(r, c));
            }
        }
        json b = json::array();
        for (Eigen::Index r = 0; r < layer.bias.size(); ++r) {
            b.push_back(layer.bias[r]);
        }
        layers.push_back(json{{"in", layer.weights.cols()},
                              {"out", layer.weights.rows()},
                              {"weights", std::move(w)},
                              {"bias", std::move(b)}});
    }
    return json{{"layers", std::move(layers)}};
}

HexPlaneField parse_hexplane(const json &j, const std::string &path) {
    HexPlaneField f;
    f.feature_dim = static_cast<int>(
        detail::as_integer(detail::require(j, "feature_dim", path), path + ".feature_dim"));
    f.base_resolution = static_cast<int>(detail::as_integer(
        detail::require(j, "base_resolution", path), path + ".base_resolution"));
    const json &levels = detail::require(j, "levels", path);
    if (!levels.is_array()) {
        throw SchemaError(path + ".levels: expected an array");
    }
    for (std::size_t k = 0; k < levels.size(); ++k) {
        f.levels.push_back(static_cast<int>(detail::as_integer(levels[k], idx(path + ".levels", k))));
    }
    const json &bounds = detail::require(j, "bounds", path);
    f.bounds.min = detail::as_vec3(detail::require(bounds, "min", path + ".bounds"), path + ".bounds.min");
    f.bounds.max = detail::as_vec3(detail::require(bounds, "max", path + ".bounds"), path + ".bounds.max");

    const json &planes = detail::require(j, "planes", path);
    for (int p = 0; p < kPlaneCount; ++p) {
        const std::string name(kPlaneNames[p]);
        const std::string pp = path + ".planes." + name;
        const json &grids = detail::require(planes, name, path + ".planes");
        if (!grids.is_array()) {
            throw SchemaError(pp + ": expected an array of per-level grids");
        }
        for (std::size_t k = 0; k < grids.size(); ++k) {
            const std::string gp = idx(pp, k);
            const auto w = detail::as_integer(detail::require(grids[k], "width", gp), gp + ".width");
            const auto h = detail::as_integer(detail::require(grids[k], "height", gp), gp + ".height");
            auto data = detail::as_numbers(detail::require(grids[k], "data", gp), gp + ".data");
            try {
                f.planes[p].emplace_back(static_cast<int>(w), static_cast<int>(h), f.feature_dim,
                                         std::move(data));
            } catch (const InvalidParameter &e) {
                throw SchemaError(gp + ": " + e.what());
            }
        }
    }
    f.fuse = parse_mlp(detail::require(j, "fuse_mlp", path), path + ".fuse_mlp");
    const json &heads = detail::require(j, "heads", path);
    f.heads.position = parse_mlp(detail::require(heads, "position", path + ".heads"), path + ".heads.position");
    f.heads.rotation = parse_mlp(detail::require(heads, "rotation", path + ".heads"), path + ".heads.rotation");
    f.heads.scale = parse_mlp(detail::require(heads, "scale", path + ".heads"), path + ".heads.scale");
    return f;
}

json hexplane_to_json(const HexPlaneField &f) {
    json planes = json::object();
    for (int p = 0; p < kPlaneCount; ++p) {
        json grids = json::array();
        for (const auto &g : f.planes[p]) {
            grids.push_back(json{{"width", g.width()}, {"height", g.height()}, {"data", g.data()}});
        }
        planes[std::string(kPlaneNames[p])] = std::move(grids);
    }
    return json{{"kind", "hexplane"},
                {"feature_dim", f.feature_dim},
                {"levels", f.levels},
                {"base_resolution", f.base_resolution},
                {"bounds", {{"min", detail::to_json(f.bounds.min)}, {"max", detail::to_json(f.bounds.max)}}},
                {"planes", std::move(planes)},
                {"fuse_mlp", mlp_to_json(f.fuse)},
                {"heads",
                 {{"position", mlp_to_json(f.heads.position)},
                  {"rotation", mlp_to_json(f.heads.rotation)},
                  {"scale", mlp_to_json(f.heads.scale)}}}};
}

Deformation parse_deformation(const json &j) {
    const std::string path = "deformation";
    const json &kind_j = detail::require(j, "kind", path);
    if (!kind_j.is_string()) {
        throw SchemaError("deformation.kind: expected a string");
    }
    const auto kind = kind_j.get<std::string>();
    if (kind == "none") {
        return NoDeformation{};
    }
    if (kind == "keyframes") {
        KeyframeTrack track;
        track.times = detail::as_numbers(detail::require(j, "times", path), path + ".times");
        const json &deltas = detail::require(j, "deltas", path);
        if (!deltas.is_array()) {
            throw SchemaError("deformation.deltas: expected an array per keyframe");
        }
        for (std::size_t k = 0; k < deltas.size(); ++k) {
            const std::string kp = idx(path + ".deltas", k);
            if (!deltas[k].is_array()) {
                throw SchemaError(kp + ": expected an array of per-gaussian residuals");
            }
            std::vector<Residuals> frame;
            frame.reserve(deltas[k].size());
            for (std::size_t i = 0; i < deltas[k].size(); ++i) {
                frame.push_back(parse_residuals(deltas[k][i], idx(kp, i)));
            }
            track.deltas.push_back(std::move(frame));
        }
        return track;
    }
    if (kind == "hexplane") {
        return parse_hexplane(j, path);
    }
    throw SchemaError("deformation.kind: unknown kind \"" + kind + "\"");
}

json deformation_to_json(const Deformation &d) {
    if (const auto *track = std::get_if<KeyframeTrack>(&d)) {
        json deltas = json::array();
        for (const auto &frame : track->deltas) {
            json arr = json::array();
            for (const auto &r : frame) {
                arr.push_back(residuals_to_json(r));
            }
            deltas.push_back(std::move(arr));
        }
        return json{{"kind", "keyframes"}, {"times", track->times}, {"deltas", std::move(deltas)}};
    }
    if (const auto *field = std::get_if<HexPlaneField>(&d)) {
        return hexplane_to_json(*field);
    }
    return json{{"kind", "none"}};
}

} // namespace

Scene parse_scene(std::string_view json_text) {
    const json root = detail::parse_json(json_text, "scene");
    Scene scene;
    scene.canonical.sh_degree = static_cast<int>(
        detail::as_integer(detail::require(root, "sh_degree", "scene"), "sh_degree"));
    const json &gaussians = detail::require(root, "gaussians", "scene");
    if (!gaussians.is_array()) {
        throw SchemaError("gaussians: expected an array");
    }
    scene.canonical.gaussians.reserve(gaussians.size());
    for (std::size_t i = 0; i < gaussians.size(); ++i) {
        scene.canonical.gaussians.push_back(parse_gaussian(gaussians[i], idx("gaussians", i)));
    }
    validate_snapshot(scene.canonical);
    if (const auto it = root.find("deformation"); it != root.end()) {
        scene.deformation = parse_deformation(*it);
    }
    validate_deformation(scene.deformation, scene.canonical.size());
    return scene;
}

std::string serialize_scene(const Scene &scene) {
    json gaussians = json::array();
    for (const auto &g : scene.canonical.gaussians) {
        gaussians.push_back(gaussian_to_json(g));
    }
    json root{{"sh_degree", scene.canonical.sh_degree},
              {"gaussians", std::move(gaussians)},
              {"deformation", deformation_to_json(scene.deformation)}};
    return root.dump(1);
}

Scene load_scene(const std::filesystem::path &path) {
    return parse_scene(detail::read_text(path));
}

void save_scene(const Scene &scene, const std::filesystem::path &path) {
    detail::write_text(path, serialize_scene(scene));
}

} // namespace gsrt
