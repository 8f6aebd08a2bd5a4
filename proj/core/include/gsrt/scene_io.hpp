// Copyright Contributors to the gsrt Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "gsrt/deformation.hpp"
#include "gsrt/gaussian.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace gsrt {

/// Canonical gaussians plus the deformation that animates them.
struct Scene {
    SceneSnapshot canonical;
    Deformation deformation = NoDeformation{};
};

/// Parses and validates scene JSON. Errors name the offending gaussian index
/// and field (InvariantViolation) or the JSON path (SchemaError).
Scene parse_scene(std::string_view json_text);
std::string serialize_scene(const Scene &scene);

Scene load_scene(const std::filesystem::path &path);
void save_scene(const Scene &scene, const std::filesystem::path &path);

} // namespace gsrt
