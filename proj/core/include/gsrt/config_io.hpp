// Copyright Contributors to the gsrt Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "gsrt/camera.hpp"
#include "gsrt/fitter.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace gsrt {

/// Camera config: {"pose": {...}, "sensor": {...}, "effect": {"kind": ...}}.
Camera parse_camera(std::string_view json_text);
std::string serialize_camera(const Camera &camera);
Camera load_camera(const std::filesystem::path &path);
void save_camera(const Camera &camera, const std::filesystem::path &path);

/// Every field optional; missing ones keep FitConfig defaults.
FitConfig parse_fit_config(std::string_view json_text);
FitConfig load_fit_config(const std::filesystem::path &path);

/// {"views": [{"image": "x.ppm", "camera": "c.json" | {...}, "time": t}]}.
/// Relative paths resolve against the directory of the references file.
std::vector<ReferenceView> load_references(const std::filesystem::path &path);

/// Loss trace as CSV with header "iteration,loss,psnr".
std::string format_trace_csv(const std::vector<IterationStats> &trace);

} // namespace gsrt
