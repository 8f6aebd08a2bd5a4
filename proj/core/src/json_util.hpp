// Copyright Contributors to the gsrt Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "gsrt/error.hpp"
#include "gsrt/types.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace gsrt::detail {

using json = nlohmann::json;

inline const json &require(const json &obj, const std::string &key, const std::string &path) {
    if (!obj.is_object()) {
        throw SchemaError(path + ": expected an object");
    }
    const auto it = obj.find(key);
    if (it == obj.end()) {
        throw SchemaError(path + ": missing field \"" + key + "\"");
    }
    return *it;
}

inline double as_number(const json &v, const std::string &path) {
    if (!v.is_number()) {
        throw SchemaError(path + ": expected a number");
    }
    return v.get<double>();
}

inline long long as_integer(const json &v, const std::string &path) {
    if (!v.is_number_integer()) {
        throw SchemaError(path + ": expected an integer");
    }
    return v.get<long long>();
}

inline std::vector<double> as_numbers(const json &v, const std::string &path,
                                      std::size_t expected = 0) {
    if (!v.is_array()) {
        throw SchemaError(path + ": expected an array of numbers");
    }
    if (expected != 0 && v.size() != expected) {
        throw SchemaError(path + ": expected " + std::to_string(expected) + " numbers, got " +
                          std::to_string(v.size()));
    }
    std::vector<double> out;
    out.reserve(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        out.push_back(as_number(v[i], path + "[" + std::to_string(i) + "]"));
    }
    return out;
}

inline Vec3 as_vec3(const json &v, const std::string &path) {
    const auto n = as_numbers(v, path, 3);
    return Vec3(n[0], n[1], n[2]);
}

inline Vec4 as_vec4(const json &v, const std::string &path) {
    const auto n = as_numbers(v, path, 4);
    return Vec4(n[0], n[1], n[2], n[3]);
}

inline json to_json(const Vec3 &v) { return json::array({v[0], v[1], v[2]}); }
inline json to_json(const Vec4 &v) { return json::array({v[0], v[1], v[2], v[3]}); }

inline std::string read_text(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_text(const std::filesystem::path &path, const std::string &text) {
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << text) || !out.flush()) {
        throw IoError("cannot write " + path.string());
    }
}

inline json parse_json(std::string_view text, const std::string &what) {
    try {
        return json::parse(text.begin(), text.end());
    } catch (const json::parse_error &e) {
        throw SchemaError(what + ": " + e.what());
    }
}

} // namespace gsrt::detail
