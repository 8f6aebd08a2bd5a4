// Copyright Contributors to the gsrt Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "gsrt/gaussian.hpp"
#include "gsrt/ray.hpp"

#include <cmath>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace gsrt {

/// Hits whose peak response falls below this are dropped.
inline constexpr double kResponseEpsilon = 0.01 / 255.0;

/// Half-width of the per-gaussian box in standard deviations. Chosen so the
/// box encloses every point whose response reaches kResponseEpsilon.
inline const double kBoxSigmas = std::sqrt(2.0 * std::log(1.0 / kResponseEpsilon));

struct Aabb {
    Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
    Vec3 hi = Vec3::Constant(-std::numeric_limits<double>::infinity());

    void grow(const Aabb &other) {
        lo = lo.cwiseMin(other.lo);
        hi = hi.cwiseMax(other.hi);
    }
    void grow(const Vec3 &p) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    bool contains(const Aabb &other) const {
        return (lo.array() <= other.lo.array()).all() && (hi.array() >= other.hi.array()).all();
    }
    /// Parametric overlap [t0, t1] of the ray segment with the box.
    std::optional<std::pair<double, double>> intersect(const Ray &ray) const;
};

/// Geometry of one gaussian cached for intersection.
struct BvhPrimitive {
    Vec3 mean;
    Mat3 precision; // Sigma^-1
    Aabb bounds;
};

struct BvhNode {
    Aabb bounds;
    std::uint32_t first = 0;       // leaf: offset into primitive_order()
    std::uint32_t count = 0;       // > 0 for leaves
    std::uint32_t right_child = 0; // interior: left child is the next node
    bool is_leaf() const { return count > 0; }
};

struct BvhOptions {
    std::uint32_t max_leaf_size = 1;
};

/// Median-split bounding volume hierarchy over per-gaussian boxes. Nodes are
/// stored depth first; node 0 is the root.
class Bvh {
public:
    const std::vector<BvhNode> &nodes() const { return nodes_; }
    const std::vector<std::uint32_t> &primitive_order() const { return order_; }
    const std::vector<BvhPrimitive> &primitives() const { return prims_; }
    std::size_t leaf_count() const;

private:
    friend Bvh build_bvh(const SceneSnapshot &, BvhOptions);
    std::uint32_t build_range(std::uint32_t begin, std::uint32_t end,
                              const std::vector<Vec3> &centroids, const BvhOptions &options);

    std::vector<BvhNode> nodes_;
    std::vector<std::uint32_t> order_;
    std::vector<BvhPrimitive> prims_;
};

/// Box of one gaussian: mean +- kBoxSigmas * sqrt(diag(Sigma)).
Aabb gaussian_bounds(const Gaussian &g);

Bvh build_bvh(const SceneSnapshot &snapshot, BvhOptions options = {});

} // namespace gsrt
