// Copyright Contributors to the gsrt Project
// SPDX-License-Identifier: Apache-2.0

#include "gsrt/bvh.hpp"

#include "gsrt/error.hpp"

#include <algorithm>
#include <numeric>

namespace gsrt {

std::optional<std::pair<double, double>> Aabb::intersect(const Ray &ray) const {
    double t0 = ray.t_min;
    double t1 = ray.t_max;
    for (int a = 0; a < 3; ++a) {
        const double o = ray.origin[a];
        const double d = ray.direction[a];
        if (d == 0.0) {
            if (o < lo[a] || o > hi[a]) {
                return std::nullopt;
            }
            continue;
        }
        const double inv = 1.0 / d;
        double tn = (lo[a] - o) * inv;
        double tf = (hi[a] - o) * inv;
        if (tn > tf) {
            std::swap(tn, tf);
        }
        t0 = std::max(t0, tn);
        t1 = std::min(t1, tf);
        if (t0 > t1) {
            return std::nullopt;
        }
    }
    return std::pair{t0, t1};
}

Aabb gaussian_bounds(const Gaussian &g) {
    Vec3 extent = axis_aligned_extent(g.rotation, g.scale, kBoxSigmas);
    // Padding for rounding in the response evaluation.
    extent = extent * (1.0 + 1e-9) + Vec3::Constant(1e-12);
    Aabb box;
    box.lo = g.mean - extent;
    box.hi = g.mean + extent;
    return box;
}

std::size_t Bvh::leaf_count() const {
    return static_cast<std::size_t>(
        std::count_if(nodes_.begin(), nodes_.end(), [](const BvhNode &n) { return n.is_leaf(); }));
}

std::uint32_t Bvh::build_range(std::uint32_t begin, std::uint32_t end,
                               const std::vector<Vec3> &centroids, const BvhOptions &options) {
    const auto node_index = static_cast<std::uint32_t>(nodes_.size());
    nodes_.emplace_back();

    Aabb bounds;
    Aabb centroid_bounds;
    for (std::uint32_t i = begin; i < end; ++i) {
        bounds.grow(prims_[order_[i]].bounds);
        centroid_bounds.grow(centroids[order_[i]]);
    }
    nodes_[node_index].bounds = bounds;

    const std::uint32_t count = end - begin;
    if (count <= options.max_leaf_size) {
        nodes_[node_index].first = begin;
        nodes_[node_index].count = count;
        return node_index;
    }

    int axis = 0;
    (centroid_bounds.hi - centroid_bounds.lo).maxCoeff(&axis);
    const std::uint32_t mid = begin + count / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                     [&](std::uint32_t a, std::uint32_t b) {
                         const double ca = centroids[a][axis];
                         const double cb = centroids[b][axis];
                         return ca < cb || (ca == cb && a < b);
                     });

    build_range(begin, mid, centroids, options);
    const std::uint32_t right = build_range(mid, end, centroids, options);
    nodes_[node_index].right_child = right;
    return node_index;
}

Bvh build_bvh(const SceneSnapshot &snapshot, BvhOptions options) {
    if (snapshot.gaussians.empty()) {
        throw InvalidParameter("cannot build a BVH over an empty snapshot");
    }
    options.max_leaf_size = std::max<std::uint32_t>(options.max_leaf_size, 1);

    Bvh bvh;
    const std::size_t n = snapshot.gaussians.size();
    bvh.prims_.reserve(n);
    std::vector<Vec3> centroids;
    centroids.reserve(n);
    for (const auto &g : snapshot.gaussians) {
        bvh.prims_.push_back({g.mean, precision_from_params(g.rotation, g.scale), gaussian_bounds(g)});
        centroids.push_back(g.mean);
    }
    bvh.order_.resize(n);
    std::iota(bvh.order_.begin(), bvh.order_.end(), 0u);
    bvh.nodes_.reserve(2 * n);
    bvh.build_range(0, static_cast<std::uint32_t>(n), centroids, options);
    return bvh;
}

} // namespace gsrt
