// Copyright Contributors to the gsrt Project
// SPDX-License-Identifier: Apache-2.0

#include "gsrt/tracer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gsrt {

namespace {

std::optional<GaussianHit> peak_response_impl(const Ray &ray, const Vec3 &mean,
                                              const Mat3 &precision, std::uint32_t index) {
    const Vec3 delta0 = ray.origin - mean;
    const Vec3 ad = precision * ray.direction;
    const double denom = ray.direction.dot(ad);
    double t = denom > 0.0 ? -delta0.dot(ad) / denom : ray.t_min;
    t = std::clamp(t, ray.t_min, ray.t_max);
    const Vec3 delta = delta0 + t * ray.direction;
    const double mahalanobis2 = delta.dot(precision * delta);
    const double response = std::exp(-0.5 * mahalanobis2);
    if (!(response >= kResponseEpsilon)) {
        return std::nullopt;
    }
    return GaussianHit{index, t, response};
}

double slack(double t) { return 1e-9 * (1.0 + std::abs(t)); }

// Sorted, bounded list of the nearest hits past a cursor.
class KBuffer {
public:
    explicit KBuffer(std::size_t capacity) : capacity_(capacity) { hits_.reserve(capacity); }

    bool full() const { return hits_.size() == capacity_; }
    const GaussianHit &back() const { return hits_.back(); }
    const std::vector<GaussianHit> &hits() const { return hits_; }
    void clear() { hits_.clear(); }

    void offer(const GaussianHit &hit) {
        if (full() && !hit_before(hit, hits_.back())) {
            return;
        }
        auto pos = std::upper_bound(hits_.begin(), hits_.end(), hit, hit_before);
        if (full()) {
            hits_.pop_back();
        }
        hits_.insert(pos, hit);
    }

private:
    std::size_t capacity_;
    std::vector<GaussianHit> hits_;
};

// One traversal pass: fills `buffer` with the nearest hits strictly after `cursor`.
void gather(const Ray &ray, const Bvh &bvh, const std::optional<GaussianHit> &cursor,
            KBuffer &buffer) {
    const auto &nodes = bvh.nodes();
    const auto &prims = bvh.primitives();
    const auto &order = bvh.primitive_order();

    const auto root_span = nodes[0].bounds.intersect(ray);
    if (!root_span) {
        return;
    }
    struct Entry {
        std::uint32_t node;
        double t_enter;
        double t_exit;
    };
    std::vector<Entry> stack;
    stack.reserve(64);
    stack.push_back({0, root_span->first, root_span->second});

    while (!stack.empty()) {
        const Entry e = stack.back();
        stack.pop_back();
        if (cursor && e.t_exit < cursor->t_peak - slack(cursor->t_peak)) {
            continue;
        }
        if (buffer.full() && e.t_enter > buffer.back().t_peak + slack(buffer.back().t_peak)) {
            continue;
        }
        const BvhNode &node = nodes[e.node];
        if (node.is_leaf()) {
            for (std::uint32_t i = node.first; i < node.first + node.count; ++i) {
                const std::uint32_t g = order[i];
                const auto hit = peak_response_impl(ray, prims[g].mean, prims[g].precision, g);
                if (!hit || (cursor && !hit_before(*cursor, *hit))) {
                    continue;
                }
                buffer.offer(*hit);
            }
            continue;
        }
        const std::uint32_t left = e.node + 1;
        const std::uint32_t right = node.right_child;
        const auto ls = nodes[left].bounds.intersect(ray);
        const auto rs = nodes[right].bounds.intersect(ray);
        // Nearer child is popped first.
        if (ls && rs) {
            if (ls->first <= rs->first) {
                stack.push_back({right, rs->first, rs->second});
                stack.push_back({left, ls->first, ls->second});
            } else {
                stack.push_back({left, ls->first, ls->second});
                stack.push_back({right, rs->first, rs->second});
            }
        } else if (ls) {
            stack.push_back({left, ls->first, ls->second});
        } else if (rs) {
            stack.push_back({right, rs->first, rs->second});
        }
    }
}

TraceResult trace_impl(const Ray &ray, const SceneSnapshot &snapshot, const Bvh &bvh,
                       const TraceOptions &options, TraceRecord *record) {
    Compositor compositor(snapshot, ray.direction, record);
    if (bvh.nodes().empty()) {
        return compositor.finish(options.background);
    }
    KBuffer buffer(static_cast<std::size_t>(std::max(options.k, 1)));
    std::optional<GaussianHit> cursor;
    bool done = false;
    while (!done) {
        buffer.clear();
        gather(ray, bvh, cursor, buffer);
        for (const auto &hit : buffer.hits()) {
            if (!compositor.add(hit)) {
                done = true;
                break;
            }
        }
        if (!buffer.full()) {
            done = true;
        } else {
            cursor = buffer.back();
        }
    }
    return compositor.finish(options.background);
}

} // namespace

std::optional<GaussianHit> gaussian_peak_response(const Ray &ray, const Gaussian &g,
                                                  std::uint32_t index) {
    return peak_response_impl(ray, g.mean, precision_from_params(g.rotation, g.scale), index);
}

std::optional<GaussianHit> peak_response(const Ray &ray, const BvhPrimitive &prim,
                                         std::uint32_t index) {
    return peak_response_impl(ray, prim.mean, prim.precision, index);
}

bool Compositor::add(const GaussianHit &hit) {
    if (saturated()) {
        return false;
    }
    const Gaussian &g = snapshot_.gaussians[hit.gaussian_index];
    const double raw_alpha = g.opacity * hit.response;
    const double alpha = std::min(raw_alpha, kAlphaMax);
    const ShColor color = sh_eval_color_detail(g.sh, view_dir_);
    if (record_ != nullptr) {
        record_->hits.push_back(
            {hit, alpha, raw_alpha > kAlphaMax, transmittance_, color.color, color.unclamped});
    }
    radiance_ += (transmittance_ * alpha) * color.color;
    transmittance_ *= 1.0 - alpha;
    return !saturated();
}

TraceResult Compositor::finish(const Rgb &background) const {
    TraceResult out;
    out.radiance = radiance_ + transmittance_ * background;
    out.transmittance = transmittance_;
    if (record_ != nullptr) {
        record_->result = out;
    }
    return out;
}

TraceResult trace_ray(const Ray &ray, const SceneSnapshot &snapshot, const Bvh &bvh,
                      const TraceOptions &options) {
    return trace_impl(ray, snapshot, bvh, options, nullptr);
}

TraceRecord trace_ray_recorded(const Ray &ray, const SceneSnapshot &snapshot, const Bvh &bvh,
                               const TraceOptions &options) {
    TraceRecord record;
    trace_impl(ray, snapshot, bvh, options, &record);
    return record;
}

std::vector<GaussianHit> collect_hits(const Ray &ray, const Bvh &bvh) {
    std::vector<GaussianHit> hits;
    if (bvh.nodes().empty()) {
        return hits;
    }
    const auto &nodes = bvh.nodes();
    std::vector<std::uint32_t> stack{0};
    while (!stack.empty()) {
        const std::uint32_t n = stack.back();
        stack.pop_back();
        if (!nodes[n].bounds.intersect(ray)) {
            continue;
        }
        if (nodes[n].is_leaf()) {
            for (std::uint32_t i = nodes[n].first; i < nodes[n].first + nodes[n].count; ++i) {
                const std::uint32_t g = bvh.primitive_order()[i];
                if (const auto hit = peak_response(ray, bvh.primitives()[g], g)) {
                    hits.push_back(*hit);
                }
            }
        } else {
            stack.push_back(nodes[n].right_child);
            stack.push_back(n + 1);
        }
    }
    std::sort(hits.begin(), hits.end(), hit_before);
    return hits;
}

} // namespace gsrt
