// Copyright Contributors to the gsrt Project
// SPDX-License-Identifier: Apache-2.0

#include "gsrt/bvh.hpp"
#include "gsrt/camera.hpp"
#include "gsrt/deformation.hpp"
#include "gsrt/render.hpp"
#include "gsrt/tracer.hpp"

#include <benchmark/benchmark.h>

#include <random>

namespace {

using namespace gsrt;

SceneSnapshot random_scene(std::size_t count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> pos(-1, 1), scale(0.02, 0.15), op(0.1, 0.9), sh(-0.5, 0.5);
    std::normal_distribution<double> n(0, 1);
    SceneSnapshot s;
    s.sh_degree = 1;
    for (std::size_t i = 0; i < count; ++i) {
        Gaussian g;
        g.mean = Vec3(pos(rng), pos(rng), pos(rng));
        g.rotation = Quat(n(rng), n(rng), n(rng), n(rng)).normalized();
        g.scale = Vec3(scale(rng), scale(rng), scale(rng));
        g.opacity = op(rng);
        g.sh.resize(4);
        for (auto &c : g.sh) {
            c = Rgb(sh(rng), sh(rng), sh(rng));
        }
        s.gaussians.push_back(g);
    }
    return s;
}

Camera camera(int size) {
    Camera cam;
    cam.pose.position = Vec3(0, 0, 4);
    cam.sensor.width_px = size;
    cam.sensor.height_px = size;
    return cam;
}

void BM_TraceRay(benchmark::State &state) {
    const SceneSnapshot s = random_scene(static_cast<std::size_t>(state.range(0)), 1);
    const Bvh bvh = build_bvh(s);
    const Camera cam = camera(64);
    int i = 0;
    for (auto _ : state) {
        const Ray ray = pinhole_ray(cam.pose, cam.sensor, i % 64, (i / 64) % 64);
        benchmark::DoNotOptimize(trace_ray(ray, s, bvh));
        ++i;
    }
}
BENCHMARK(BM_TraceRay)->Arg(100)->Arg(1000)->Arg(10000);

void BM_BuildBvh(benchmark::State &state) {
    const SceneSnapshot s = random_scene(static_cast<std::size_t>(state.range(0)), 2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(build_bvh(s));
    }
}
BENCHMARK(BM_BuildBvh)->Arg(1000)->Arg(10000);

void BM_DeformKeyframes(benchmark::State &state) {
    const SceneSnapshot s = random_scene(static_cast<std::size_t>(state.range(0)), 3);
    KeyframeTrack track;
    track.times = {0.0, 0.5, 1.0};
    track.deltas.assign(3, std::vector<Residuals>(s.size()));
    for (auto &r : track.deltas[2]) {
        r.mean = Vec3(0.1, 0.0, 0.0);
    }
    const Deformation d = track;
    for (auto _ : state) {
        benchmark::DoNotOptimize(deform_snapshot(s, d, 0.7));
    }
}
BENCHMARK(BM_DeformKeyframes)->Arg(1000)->Arg(10000);

void BM_RollingFrame(benchmark::State &state) {
    Scene scene;
    scene.canonical = random_scene(1000, 4);
    KeyframeTrack track;
    track.times = {0.0, 1.0};
    track.deltas.assign(2, std::vector<Residuals>(scene.canonical.size()));
    for (auto &r : track.deltas[1]) {
        r.mean = Vec3(0.05, 0.0, 0.0);
    }
    scene.deformation = track;
    const Camera cam = camera(128);
    RollingShutterParams rs;
    rs.readout_time = 0.5;
    rs.chunk_rows = static_cast<int>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(render_rolling_frame(scene, cam.sensor, cam.pose, rs, {}));
    }
}
BENCHMARK(BM_RollingFrame)->Arg(1)->Arg(4)->Arg(16)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
