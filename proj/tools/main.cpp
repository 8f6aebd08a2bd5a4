// Copyright Contributors to the gsrt Project
// SPDX-License-Identifier: Apache-2.0

#include "gsrt/config_io.hpp"
#include "gsrt/error.hpp"
#include "gsrt/fitter.hpp"
#include "gsrt/image.hpp"
#include "gsrt/metrics.hpp"
#include "gsrt/parallel.hpp"
#include "gsrt/render.hpp"
#include "gsrt/scene_io.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;

struct RenderFlags {
    std::string scene;
    std::string camera;
    int spp = 0;
    int k = gsrt::kDefaultKBuffer;
    int threads = 1;
    int tile = 16;
    std::vector<double> bg{0.0, 0.0, 0.0};
};

void add_render_flags(CLI::App *cmd, RenderFlags &f) {
    cmd->add_option("--scene", f.scene, "Scene JSON")->required();
    cmd->add_option("--camera", f.camera, "Camera JSON")->required();
    cmd->add_option("--spp", f.spp, "Depth-of-field samples per pixel (overrides the camera)");
    cmd->add_option("--k", f.k, "k-buffer size");
    cmd->add_option("--threads", f.threads, "Worker threads");
    cmd->add_option("--tile", f.tile, "Tile edge in pixels");
    cmd->add_option("--bg", f.bg, "Background color r,g,b")->delimiter(',')->expected(3);
}

gsrt::RenderSettings settings_from(const RenderFlags &f) {
    gsrt::RenderSettings s;
    s.k = f.k;
    s.threads = f.threads;
    s.tile_size = f.tile;
    s.background = gsrt::Rgb(f.bg[0], f.bg[1], f.bg[2]);
    if (f.spp != 0) {
        s.samples_per_pixel = f.spp;
    }
    s.validate();
    return s;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void print_metric(const char *name, double v) {
    if (std::isinf(v)) {
        std::printf("%s=inf\n", name);
    } else {
        std::printf("%s=%.10g\n", name, v);
    }
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Ray tracer for deformable 3D gaussians"};
    app.require_subcommand(1);

    RenderFlags render_flags;
    double time = 0.0;
    std::string out;
    auto *render = app.add_subcommand("render", "Render one frame to PPM");
    add_render_flags(render, render_flags);
    render->add_option("--time", time, "Normalized scene time in [0, 1]");
    render->add_option("--out", out, "Output PPM")->required();

    RenderFlags seq_flags;
    double t0 = 0.0, t1 = 1.0;
    int frames = 1;
    std::string out_dir;
    bool parallel_frames = false;
    auto *sequence = app.add_subcommand("sequence", "Render frame_%05d.ppm over a time range");
    add_render_flags(sequence, seq_flags);
    sequence->add_option("--t0", t0, "First frame time")->required();
    sequence->add_option("--t1", t1, "Last frame time")->required();
    sequence->add_option("--frames", frames, "Frame count")->required();
    sequence->add_option("--out-dir", out_dir, "Output directory")->required();
    sequence->add_flag("--parallel-frames", parallel_frames,
                       "Render frames concurrently, one thread each");

    std::string img_a, img_b, metric_name = "both";
    double mask_diameter = 0.0;
    auto *metrics = app.add_subcommand("metrics", "Compare two PPM images");
    metrics->add_option("--a", img_a, "First image")->required();
    metrics->add_option("--b", img_b, "Second image")->required();
    metrics->add_option("--mask-diameter", mask_diameter, "Circular mask diameter in pixels");
    metrics->add_option("--metric", metric_name, "psnr, ssim or both")
        ->check(CLI::IsMember({"psnr", "ssim", "both"}));

    std::string fit_scene, fit_refs, fit_config, fit_out, fit_trace;
    auto *fitcmd = app.add_subcommand("fit", "Fit gaussians to reference images");
    fitcmd->add_option("--scene", fit_scene, "Initial scene JSON")->required();
    fitcmd->add_option("--refs", fit_refs, "References JSON")->required();
    fitcmd->add_option("--config", fit_config, "Fit config JSON");
    fitcmd->add_option("--out", fit_out, "Fitted scene JSON")->required();
    fitcmd->add_option("--trace", fit_trace, "Loss trace CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return kExitInput;
    }

    try {
        if (*render) {
            gsrt::RenderJob job;
            job.scene_path = render_flags.scene;
            job.camera_path = render_flags.camera;
            job.output = out;
            job.t0 = job.t1 = time;
            job.settings = settings_from(render_flags);
            const auto start = std::chrono::steady_clock::now();
            const gsrt::ImageBuffer img = gsrt::render_job_frame(job, time);
            gsrt::save_image(img, job.output);
            std::fprintf(stderr, "frame 0: %.3f s\n", seconds_since(start));
        } else if (*sequence) {
            gsrt::RenderJob job;
            job.scene_path = seq_flags.scene;
            job.camera_path = seq_flags.camera;
            job.output = out_dir;
            job.t0 = t0;
            job.t1 = t1;
            job.frames = frames;
            job.settings = settings_from(seq_flags);
            job.validate();
            const gsrt::Scene scene = gsrt::load_scene(job.scene_path);
            const gsrt::Camera camera = gsrt::load_camera(job.camera_path);
            std::error_code ec;
            fs::create_directories(job.output, ec);
            if (ec) {
                throw gsrt::IoError("cannot create " + job.output.string() + ": " + ec.message());
            }
            auto render_one = [&](std::size_t i, const gsrt::RenderSettings &settings) {
                const auto start = std::chrono::steady_clock::now();
                const double t = job.frame_time(static_cast<int>(i));
                const gsrt::ImageBuffer img = gsrt::render_frame(scene, camera, settings, t);
                gsrt::save_image(img, job.output / gsrt::frame_filename(static_cast<int>(i)));
                std::fprintf(stderr, "frame %zu (t=%.6g): %.3f s\n", i, t, seconds_since(start));
            };
            if (parallel_frames) {
                gsrt::RenderSettings single = job.settings;
                single.threads = 1;
                gsrt::parallel_for(static_cast<std::size_t>(frames), job.settings.threads,
                                   [&](std::size_t i) { render_one(i, single); });
            } else {
                for (int i = 0; i < frames; ++i) {
                    render_one(static_cast<std::size_t>(i), job.settings);
                }
            }
        } else if (*metrics) {
            const gsrt::ImageBuffer a = gsrt::load_image(img_a);
            const gsrt::ImageBuffer b = gsrt::load_image(img_b);
            const bool masked = mask_diameter > 0.0;
            if (metric_name != "ssim") {
                print_metric("psnr", masked ? gsrt::masked_metric(a, b, mask_diameter,
                                                                  gsrt::Metric::Psnr)
                                            : gsrt::psnr(a, b));
            }
            if (metric_name != "psnr") {
                print_metric("ssim", masked ? gsrt::masked_metric(a, b, mask_diameter,
                                                                  gsrt::Metric::Ssim)
                                            : gsrt::ssim(a, b));
            }
        } else if (*fitcmd) {
            const gsrt::Scene initial = gsrt::load_scene(fit_scene);
            const auto refs = gsrt::load_references(fit_refs);
            const gsrt::FitConfig config =
                fit_config.empty() ? gsrt::FitConfig{} : gsrt::load_fit_config(fit_config);
            const auto start = std::chrono::steady_clock::now();
            const gsrt::FitResult result = gsrt::fit(initial, refs, config);
            gsrt::save_scene(result.scene, fit_out);
            if (!fit_trace.empty()) {
                std::ofstream trace(fit_trace, std::ios::binary);
                trace << gsrt::format_trace_csv(result.trace);
                if (!trace) {
                    throw gsrt::IoError("cannot write " + fit_trace);
                }
            }
            std::fprintf(stderr, "fit: %zu iterations, %.3f s\n", result.trace.size(),
                         seconds_since(start));
        }
    } catch (const gsrt::NumericalError &e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitNumerical;
    } catch (const gsrt::InputError &e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitInput;
    } catch (const gsrt::Error &e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitInput;
    }
    return 0;
}
