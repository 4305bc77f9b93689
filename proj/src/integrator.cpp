#include "refsynth/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace refsynth {

void RenderSettings::validate() const
{
    if (spp < 1)
        throw std::invalid_argument("RenderSettings: spp must be >= 1");
    if (width < 16 || height < 16)
        throw std::invalid_argument("RenderSettings: resolution must be at least 16x16");
    if (max_path_depth < 1)
        throw std::invalid_argument("RenderSettings: max_path_depth must be >= 1");
    if (tile_size < 1)
        throw std::invalid_argument("RenderSettings: tile_size must be >= 1");
    if (threads < 0)
        throw std::invalid_argument("RenderSettings: threads must be >= 0");
}

ModeConfig mode_config(RenderMode mode)
{
    switch (mode) {
    case RenderMode::InputI:
        return {GlassMode::Real, SlabSide::Transmit, LensMode::ThinLens, true, true};
    case RenderMode::TransmissionGlassTtilde:
        return {GlassMode::Real, SlabSide::Transmit, LensMode::ThinLens, true, false};
    case RenderMode::ReflectionGlassRtilde:
        return {GlassMode::Real, SlabSide::Reflect, LensMode::ThinLens, false, true};
    case RenderMode::TransmissionT:
        return {GlassMode::Virtual, SlabSide::Transmit, LensMode::Pinhole, true, false};
    case RenderMode::ReflectionCleanR:
        return {GlassMode::Virtual, SlabSide::Reflect, LensMode::Pinhole, false, true};
    }
    throw std::invalid_argument("mode_config: unknown render mode");
}

std::string_view mode_name(RenderMode mode)
{
    switch (mode) {
    case RenderMode::InputI: return "I";
    case RenderMode::TransmissionT: return "T";
    case RenderMode::ReflectionGlassRtilde: return "Rtilde";
    case RenderMode::ReflectionCleanR: return "R";
    case RenderMode::TransmissionGlassTtilde: return "Ttilde";
    }
    return "?";
}

RenderCounters &RenderCounters::operator+=(const RenderCounters &o)
{
    camera_rays += o.camera_rays;
    aperture_samples += o.aperture_samples;
    fresnel_splits += o.fresnel_splits;
    attenuated_exits += o.attenuated_exits;
    virtual_glass_hits += o.virtual_glass_hits;
    surface_hits += o.surface_hits;
    return *this;
}

RenderScene::RenderScene(SceneDescription description)
    : description_(std::move(description)), front_(description_.front), back_(description_.back)
{}

std::optional<Hit> RenderScene::intersect(const Ray &ray, bool front_visible, bool back_visible,
                                          bool &hit_front) const
{
    std::optional<Hit> best;
    if (front_visible) {
        best = front_.intersect(ray);
        hit_front = best.has_value();
    }
    if (back_visible) {
        Ray limited = ray;
        if (best)
            limited.t_max = best->t;
        if (auto h = back_.intersect(limited); h && (!best || h->t < best->t)) {
            best = h;
            hit_front = false;
        }
    }
    return best;
}

namespace {

// Exit-ray scratch per recursion depth, reused across samples on a thread.
thread_local std::vector<SlabInteraction> t_slab_scratch;

}  // namespace

Color trace_path(const RenderScene &scene, const TraceOptions &options, const Ray &ray,
                 SampleStream &stream, int depth, RenderCounters *counters)
{
    if (depth >= options.max_path_depth)
        return {};
    const SceneDescription &desc = scene.description();
    const ModeConfig &mode = options.mode;

    bool hit_front = false;
    const std::optional<Hit> hit = scene.intersect(ray, mode.front_visible, mode.back_visible, hit_front);
    const double t_surface = hit ? hit->t : std::numeric_limits<double>::infinity();

    if (mode.glass != GlassMode::Absent) {
        const double t_glass = slab_entry_distance(ray, desc.glass);
        if (t_glass >= ray.t_min && t_glass < t_surface) {
            if (mode.glass == GlassMode::Virtual) {
                if (counters)
                    counters->virtual_glass_hits++;
                const SlabExit exit = interact_virtual_slab(ray, desc.glass, mode.virtual_side);
                return trace_path(scene, options, exit.ray, stream, depth + 1, counters);
            }
            if (t_slab_scratch.size() <= static_cast<std::size_t>(depth))
                t_slab_scratch.resize(static_cast<std::size_t>(options.max_path_depth) + 1);
            SlabInteraction &slab = t_slab_scratch[static_cast<std::size_t>(depth)];
            interact_slab(ray, desc.glass, desc.max_glass_orders, slab);
            if (counters) {
                counters->fresnel_splits++;
                counters->attenuated_exits += slab.exit_rays.size();
            }
            Color sum;
            for (std::size_t i = 0; i < slab.exit_rays.size(); ++i) {
                // Indexing keeps this valid if deeper levels touch the scratch vector.
                const SlabExit exit = t_slab_scratch[static_cast<std::size_t>(depth)].exit_rays[i];
                if (exit.weight.is_black())
                    continue;
                SampleStream branch = stream;
                sum += exit.weight * trace_path(scene, options, exit.ray, branch, depth + 1, counters);
            }
            return sum;
        }
    }

    if (!hit)
        return {};
    if (counters)
        counters->surface_hits++;
    const HeightfieldMesh &mesh = hit_front ? *desc.front : *desc.back;
    Color radiance = sample_texture(*mesh.texture, hit->uv);
    if (desc.surface_albedo > 0.0 && depth + 1 < options.max_path_depth) {
        Vec3 n = hit->normal;
        if (dot(n, ray.direction) > 0.0)
            n = -n;
        Ray next;
        next.direction = cosine_hemisphere(n, stream.next_2d());
        next.origin = hit->position + n * 1e-6;
        // Lambertian: f * cos / pdf reduces to the albedo.
        radiance += desc.surface_albedo * trace_path(scene, options, next, stream, depth + 1, counters);
    }
    return radiance;
}

RadianceImage render(const RenderScene &scene, RenderMode mode, const RenderSettings &settings)
{
    settings.validate();
    const SceneDescription &desc = scene.description();
    const Film film{settings.width, settings.height, desc.lens.hfov_deg()};
    TraceOptions options{mode_config(mode), settings.max_path_depth};
    LensSpec lens = desc.lens;
    lens.mode = options.mode.lens;
    lens.validate();

    RadianceImage out;
    out.radiance = Image(settings.width, settings.height, 3);
    out.sample_count.assign(static_cast<std::size_t>(settings.width) * settings.height,
                            static_cast<std::uint32_t>(settings.spp));

    const int tiles_x = (settings.width + settings.tile_size - 1) / settings.tile_size;
    const int tiles_y = (settings.height + settings.tile_size - 1) / settings.tile_size;
    const int tile_count = tiles_x * tiles_y;
    std::atomic<int> next_tile{0};
    std::mutex counters_mutex;

    auto worker = [&] {
        RenderCounters local;
        for (int tile = next_tile++; tile < tile_count; tile = next_tile++) {
            const int x0 = (tile % tiles_x) * settings.tile_size;
            const int y0 = (tile / tiles_x) * settings.tile_size;
            const int x1 = std::min(x0 + settings.tile_size, settings.width);
            const int y1 = std::min(y0 + settings.tile_size, settings.height);
            for (int y = y0; y < y1; ++y) {
                for (int x = x0; x < x1; ++x) {
                    const auto pixel = static_cast<std::uint64_t>(y) * settings.width + x;
                    double sum[3] = {0.0, 0.0, 0.0};
                    for (int s = 0; s < settings.spp; ++s) {
                        SampleStream stream(settings.seed, pixel, static_cast<std::uint64_t>(s), settings.sampler);
                        const Vec2 jitter = stream.next_2d();
                        const Vec2 lens_sample = stream.next_2d();
                        const Ray ray = generate_camera_ray(lens, {x + jitter.x, y + jitter.y}, film, lens_sample);
                        local.camera_rays++;
                        if (lens.mode == LensMode::ThinLens)
                            local.aperture_samples++;
                        const Color l = trace_path(scene, options, ray, stream, 0, &local);
                        sum[0] += l.r;
                        sum[1] += l.g;
                        sum[2] += l.b;
                    }
                    for (int c = 0; c < 3; ++c)
                        out.radiance.at(x, y, c) = static_cast<float>(sum[c] / settings.spp);
                }
            }
        }
        std::lock_guard lock(counters_mutex);
        out.counters += local;
    };

    int thread_count = settings.threads > 0 ? settings.threads
                                            : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    thread_count = std::min(thread_count, tile_count);
    std::vector<std::jthread> pool;
    for (int i = 1; i < thread_count; ++i)
        pool.emplace_back(worker);
    worker();
    pool.clear();
    return out;
}

ImageTuple render_tuple(const RenderScene &scene, const RenderSettings &settings, bool include_ttilde)
{
    ImageTuple tuple;
    tuple.I = render(scene, RenderMode::InputI, settings);
    tuple.T = render(scene, RenderMode::TransmissionT, settings);
    tuple.Rtilde = render(scene, RenderMode::ReflectionGlassRtilde, settings);
    tuple.R = render(scene, RenderMode::ReflectionCleanR, settings);
    if (include_ttilde)
        tuple.Ttilde = render(scene, RenderMode::TransmissionGlassTtilde, settings);
    const SceneDescription &desc = scene.description();
    tuple.metadata = {desc.glass, desc.lens, desc.camera, desc.back_scene_distance,
                      desc.max_glass_orders, desc.surface_albedo, settings};
    return tuple;
}

}  // namespace refsynth
