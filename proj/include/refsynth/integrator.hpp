#pragma once

#include <atomic>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "refsynth/bvh.hpp"
#include "refsynth/image.hpp"
#include "refsynth/optics.hpp"
#include "refsynth/sampling.hpp"
#include "refsynth/scene.hpp"

namespace refsynth {

struct RenderSettings {
    int spp = 256;
    int width = 256;
    int height = 256;
    int max_path_depth = 8;
    std::uint64_t seed = 0;
    int tile_size = 16;
    int threads = 0;  // 0: one per hardware thread
    SamplerKind sampler = SamplerKind::LowDiscrepancy;

    void validate() const;
};

enum class RenderMode {
    InputI,
    TransmissionT,
    ReflectionGlassRtilde,
    ReflectionCleanR,
    TransmissionGlassTtilde,
};

/// Glass, lens and visibility fixed by a render mode.
struct ModeConfig {
    GlassMode glass = GlassMode::Real;
    SlabSide virtual_side = SlabSide::Transmit;
    LensMode lens = LensMode::ThinLens;
    bool front_visible = true;
    bool back_visible = true;
};

ModeConfig mode_config(RenderMode mode);
/// Short file-friendly name: I, T, Rtilde, R, Ttilde.
std::string_view mode_name(RenderMode mode);

/// Instrumentation for mode contracts.
struct RenderCounters {
    std::uint64_t camera_rays = 0;
    std::uint64_t aperture_samples = 0;
    std::uint64_t fresnel_splits = 0;
    std::uint64_t attenuated_exits = 0;
    std::uint64_t virtual_glass_hits = 0;
    std::uint64_t surface_hits = 0;

    RenderCounters &operator+=(const RenderCounters &o);
};

struct RadianceImage {
    Image radiance;  // W x H x 3 linear RGB
    std::vector<std::uint32_t> sample_count;
    RenderCounters counters;

    int width() const { return radiance.width(); }
    int height() const { return radiance.height(); }
};

/// Scene plus acceleration structures. Immutable; safe to share between render threads.
class RenderScene {
public:
    explicit RenderScene(SceneDescription description);

    const SceneDescription &description() const { return description_; }
    std::optional<Hit> intersect(const Ray &ray, bool front_visible, bool back_visible, bool &hit_front) const;

private:
    SceneDescription description_;
    Bvh front_;
    Bvh back_;
};

struct TraceOptions {
    ModeConfig mode;
    int max_path_depth = 8;
};

/// Radiance arriving along `ray`. Surfaces emit their texture and optionally reflect diffusely;
/// glass hits split into the slab's ghost series (Real) or a single warped ray (Virtual). Each
/// branch continues with a copy of `stream`. Escaped rays return black.
Color trace_path(const RenderScene &scene, const TraceOptions &options, const Ray &ray,
                 SampleStream &stream, int depth, RenderCounters *counters = nullptr);

/// Per-pixel average of spp path samples, tile-parallel. Sample streams are keyed by pixel and
/// sample index, so the result does not depend on the thread count.
RadianceImage render(const RenderScene &scene, RenderMode mode, const RenderSettings &settings);

struct TupleMetadata {
    GlassSpec glass;
    LensSpec lens;
    CameraPose camera;
    double back_scene_distance = 0;
    int max_glass_orders = 0;
    double surface_albedo = 0;
    RenderSettings settings;
};

struct ImageTuple {
    RadianceImage I;
    RadianceImage T;
    RadianceImage Rtilde;
    RadianceImage R;
    std::optional<RadianceImage> Ttilde;
    TupleMetadata metadata;
};

ImageTuple render_tuple(const RenderScene &scene, const RenderSettings &settings, bool include_ttilde);

}  // namespace refsynth
