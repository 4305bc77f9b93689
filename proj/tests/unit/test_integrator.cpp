#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "refsynth/evaluation.hpp"
#include "refsynth/integrator.hpp"

using namespace refsynth;

namespace {

SceneParams lossless_single_order()
{
    SceneParams p;
    p.glass.absorption = Color(0.0);
    p.max_glass_orders = 0;
    return p;
}

// Emitting planes that overfill the film in every mode.
RenderScene flat_scene(const SceneParams &params, double front = 0.5, double back = 0.3)
{
    const double hfov = fixtures::default_hfov() * 1.5;
    return RenderScene(assemble_scene(fixtures::constant_plane(32, 32, 2.0, Color(front), hfov),
                                      fixtures::constant_plane(32, 32, 2.0, Color(back), hfov), params));
}

RenderSettings small(int size, int spp, std::uint64_t seed = 1)
{
    RenderSettings s;
    s.width = s.height = size;
    s.spp = spp;
    s.seed = seed;
    s.threads = 1;
    return s;
}

double mean_abs(const Image &img)
{
    double sum = 0;
    for (float v : img.data())
        sum += std::abs(v);
    return sum / static_cast<double>(img.data().size());
}

double mse(const Image &a, const Image &b)
{
    double sum = 0;
    for (std::size_t i = 0; i < a.data().size(); ++i) {
        const double d = a.data()[i] - b.data()[i];
        sum += d * d;
    }
    return sum / static_cast<double>(a.data().size());
}

}  // namespace

TEST_CASE("an emitting surface seen without glass returns its emission exactly")
{
    const RenderScene scene = flat_scene(SceneParams{});
    TraceOptions options;
    options.mode = {GlassMode::Absent, SlabSide::Transmit, LensMode::Pinhole, true, false};
    Ray ray;
    ray.direction = {0.0, 0.0, 1.0};
    SampleStream stream(0, 0, 0);
    RenderCounters counters;
    const Color c = trace_path(scene, options, ray, stream, 0, &counters);
    CHECK(c == Color(0.5));
    CHECK(counters.surface_hits == 1);
    CHECK(counters.fresnel_splits == 0);
    ray.direction = {0.0, 0.0, -1.0};
    CHECK(trace_path(scene, options, ray, stream, 0).is_black());
}

TEST_CASE("real glass transmits T^2 of the emission; virtual glass is lossless")
{
    const RenderScene scene = flat_scene(lossless_single_order());
    Ray ray;
    ray.direction = {0.0, 0.0, 1.0};
    SampleStream stream(0, 0, 0);
    TraceOptions real{mode_config(RenderMode::TransmissionGlassTtilde), 8};
    const double R = std::pow(0.6 / 2.6, 2);
    CHECK(trace_path(scene, real, ray, stream, 0).g == doctest::Approx(0.5 * (1 - R) * (1 - R)).epsilon(1e-12));
    CHECK(std::abs(trace_path(scene, real, ray, stream, 0).g - 0.89634 * 0.5) < 1e-4);
    TraceOptions virt{mode_config(RenderMode::TransmissionT), 8};
    CHECK(trace_path(scene, virt, ray, stream, 0) == Color(0.5));
    TraceOptions mirror{mode_config(RenderMode::ReflectionCleanR), 8};
    CHECK(trace_path(scene, mirror, ray, stream, 0) == Color(static_cast<double>(0.3f)));
}

TEST_CASE("path depth limit")
{
    const RenderScene scene = flat_scene(SceneParams{});
    Ray ray;
    ray.direction = {0.0, 0.0, 1.0};
    SampleStream stream(0, 0, 0);
    // The glass consumes one level, so depth 1 cannot reach the surface.
    CHECK(trace_path(scene, {mode_config(RenderMode::TransmissionT), 1}, ray, stream, 0).is_black());
    CHECK(trace_path(scene, {mode_config(RenderMode::TransmissionT), 2}, ray, stream, 0) == Color(0.5));
}

TEST_CASE("rendered images of constant emitters")
{
    const RenderScene scene = flat_scene(lossless_single_order());
    const auto t = render(scene, RenderMode::TransmissionT, small(24, 4));
    for (float v : t.radiance.data())
        CHECK(std::abs(v - 0.5f) < 1e-3);
    const auto r = render(scene, RenderMode::ReflectionCleanR, small(24, 4));
    for (float v : r.radiance.data())
        CHECK(std::abs(v - 0.3f) < 1e-3);
    const double T2 = std::pow(1.0 - std::pow(0.6 / 2.6, 2), 2);
    const auto tt = render(scene, RenderMode::TransmissionGlassTtilde, small(24, 4));
    for (float v : tt.radiance.data())
        CHECK(std::abs(v - 0.5 * T2) < 1e-3);
}

TEST_CASE("render output does not depend on thread count or tile size")
{
    const RenderScene scene(fixtures::default_scene(48));
    RenderSettings a = small(32, 4, 77);
    RenderSettings b = a;
    b.threads = 3;
    b.tile_size = 7;
    for (RenderMode mode : {RenderMode::InputI, RenderMode::ReflectionCleanR}) {
        const auto x = render(scene, mode, a);
        const auto y = render(scene, mode, b);
        CHECK(x.radiance == y.radiance);
        CHECK(x.counters.camera_rays == y.counters.camera_rays);
        CHECK(x.counters.fresnel_splits == y.counters.fresnel_splits);
    }
    RenderSettings c = a;
    c.seed = 78;
    CHECK_FALSE(render(scene, RenderMode::InputI, a).radiance == render(scene, RenderMode::InputI, c).radiance);
}

TEST_CASE("input image is the sum of the glass transmission and reflection layers")
{
    const RenderScene scene(fixtures::default_scene(48));
    const auto tuple = render_tuple(scene, small(24, 8), true);
    REQUIRE(tuple.Ttilde.has_value());
    Image diff(24, 24, 3);
    for (std::size_t i = 0; i < diff.data().size(); ++i)
        diff.data()[i] = tuple.I.radiance.data()[i] - tuple.Ttilde->radiance.data()[i] - tuple.Rtilde.radiance.data()[i];
    CHECK(mean_abs(diff) / mean_abs(tuple.I.radiance) < 1e-5);
}

TEST_CASE("render modes honor their glass and lens contracts")
{
    const RenderScene scene(fixtures::default_scene(48));
    const RenderSettings s = small(16, 2);
    const auto pixels = static_cast<std::uint64_t>(16 * 16 * 2);

    const auto r = render(scene, RenderMode::ReflectionCleanR, s).counters;
    CHECK(r.camera_rays == pixels);
    CHECK(r.fresnel_splits == 0);
    CHECK(r.attenuated_exits == 0);
    CHECK(r.aperture_samples == 0);
    CHECK(r.virtual_glass_hits == pixels);

    const auto t = render(scene, RenderMode::TransmissionT, s).counters;
    CHECK(t.fresnel_splits == 0);
    CHECK(t.aperture_samples == 0);
    CHECK(t.virtual_glass_hits == pixels);

    for (RenderMode mode : {RenderMode::InputI, RenderMode::ReflectionGlassRtilde, RenderMode::TransmissionGlassTtilde}) {
        const auto c = render(scene, mode, s).counters;
        CHECK(c.aperture_samples == pixels);
        CHECK(c.fresnel_splits >= pixels);
        CHECK(c.attenuated_exits == c.fresnel_splits * (2 * kDefaultMaxOrders + 2));
        CHECK(c.virtual_glass_hits == 0);
    }
}

TEST_CASE("radiance is finite and non-negative")
{
    SceneParams p;
    p.surface_albedo = 0.6;
    const RenderScene scene(assemble_scene(fixtures::front_scene(40), fixtures::back_scene(40), p));
    const auto tuple = render_tuple(scene, small(20, 4), true);
    for (const RadianceImage *img : {&tuple.I, &tuple.T, &tuple.Rtilde, &tuple.R, &*tuple.Ttilde})
        for (float v : img->radiance.data()) {
            CHECK(std::isfinite(v));
            CHECK(v >= 0.0f);
        }
}

TEST_CASE("diffuse interreflection adds energy")
{
    SceneParams p;
    const RenderScene plain(assemble_scene(fixtures::front_scene(40), fixtures::back_scene(40), p));
    p.surface_albedo = 0.5;
    const RenderScene bouncy(assemble_scene(fixtures::front_scene(40), fixtures::back_scene(40), p));
    const double a = mean_value(render(plain, RenderMode::TransmissionT, small(16, 8)).radiance);
    const double b = mean_value(render(bouncy, RenderMode::TransmissionT, small(16, 8)).radiance);
    CHECK(b > a);
}

TEST_CASE("Monte Carlo error falls as 1/N")
{
    const RenderScene scene(fixtures::default_scene(64));
    RenderSettings ref = small(16, 4096, 1000);
    const Image reference = render(scene, RenderMode::InputI, ref).radiance;

    auto error_at = [&](int spp, SamplerKind kind) {
        double sum = 0;
        for (std::uint64_t seed = 0; seed < 6; ++seed) {
            RenderSettings s = small(16, spp, seed);
            s.sampler = kind;
            sum += mse(render(scene, RenderMode::InputI, s).radiance, reference);
        }
        return sum;
    };
    const double independent = error_at(64, SamplerKind::Independent) / error_at(16, SamplerKind::Independent);
    CHECK(independent == doctest::Approx(0.25).epsilon(0.3));
    const double ld = error_at(64, SamplerKind::LowDiscrepancy) / error_at(16, SamplerKind::LowDiscrepancy);
    CHECK(ld <= 0.25 * 1.3);
}

TEST_CASE("glass blurs and dims the reflection layer")
{
    const RenderScene scene(fixtures::default_scene(64));
    const RenderSettings s = small(32, 32);
    const Image r = render(scene, RenderMode::ReflectionCleanR, s).radiance;
    const Image rt = render(scene, RenderMode::ReflectionGlassRtilde, s).radiance;
    CHECK(oracles::gradient_energy(r) >= oracles::gradient_energy(rt));
    CHECK(mean_value(rt) < mean_value(r));
}

TEST_CASE("render settings validation")
{
    const RenderScene scene = flat_scene(SceneParams{});
    RenderSettings s = small(8, 1);
    CHECK_THROWS_AS(render(scene, RenderMode::InputI, s), std::invalid_argument);
    s = small(16, 0);
    CHECK_THROWS_AS(render(scene, RenderMode::InputI, s), std::invalid_argument);
    CHECK(mode_name(RenderMode::ReflectionGlassRtilde) == "Rtilde");
    CHECK(mode_name(RenderMode::TransmissionGlassTtilde) == "Ttilde");
}
