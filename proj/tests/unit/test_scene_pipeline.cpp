#include <doctest.h>

#include <cmath>
#include <fstream>
#include <set>

#include "fixtures.hpp"
#include "refsynth/config.hpp"
#include "refsynth/io.hpp"
#include "refsynth/pipeline.hpp"

using namespace refsynth;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch_dir(const std::string &name)
{
    const fs::path p = fs::temp_directory_path() / ("refsynth_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

DepthSource write_source(const fs::path &dir, const std::string &id, const DepthImage &img)
{
    Image srgb(img.width(), img.height(), 3);
    for (std::size_t i = 0; i < srgb.size(); ++i)
        srgb.data()[i] = static_cast<float>(linear_to_srgb(img.rgb.data()[i]));
    DepthSource s;
    s.id = id;
    s.rgb = dir / (id + "_rgb.png");
    s.depth = dir / (id + "_depth.exr");
    s.hfov_deg = img.hfov_deg;
    write_png8(s.rgb, srgb);
    write_exr(s.depth, img.depth);
    return s;
}

DatasetJob small_job(const fs::path &root, std::size_t tuples)
{
    DatasetJob job;
    const fs::path src = root / "sources";
    fs::create_directories(src);
    job.front_images = {write_source(src, "front_a", fixtures::front_scene(32)),
                        write_source(src, "front_b", fixtures::front_scene(24))};
    job.back_images = {write_source(src, "back_a", fixtures::back_scene(32))};
    job.output_dir = root / "out";
    job.tuple_count = tuples;
    job.pair_seed = 3;
    job.write_previews = false;
    job.settings.width = job.settings.height = 16;
    job.settings.spp = 2;
    job.settings.threads = 1;
    job.settings.seed = 11;
    return job;
}

std::vector<fs::path> files_under(const fs::path &dir)
{
    std::vector<fs::path> out;
    for (const auto &e : fs::recursive_directory_iterator(dir))
        if (e.is_regular_file())
            out.push_back(fs::relative(e.path(), dir));
    std::sort(out.begin(), out.end());
    return out;
}

json without_timings(json manifest)
{
    for (auto &t : manifest.at("tuples")) {
        t.erase("timings");
        t.erase("rendered_this_run");
    }
    return manifest;
}

double spot_spread(const Image &img, Vec2 &centroid)
{
    double w = 0, sx = 0, sy = 0;
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x) {
            const double v = img.rgb(x, y).luminance();
            w += v;
            sx += v * (x + 0.5);
            sy += v * (y + 0.5);
        }
    centroid = {sx / w, sy / w};
    double m2 = 0;
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x) {
            const double dx = x + 0.5 - centroid.x, dy = y + 0.5 - centroid.y;
            m2 += img.rgb(x, y).luminance() * (dx * dx + dy * dy);
        }
    return std::sqrt(m2 / w);
}

}  // namespace

TEST_CASE("default scene parameters")
{
    const SceneParams p;
    CHECK(p.glass.distance_to_camera == 0.30);
    CHECK(p.glass.thickness == 0.010);
    CHECK(p.glass.ior == 1.6);
    CHECK(p.lens.focal_length == 0.055);
    CHECK(p.lens.aperture_radius == 0.00893);
    CHECK(p.back_scene_distance == 1.5);
}

TEST_CASE("assembled scene focuses on the front center and sits on both sides of the glass")
{
    const SceneDescription scene = fixtures::default_scene(48);
    const DepthImage front = fixtures::front_scene(48);
    CHECK(scene.lens.focus_distance == front.depth.at(24, 24));
    CHECK(std::abs(scene.lens.focus_distance - 2.0) < 0.02);
    const DepthImage plane = fixtures::constant_plane(16, 16, 2.0, Color(0.5), 50.0);
    CHECK(assemble_scene(plane, fixtures::back_scene(16), {}).lens.focus_distance == 2.0);
    CHECK(scene.glass.near_plane() == 0.30);
    CHECK_NOTHROW(scene.validate());
    for (const Vec3 &v : scene.front->vertices)
        CHECK(v.z > scene.glass.far_plane());
    for (const Vec3 &v : scene.back->vertices)
        CHECK(v.z < 0.0);
    CHECK(scene.camera.forward == Vec3(0, 0, 1));
}

TEST_CASE("back scene mirror image lands on its source pixel at the expected optical distance")
{
    const DepthImage back = fixtures::back_scene(20);
    SceneParams p;
    const SceneDescription scene = assemble_scene(fixtures::front_scene(20), back, p);
    const Pinhole pin{20, 20, back.hfov_deg};
    for (int j = 0; j < 20; ++j)
        for (int i = 0; i < 20; ++i) {
            const Vec3 v = scene.back->vertices[scene.back->vertex_index(i, j)];
            const Vec3 image(v.x, v.y, 2.0 * p.glass.near_plane() - v.z);
            const double d = back.depth.at(i, j);
            CHECK(image.z == doctest::Approx(d + p.back_scene_distance + 2.0 * 0.30).epsilon(1e-6));
            CHECK(-v.z == doctest::Approx(d + p.back_scene_distance).epsilon(1e-6));
            const Vec2 f = pin.project(image);
            CHECK(std::abs(f.x - (i + 0.5)) < 1e-6);
            CHECK(std::abs(f.y - (j + 0.5)) < 1e-6);
        }
}

TEST_CASE("mirrored back points blur like front points at the same optical distance")
{
    // A back point at distance d images at d + 0.6 m; a front marker at that depth must show the
    // same thin-lens blur.
    const int size = 128;
    const double hfov = fixtures::default_hfov() * 1.3;
    auto marker = [](double u, double v) {
        return (std::abs(u - 0.55) < 0.012 && std::abs(v - 0.45) < 0.012) ? Color(1.0) : Color(0.0);
    };
    const double optical = 4.0, d = optical - 1.5 - 0.6;
    const DepthImage front = fixtures::make_image(size, size, hfov, marker, [&](double, double) { return optical; });
    const DepthImage back = fixtures::make_image(size, size, hfov, marker, [&](double, double) { return d; });
    SceneParams p;
    p.glass.absorption = Color(0.0);
    p.max_glass_orders = 0;
    SceneDescription desc = assemble_scene(front, back, p);
    desc.lens.focus_distance = 0.5;
    const RenderScene scene(desc);
    RenderSettings s;
    s.width = s.height = 96;
    s.spp = 64;
    s.threads = 1;
    Vec2 cf, cb;
    const double front_blur = spot_spread(render(scene, RenderMode::TransmissionGlassTtilde, s).radiance, cf);
    const double back_blur = spot_spread(render(scene, RenderMode::ReflectionGlassRtilde, s).radiance, cb);
    INFO("front ", front_blur, " back ", back_blur);
    CHECK(front_blur > 1.5);
    CHECK(std::abs(back_blur - front_blur) / front_blur < 0.10);
    CHECK(std::abs(cf.x - cb.x) < 1.0);
    CHECK(std::abs(cf.y - cb.y) < 1.0);
}

TEST_CASE("a back scene shifted out of view is rejected")
{
    SceneParams p;
    p.back_offset = {50.0, 0.0, 0.0};
    CHECK_THROWS_AS(assemble_scene(fixtures::front_scene(16), fixtures::back_scene(16), p), std::invalid_argument);
    SceneParams q;
    q.glass.distance_to_camera = 5.0;  // glass beyond the front scene
    CHECK_THROWS_AS(assemble_scene(fixtures::front_scene(16), fixtures::back_scene(16), q), std::invalid_argument);
}

TEST_CASE("sample_pairs")
{
    const auto a = sample_pairs(10, 7, 42, 30);
    CHECK(a == sample_pairs(10, 7, 42, 30));
    CHECK(a != sample_pairs(10, 7, 43, 30));
    std::set<std::pair<std::size_t, std::size_t>> distinct(a.begin(), a.end());
    CHECK(distinct.size() == 30);
    for (auto [f, b] : a) {
        CHECK(f < 10);
        CHECK(b < 7);
    }
    const auto all = sample_pairs(4, 3, 1, 12);
    CHECK(std::set(all.begin(), all.end()).size() == 12);
    CHECK_THROWS_AS(sample_pairs(4, 3, 1, 13), std::invalid_argument);
    CHECK_THROWS_AS(sample_pairs(0, 3, 1, 1), std::invalid_argument);
    const auto big = sample_pairs(100, 80, 9, kTrainTupleCount);
    CHECK(std::set(big.begin(), big.end()).size() == kTrainTupleCount);
}

TEST_CASE("scale_depth")
{
    const DepthCategoryTable table = load_depth_categories(REFSYNTH_SOURCE_DIR "/data/depth_categories.json");
    fixtures::Rng rng(4);
    Image raster(40, 30, 1);
    for (auto &v : raster.data())
        v = static_cast<float>(rng.uniform());
    const Image meters = scale_depth("bedroom", raster, table);
    CHECK(std::abs(mean_value(meters) - 4.0) < 1e-3);
    for (int i = 0; i < 200; ++i) {
        const std::size_t a = rng.next_u64() % raster.size(), b = rng.next_u64() % raster.size();
        if (raster.data()[a] < raster.data()[b])
            CHECK(meters.data()[a] <= meters.data()[b]);
    }
    const Image flat = scale_depth("street", Image(8, 8, 1, 0.5f), table);
    for (float v : flat.data())
        CHECK(v == doctest::Approx(15.0).epsilon(1e-6));
    CHECK_THROWS_AS(scale_depth("cathedral", raster, table), std::invalid_argument);
    CHECK_THROWS_AS(scale_depth("bedroom", Image(4, 4, 1, 2.0f), table), std::invalid_argument);
}

TEST_CASE("full-scale job configurations")
{
    const DatasetJob train = load_job_config(REFSYNTH_SOURCE_DIR "/configs/full_train.json");
    const DatasetJob test = load_job_config(REFSYNTH_SOURCE_DIR "/configs/full_test.json");
    CHECK(train.tuple_count == kTrainTupleCount);
    CHECK(test.tuple_count == kTestTupleCount);
    CHECK(kTrainTupleCount == 5000);
    CHECK(kTestTupleCount == 200);
    CHECK(train.settings.spp == 256);
    CHECK(train.settings.width == 256);
    CHECK(train.scene.glass.ior == 1.6);
    CHECK(train.depth_categories.at("bedroom") == 4.0);
    CHECK(train.pair_seed != test.pair_seed);
}

TEST_CASE("config parsing rejects unknown keys")
{
    json j = json::parse(R"({"output_dir": "x", "tuple_count": 1, "front_images": [], "back_images": [],
                             "render": {"spp": 4, "resolution": [32, 16]}})");
    const DatasetJob job = job_from_json(j, "/tmp");
    CHECK(job.settings.spp == 4);
    CHECK(job.settings.width == 32);
    CHECK(job.settings.height == 16);
    j["render"]["sample_count"] = 3;
    CHECK_THROWS_AS(job_from_json(j, "/tmp"), std::invalid_argument);
    j["render"].erase("sample_count");
    j["glas"] = json::object();
    CHECK_THROWS_AS(job_from_json(j, "/tmp"), std::invalid_argument);

    const GlassSpec g = json{{"thickness", 0.02}, {"mode", "Virtual"}}.get<GlassSpec>();
    CHECK(g.thickness == 0.02);
    CHECK(g.mode == GlassMode::Virtual);
    CHECK(g.ior == 1.6);
    const json round = GlassSpec{};
    CHECK(round.get<GlassSpec>().absorption == GlassSpec{}.absorption);
}

TEST_CASE("dataset job writes four images per tuple and a complete manifest")
{
    const fs::path root = scratch_dir("job");
    const DatasetJob job = small_job(root, 2);
    const Manifest m = run_dataset_job(job);
    REQUIRE(m.tuples.size() == 2);
    for (const auto &t : m.tuples) {
        CHECK(t.status == "ok");
        CHECK(t.rendered_this_run);
        CHECK(t.files.size() == 4);
        CHECK(t.physical.at("glass").at("ior") == 1.6);
    }
    const auto files = files_under(job.output_dir);
    CHECK(files.size() == 9);
    CHECK(std::count_if(files.begin(), files.end(), [](const fs::path &p) { return p.extension() == ".exr"; }) == 8);
    CHECK(validate_manifest(job.output_dir / kManifestFileName).ok());

    // Stray and missing files are both reported.
    std::ofstream(job.output_dir / "stray.txt") << "x";
    CHECK_FALSE(validate_manifest(job.output_dir / kManifestFileName).ok());
    fs::remove(job.output_dir / "stray.txt");
    fs::remove(job.output_dir / m.tuples[0].files[1].path);
    const auto check = validate_manifest(job.output_dir / kManifestFileName);
    REQUIRE(check.problems.size() == 1);
    CHECK(check.problems[0].find("missing") != std::string::npos);
    fs::remove_all(root);
}

TEST_CASE("transmission-through-glass layer and previews add files")
{
    const fs::path root = scratch_dir("job_ttilde");
    DatasetJob job = small_job(root, 2);
    job.include_ttilde = true;
    run_dataset_job(job);
    CHECK(files_under(job.output_dir).size() == 11);
    job.output_dir = root / "out_previews";
    job.write_previews = true;
    const Manifest m = run_dataset_job(job);
    CHECK(m.tuples[0].files.size() == 10);
    CHECK(files_under(job.output_dir).size() == 21);
    CHECK(validate_manifest(job.output_dir / kManifestFileName).ok());
    fs::remove_all(root);
}

TEST_CASE("rerunning after deleting one output re-renders only that tuple")
{
    const fs::path root = scratch_dir("resume");
    const DatasetJob job = small_job(root, 2);
    const Manifest first = run_dataset_job(job);
    fs::remove(job.output_dir / first.tuples[1].files[2].path);
    const Manifest second = run_dataset_job(job);
    CHECK_FALSE(second.tuples[0].rendered_this_run);
    CHECK(second.tuples[1].rendered_this_run);
    for (std::size_t t = 0; t < 2; ++t)
        for (std::size_t f = 0; f < first.tuples[t].files.size(); ++f)
            CHECK(first.tuples[t].files[f].sha256 == second.tuples[t].files[f].sha256);
    const Manifest third = run_dataset_job(job);
    CHECK_FALSE(third.tuples[0].rendered_this_run);
    CHECK_FALSE(third.tuples[1].rendered_this_run);
    fs::remove_all(root);
}

TEST_CASE("identical jobs give identical manifests and digests")
{
    const fs::path root = scratch_dir("repro");
    DatasetJob a = small_job(root, 2);
    DatasetJob b = a;
    b.output_dir = root / "out_b";
    b.parallel_tuples = true;
    const Manifest ma = run_dataset_job(a);
    const Manifest mb = run_dataset_job(b);
    CHECK(without_timings(ma.to_json()) == without_timings(mb.to_json()));
    CHECK(ma.tuples[0].seed != ma.tuples[1].seed);
    const Manifest reloaded = Manifest::load(a.output_dir / kManifestFileName);
    CHECK(without_timings(reloaded.to_json()) == without_timings(ma.to_json()));
    fs::remove_all(root);
}

TEST_CASE("a failing tuple is recorded and the job continues")
{
    const fs::path root = scratch_dir("failure");
    DatasetJob job = small_job(root, 2);
    job.front_images[1].rgb = root / "does_not_exist.png";
    const Manifest m = run_dataset_job(job);
    int failed = 0, ok = 0;
    for (const auto &t : m.tuples) {
        if (t.status == "failed") {
            ++failed;
            CHECK_FALSE(t.error.empty());
            CHECK(t.files.empty());
        } else {
            ++ok;
        }
    }
    CHECK(failed == 1);
    CHECK(ok == 1);
    const auto check = validate_manifest(job.output_dir / kManifestFileName);
    CHECK(check.problems.size() == 1);
    fs::remove_all(root);
}

TEST_CASE("sources with normalized depth are rescaled by category")
{
    const fs::path root = scratch_dir("category");
    DepthSource s = write_source(root, "room", fixtures::front_scene(16));
    Image normalized(16, 16, 1);
    for (int y = 0; y < 16; ++y)
        for (int x = 0; x < 16; ++x)
            normalized.at(x, y) = static_cast<float>(x) / 15.0f;
    write_exr(s.depth, normalized);
    s.category = "bedroom";
    const DepthImage img = load_source(s, {{"bedroom", 4.0}}, 40.0);
    CHECK(mean_value(img.depth) == doctest::Approx(4.0).epsilon(1e-4));
    s.category = "attic";
    CHECK_THROWS_AS(load_source(s, {{"bedroom", 4.0}}, 40.0), std::invalid_argument);
    fs::remove_all(root);
}
