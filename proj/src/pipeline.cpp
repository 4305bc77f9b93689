#include "refsynth/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <mutex>
#include <set>
#include <stdexcept>
#include <thread>
#include <unordered_set>

#include "refsynth/config.hpp"
#include "refsynth/io.hpp"
#include "refsynth/sampling.hpp"

namespace refsynth {

namespace fs = std::filesystem;
using nlohmann::json;

Image scale_depth(const std::string &category, const Image &normalized, const DepthCategoryTable &table)
{
    const auto it = table.find(category);
    if (it == table.end())
        throw std::invalid_argument("scale_depth: unknown category '" + category + "'");
    if (normalized.channels() != 1 || normalized.empty())
        throw std::invalid_argument("scale_depth: expected a non-empty single-channel raster");
    const double target = it->second;
    if (!(target > 0.0))
        throw std::invalid_argument("scale_depth: category mean depth must be > 0");
    double mean = 0.0;
    for (float v : normalized.data()) {
        if (!(v >= 0.0f && v <= 1.0f))
            throw std::invalid_argument("scale_depth: normalized depth must lie in [0,1]");
        mean += v;
    }
    mean /= static_cast<double>(normalized.size());
    const double gain = target / (mean + kNormalizedDepthOffset);
    Image out(normalized.width(), normalized.height(), 1);
    for (std::size_t i = 0; i < out.size(); ++i)
        out.data()[i] = static_cast<float>(gain * (normalized.data()[i] + kNormalizedDepthOffset));
    return out;
}

DepthCategoryTable load_depth_categories(const fs::path &path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open depth category table " + path.string());
    return json::parse(in).get<DepthCategoryTable>();
}

std::vector<std::pair<std::size_t, std::size_t>> sample_pairs(std::size_t front_count, std::size_t back_count,
                                                              std::uint64_t seed, std::size_t n)
{
    if (front_count == 0 || back_count == 0)
        throw std::invalid_argument("sample_pairs: image sets must be non-empty");
    const std::size_t total = front_count * back_count;
    if (total / back_count != front_count || n > total)
        throw std::invalid_argument("sample_pairs: more pairs requested than distinct combinations");

    std::uint64_t state = mix64(seed);
    auto next_below = [&](std::size_t bound) {
        // Rejection keeps the draw unbiased.
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t r;
        do {
            state += 0x9e3779b97f4a7c15ull;
            r = mix64(state);
        } while (r >= limit);
        return static_cast<std::size_t>(r % bound);
    };

    std::vector<std::size_t> picks;
    picks.reserve(n);
    if (2 * n >= total) {
        std::vector<std::size_t> all(total);
        for (std::size_t i = 0; i < total; ++i)
            all[i] = i;
        for (std::size_t i = 0; i < n; ++i)
            std::swap(all[i], all[i + next_below(total - i)]);
        picks.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(n));
    } else {
        std::unordered_set<std::size_t> seen;
        while (picks.size() < n) {
            const std::size_t k = next_below(total);
            if (seen.insert(k).second)
                picks.push_back(k);
        }
    }
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    pairs.reserve(n);
    for (std::size_t k : picks)
        pairs.emplace_back(k / back_count, k % back_count);
    return pairs;
}

DepthImage load_source(const DepthSource &source, const DepthCategoryTable &table, double default_hfov_deg)
{
    DepthImage img;
    img.rgb = load_srgb_color(source.rgb);
    img.hfov_deg = source.hfov_deg.value_or(default_hfov_deg);
    if (source.category) {
        Image normalized;
        if (source.depth.extension() == ".exr") {
            normalized = load_depth(source.depth, 1.0);
        } else {
            normalized = read_png(source.depth);
            if (normalized.channels() != 1)
                normalized = to_grayscale(normalized);
        }
        img.depth = scale_depth(*source.category, normalized, table);
    } else {
        img.depth = load_depth(source.depth, source.depth_scale);
    }
    img.validate();
    return img;
}

namespace {

DepthSource source_from_json(const json &j, const fs::path &base)
{
    DepthSource s;
    s.id = j.at("id").get<std::string>();
    s.rgb = base / j.at("rgb").get<std::string>();
    s.depth = base / j.at("depth").get<std::string>();
    if (j.contains("depth_scale"))
        s.depth_scale = j.at("depth_scale").get<double>();
    if (j.contains("hfov_deg"))
        s.hfov_deg = j.at("hfov_deg").get<double>();
    if (j.contains("category"))
        s.category = j.at("category").get<std::string>();
    return s;
}

json job_echo(const DatasetJob &job)
{
    json fronts = json::array(), backs = json::array();
    for (const auto &s : job.front_images)
        fronts.push_back(s.id);
    for (const auto &s : job.back_images)
        backs.push_back(s.id);
    return json{{"pair_seed", job.pair_seed},
                {"tuple_count", job.tuple_count},
                {"include_ttilde", job.include_ttilde},
                {"write_previews", job.write_previews},
                {"glass", job.scene.glass},
                {"lens", job.scene.lens},
                {"render", job.settings},
                {"scene", scene_params_to_json(job.scene)},
                {"depth_categories", job.depth_categories},
                {"front_images", fronts},
                {"back_images", backs}};
}

json file_to_json(const ManifestFile &f)
{
    return json{{"role", f.role}, {"path", f.path}, {"sha256", f.sha256}};
}

}  // namespace

DatasetJob job_from_json(const json &j, const fs::path &base_dir)
{
    static const std::set<std::string> known = {
        "output_dir", "tuple_count", "pair_seed", "include_ttilde", "write_previews", "parallel_tuples",
        "depth_categories", "front_images", "back_images", "glass", "lens", "render", "scene"};
    for (const auto &item : j.items())
        if (!known.contains(item.key()))
            throw std::invalid_argument("config: unknown key '" + item.key() + "'");

    DatasetJob job;
    job.output_dir = base_dir / j.at("output_dir").get<std::string>();
    job.tuple_count = j.at("tuple_count").get<std::size_t>();
    job.pair_seed = j.value("pair_seed", std::uint64_t{0});
    job.include_ttilde = j.value("include_ttilde", false);
    job.write_previews = j.value("write_previews", true);
    job.parallel_tuples = j.value("parallel_tuples", false);
    if (j.contains("depth_categories")) {
        const auto &dc = j.at("depth_categories");
        job.depth_categories = dc.is_string() ? load_depth_categories(base_dir / dc.get<std::string>())
                                              : dc.get<DepthCategoryTable>();
    }
    for (const auto &s : j.at("front_images"))
        job.front_images.push_back(source_from_json(s, base_dir));
    for (const auto &s : j.at("back_images"))
        job.back_images.push_back(source_from_json(s, base_dir));
    if (j.contains("glass"))
        job.scene.glass = j.at("glass").get<GlassSpec>();
    if (j.contains("lens"))
        job.scene.lens = j.at("lens").get<LensSpec>();
    if (j.contains("render"))
        job.settings = j.at("render").get<RenderSettings>();
    if (j.contains("scene"))
        scene_params_from_json(j.at("scene"), job.scene);
    return job;
}

DatasetJob load_job_config(const fs::path &path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open config " + path.string());
    const json j = json::parse(in);
    return job_from_json(j, path.parent_path());
}

json Manifest::to_json() const
{
    json tuples_json = json::array();
    for (const auto &t : tuples) {
        json files = json::array();
        for (const auto &f : t.files)
            files.push_back(file_to_json(f));
        tuples_json.push_back(json{{"index", t.index},
                                   {"front_id", t.front_id},
                                   {"back_id", t.back_id},
                                   {"seed", t.seed},
                                   {"status", t.status},
                                   {"error", t.error},
                                   {"rendered_this_run", t.rendered_this_run},
                                   {"timings", {{"render_seconds", t.render_seconds}}},
                                   {"files", files},
                                   {"physical", t.physical}});
    }
    return json{{"format", "refsynth-manifest"}, {"version", 1}, {"job", job}, {"tuples", tuples_json}};
}

Manifest Manifest::from_json(const json &j)
{
    if (j.value("format", "") != "refsynth-manifest")
        throw std::runtime_error("manifest: unrecognized format");
    Manifest m;
    m.job = j.at("job");
    for (const auto &t : j.at("tuples")) {
        TupleRecord r;
        r.index = t.at("index").get<std::size_t>();
        r.front_id = t.at("front_id").get<std::string>();
        r.back_id = t.at("back_id").get<std::string>();
        r.seed = t.at("seed").get<std::uint64_t>();
        r.status = t.at("status").get<std::string>();
        r.error = t.value("error", "");
        r.rendered_this_run = t.value("rendered_this_run", false);
        if (t.contains("timings"))
            r.render_seconds = t.at("timings").value("render_seconds", 0.0);
        for (const auto &f : t.at("files"))
            r.files.push_back({f.at("role").get<std::string>(), f.at("path").get<std::string>(),
                               f.at("sha256").get<std::string>()});
        r.physical = t.value("physical", json::object());
        m.tuples.push_back(std::move(r));
    }
    return m;
}

Manifest Manifest::load(const fs::path &path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open manifest " + path.string());
    return from_json(json::parse(in));
}

void Manifest::save(const fs::path &path) const
{
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out)
            throw std::runtime_error("cannot write manifest " + tmp.string());
        out << to_json().dump(2) << '\n';
    }
    fs::rename(tmp, path);
}

double preview_exposure(const std::vector<const Image *> &images)
{
    double reference = 0.0;
    for (const Image *img : images) {
        std::vector<double> lum;
        lum.reserve(static_cast<std::size_t>(img->width()) * img->height());
        for (int y = 0; y < img->height(); ++y)
            for (int x = 0; x < img->width(); ++x)
                lum.push_back(img->rgb(x, y).luminance());
        if (lum.empty())
            continue;
        const auto k = static_cast<std::size_t>(0.99 * static_cast<double>(lum.size() - 1));
        std::nth_element(lum.begin(), lum.begin() + static_cast<std::ptrdiff_t>(k), lum.end());
        reference = std::max(reference, lum[k]);
    }
    return reference > 1e-9 ? 1.0 / reference : 1.0;
}

Image tonemap_preview(const Image &linear, double exposure)
{
    Image out(linear.width(), linear.height(), linear.channels());
    for (std::size_t i = 0; i < out.size(); ++i)
        out.data()[i] = static_cast<float>(linear_to_srgb(linear.data()[i] * exposure));
    return out;
}

std::vector<ManifestFile> write_tuple_images(const ImageTuple &tuple, const fs::path &root, const fs::path &dir,
                                             bool write_previews)
{
    fs::create_directories(dir);
    std::vector<std::pair<std::string, const Image *>> images = {
        {"I", &tuple.I.radiance}, {"T", &tuple.T.radiance}, {"Rtilde", &tuple.Rtilde.radiance}, {"R", &tuple.R.radiance}};
    if (tuple.Ttilde)
        images.emplace_back("Ttilde", &tuple.Ttilde->radiance);

    std::vector<ManifestFile> files;
    for (const auto &[role, img] : images) {
        const fs::path p = dir / (role + ".exr");
        write_exr(p, *img);
        files.push_back({role, fs::relative(p, root).generic_string(), sha256_file(p)});
    }
    if (write_previews) {
        std::vector<const Image *> all;
        for (const auto &entry : images)
            all.push_back(entry.second);
        const double exposure = preview_exposure(all);
        for (const auto &[role, img] : images) {
            const fs::path p = dir / (role + ".png");
            write_png8(p, tonemap_preview(*img, exposure));
            files.push_back({"preview/" + role, fs::relative(p, root).generic_string(), sha256_file(p)});
        }
    }
    return files;
}

namespace {

bool outputs_verify(const TupleRecord &record, const fs::path &root)
{
    if (record.status != "ok" || record.files.empty())
        return false;
    for (const auto &f : record.files) {
        const fs::path p = root / f.path;
        if (!fs::is_regular_file(p) || sha256_file(p) != f.sha256)
            return false;
    }
    return true;
}

std::string tuple_dir_name(std::size_t index)
{
    char buf[32];
    std::snprintf(buf, sizeof(buf), "tuple_%04zu", index);
    return buf;
}

}  // namespace

Manifest run_dataset_job(const DatasetJob &job)
{
    job.settings.validate();
    const auto pairs = sample_pairs(job.front_images.size(), job.back_images.size(), job.pair_seed, job.tuple_count);
    fs::create_directories(job.output_dir);
    const fs::path manifest_path = job.output_dir / kManifestFileName;

    std::vector<TupleRecord> previous;
    if (fs::exists(manifest_path)) {
        try {
            previous = Manifest::load(manifest_path).tuples;
        } catch (const std::exception &) {
            previous.clear();  // unreadable manifest: render everything again
        }
    }

    Manifest manifest;
    manifest.job = job_echo(job);
    manifest.tuples.resize(pairs.size());
    std::mutex writer;

    auto run_tuple = [&](std::size_t index, int render_threads) {
        const auto [fi, bi] = pairs[index];
        TupleRecord record;
        record.index = index;
        record.front_id = job.front_images[fi].id;
        record.back_id = job.back_images[bi].id;
        record.seed = hash_combine(job.settings.seed, index);

        const TupleRecord *old = nullptr;
        for (const auto &p : previous)
            if (p.index == index)
                old = &p;
        if (old && old->front_id == record.front_id && old->back_id == record.back_id &&
            old->seed == record.seed && outputs_verify(*old, job.output_dir)) {
            record = *old;
            record.rendered_this_run = false;
        } else {
            const auto start = std::chrono::steady_clock::now();
            try {
                const double hfov = job.scene.lens.hfov_deg();
                const DepthImage front = load_source(job.front_images[fi], job.depth_categories, hfov);
                const DepthImage back = load_source(job.back_images[bi], job.depth_categories, hfov);
                const RenderScene scene(assemble_scene(front, back, job.scene));
                RenderSettings settings = job.settings;
                settings.seed = record.seed;
                settings.threads = render_threads;
                const ImageTuple tuple = render_tuple(scene, settings, job.include_ttilde);
                record.files = write_tuple_images(tuple, job.output_dir, job.output_dir / tuple_dir_name(index),
                                                  job.write_previews);
                record.physical = tuple.metadata;
                record.status = "ok";
            } catch (const std::exception &e) {
                record.status = "failed";
                record.error = e.what();
                record.files.clear();
            }
            record.rendered_this_run = true;
            record.render_seconds =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        }
        std::lock_guard lock(writer);
        manifest.tuples[index] = std::move(record);
        manifest.save(manifest_path);
    };

    if (job.parallel_tuples && pairs.size() > 1) {
        const int workers = static_cast<int>(std::min<std::size_t>(
            pairs.size(), std::max(1u, std::thread::hardware_concurrency())));
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < pairs.size(); i = next++)
                    run_tuple(i, 1);
            });
    } else {
        for (std::size_t i = 0; i < pairs.size(); ++i)
            run_tuple(i, job.settings.threads);
    }
    manifest.save(manifest_path);
    return manifest;
}

ManifestCheck validate_manifest(const fs::path &manifest_path)
{
    ManifestCheck check;
    Manifest manifest;
    try {
        manifest = Manifest::load(manifest_path);
    } catch (const std::exception &e) {
        check.problems.push_back(e.what());
        return check;
    }
    const fs::path root = manifest_path.parent_path();
    std::set<std::string> listed;
    for (const auto &t : manifest.tuples) {
        if (t.status != "ok")
            check.problems.push_back("tuple " + std::to_string(t.index) + " failed: " + t.error);
        for (const auto &f : t.files) {
            listed.insert(f.path);
            const fs::path p = root / f.path;
            if (!fs::is_regular_file(p))
                check.problems.push_back("missing file " + f.path);
            else if (sha256_file(p) != f.sha256)
                check.problems.push_back("digest mismatch for " + f.path);
        }
    }
    for (const auto &entry : fs::recursive_directory_iterator(root)) {
        if (!entry.is_regular_file())
            continue;
        const std::string rel = fs::relative(entry.path(), root).generic_string();
        if (entry.path() == manifest_path || rel == kManifestFileName)
            continue;
        if (!listed.contains(rel))
            check.problems.push_back("unlisted file " + rel);
    }
    return check;
}

}  // namespace refsynth
