#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "refsynth/image.hpp"
#include "refsynth/integrator.hpp"
#include "refsynth/scene.hpp"

namespace refsynth {

/// Full-scale dataset shape: training and test tuple counts.
inline constexpr std::size_t kTrainTupleCount = 5000;
inline constexpr std::size_t kTestTupleCount = 200;

/// Category -> mean scene depth in meters.
using DepthCategoryTable = std::map<std::string, double>;

/// Offset added to normalized depth before rescaling, so that 0 maps to a positive distance.
inline constexpr double kNormalizedDepthOffset = 0.25;

/// Converts a normalized [0,1] relative-depth raster to meters whose mean equals the category's
/// table entry: depth = mean * (x + k) / (mean(x) + k) with k = kNormalizedDepthOffset.
/// Throws std::invalid_argument for an unknown category.
Image scale_depth(const std::string &category, const Image &normalized, const DepthCategoryTable &table);

DepthCategoryTable load_depth_categories(const std::filesystem::path &path);

/// Draws n distinct (front, back) index pairs, deterministic under `seed`. Throws when a set is
/// empty or n exceeds front_count * back_count.
std::vector<std::pair<std::size_t, std::size_t>> sample_pairs(std::size_t front_count, std::size_t back_count,
                                                              std::uint64_t seed, std::size_t n);

/// One RGB-D source. When `category` is set, `depth` holds normalized relative depth and is
/// rescaled with the category table; otherwise it is metric (PNG values times depth_scale, or EXR).
struct DepthSource {
    std::string id;
    std::filesystem::path rgb;
    std::filesystem::path depth;
    double depth_scale = 0.001;
    std::optional<double> hfov_deg;  // defaults to the lens field of view
    std::optional<std::string> category;
};

DepthImage load_source(const DepthSource &source, const DepthCategoryTable &table, double default_hfov_deg);

struct DatasetJob {
    std::vector<DepthSource> front_images;
    std::vector<DepthSource> back_images;
    std::uint64_t pair_seed = 0;
    std::filesystem::path output_dir;
    RenderSettings settings;
    SceneParams scene;
    std::size_t tuple_count = 0;
    bool include_ttilde = false;
    bool write_previews = true;
    bool parallel_tuples = false;
    DepthCategoryTable depth_categories;
};

/// Parses a job configuration file (JSON). Relative paths resolve against the file's directory.
DatasetJob load_job_config(const std::filesystem::path &path);
DatasetJob job_from_json(const nlohmann::json &j, const std::filesystem::path &base_dir);

struct ManifestFile {
    std::string role;  // I, T, Rtilde, R, Ttilde, or preview/<role>
    std::string path;  // relative to the job directory
    std::string sha256;
};

struct TupleRecord {
    std::size_t index = 0;
    std::string front_id;
    std::string back_id;
    std::uint64_t seed = 0;
    std::string status;  // "ok" or "failed"
    std::string error;
    bool rendered_this_run = false;
    double render_seconds = 0;
    std::vector<ManifestFile> files;
    nlohmann::json physical;  // glass, lens, camera, render settings, scene constants
};

struct Manifest {
    nlohmann::json job;
    std::vector<TupleRecord> tuples;

    nlohmann::json to_json() const;
    static Manifest from_json(const nlohmann::json &j);
    static Manifest load(const std::filesystem::path &path);
    void save(const std::filesystem::path &path) const;
};

inline constexpr const char *kManifestFileName = "manifest.json";

/// Renders every tuple of the job, writing EXR images (plus optional PNG previews) and
/// manifest.json under job.output_dir. Tuples whose recorded outputs still verify are reused.
/// Per-tuple failures are recorded and the job continues.
Manifest run_dataset_job(const DatasetJob &job);

/// Writes one tuple's images to `dir`; returns the file records (paths relative to `root`).
std::vector<ManifestFile> write_tuple_images(const ImageTuple &tuple, const std::filesystem::path &root,
                                             const std::filesystem::path &dir, bool write_previews);

/// Exposure shared by a tuple's previews: 1 / (largest 99th-percentile luminance).
double preview_exposure(const std::vector<const Image *> &images);
/// Scales by `exposure`, clips to [0,1] and sRGB-encodes.
Image tonemap_preview(const Image &linear, double exposure);

struct ManifestCheck {
    std::vector<std::string> problems;
    bool ok() const { return problems.empty(); }
};

/// Checks that every listed file exists with a matching digest and that every file under the
/// manifest's directory is listed.
ManifestCheck validate_manifest(const std::filesystem::path &manifest_path);

}  // namespace refsynth
