// refsynth: render reflection-removal tuples, run dataset jobs, check manifests, score images.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include "refsynth/config.hpp"
#include "refsynth/evaluation.hpp"
#include "refsynth/integrator.hpp"
#include "refsynth/io.hpp"
#include "refsynth/pipeline.hpp"
#include "refsynth/scene.hpp"

namespace fs = std::filesystem;
using namespace refsynth;

namespace {

struct RenderTupleArgs {
    std::string front, front_depth, back, back_depth, out, config, resolution = "256x256";
    int spp = 256;
    std::uint64_t seed = 0;
    bool include_ttilde = false;
    bool no_previews = false;
    double depth_scale = 0.001;
    double front_fov = 0, back_fov = 0;
    int threads = 0;
};

void parse_resolution(const std::string &text, RenderSettings &settings)
{
    const auto x = text.find_first_of("xX");
    if (x == std::string::npos)
        throw CLI::ValidationError("--res", "expected WxH");
    settings.width = std::stoi(text.substr(0, x));
    settings.height = std::stoi(text.substr(x + 1));
}

int render_tuple_command(const RenderTupleArgs &args)
{
    SceneParams params;
    RenderSettings settings;
    if (!args.config.empty()) {
        std::ifstream in(args.config);
        if (!in)
            throw std::runtime_error("cannot open " + args.config);
        const auto j = nlohmann::json::parse(in);
        if (j.contains("glass"))
            params.glass = j.at("glass").get<GlassSpec>();
        if (j.contains("lens"))
            params.lens = j.at("lens").get<LensSpec>();
        if (j.contains("render"))
            settings = j.at("render").get<RenderSettings>();
        if (j.contains("scene"))
            scene_params_from_json(j.at("scene"), params);
    }
    settings.spp = args.spp;
    settings.seed = args.seed;
    settings.threads = args.threads;
    parse_resolution(args.resolution, settings);

    const double lens_fov = params.lens.hfov_deg();
    const DepthImage front = load_depth_image(args.front, args.front_depth, args.depth_scale,
                                              args.front_fov > 0 ? args.front_fov : lens_fov);
    const DepthImage back = load_depth_image(args.back, args.back_depth, args.depth_scale,
                                             args.back_fov > 0 ? args.back_fov : lens_fov);

    const auto start = std::chrono::steady_clock::now();
    const RenderScene scene(assemble_scene(front, back, params));
    const ImageTuple tuple = render_tuple(scene, settings, args.include_ttilde);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    const fs::path out = args.out;
    fs::create_directories(out);
    Manifest manifest;
    manifest.job = {{"command", "render-tuple"},
                    {"front_images", {fs::path(args.front).filename().string()}},
                    {"back_images", {fs::path(args.back).filename().string()}}};
    TupleRecord record;
    record.front_id = fs::path(args.front).filename().string();
    record.back_id = fs::path(args.back).filename().string();
    record.seed = settings.seed;
    record.status = "ok";
    record.rendered_this_run = true;
    record.render_seconds = seconds;
    record.files = write_tuple_images(tuple, out, out, !args.no_previews);
    record.physical = tuple.metadata;
    manifest.tuples.push_back(record);
    manifest.save(out / kManifestFileName);
    std::printf("rendered %zu images to %s in %.1f s\n", record.files.size(), out.c_str(), seconds);
    return 0;
}

int render_dataset_command(const std::string &config)
{
    const DatasetJob job = load_job_config(config);
    const Manifest manifest = run_dataset_job(job);
    std::size_t rendered = 0, reused = 0, failed = 0;
    for (const auto &t : manifest.tuples) {
        if (t.status != "ok")
            ++failed;
        else if (t.rendered_this_run)
            ++rendered;
        else
            ++reused;
    }
    std::printf("tuples: %zu rendered, %zu reused, %zu failed\n", rendered, reused, failed);
    return failed == 0 ? 0 : 2;
}

int validate_command(const std::string &manifest)
{
    const ManifestCheck check = validate_manifest(manifest);
    for (const auto &p : check.problems)
        std::printf("problem: %s\n", p.c_str());
    std::printf("%s\n", check.ok() ? "manifest OK" : "manifest INVALID");
    return check.ok() ? 0 : 1;
}

int evaluate_command(const std::string &pred, const std::string &gt, const std::string &report_path,
                     const std::string &window)
{
    SsimOptions options;
    options.window = window == "uniform8" ? SsimWindow::Uniform8 : SsimWindow::Gaussian11;
    const MetricReport report = evaluate_directories(pred, gt, options);
    std::ofstream out(report_path, std::ios::trunc);
    if (!out)
        throw std::runtime_error("cannot write " + report_path);
    out << metric_report_to_json(report).dump(2) << '\n';
    std::printf("%zu images: mean PSNR %.3f dB, mean SSIM %.4f\n", report.images.size(), report.mean_psnr,
                report.mean_ssim);
    return 0;
}

}  // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Physically based reflection-removal tuple synthesis"};
    app.require_subcommand(1);

    RenderTupleArgs rt;
    auto *render_tuple_cmd = app.add_subcommand("render-tuple", "Render I, T, Rtilde, R for one image pair");
    render_tuple_cmd->add_option("--front", rt.front, "Front scene sRGB PNG")->required()->check(CLI::ExistingFile);
    render_tuple_cmd->add_option("--front-depth", rt.front_depth, "Front depth (16-bit PNG or float EXR)")
        ->required()->check(CLI::ExistingFile);
    render_tuple_cmd->add_option("--back", rt.back, "Back scene sRGB PNG")->required()->check(CLI::ExistingFile);
    render_tuple_cmd->add_option("--back-depth", rt.back_depth, "Back depth (16-bit PNG or float EXR)")
        ->required()->check(CLI::ExistingFile);
    render_tuple_cmd->add_option("--out", rt.out, "Output directory")->required();
    render_tuple_cmd->add_option("--spp", rt.spp, "Samples per pixel")->check(CLI::PositiveNumber);
    render_tuple_cmd->add_option("--seed", rt.seed, "Sampler seed");
    render_tuple_cmd->add_option("--res", rt.resolution, "Resolution WxH");
    render_tuple_cmd->add_flag("--include-ttilde", rt.include_ttilde, "Also render Ttilde");
    render_tuple_cmd->add_option("--depth-scale", rt.depth_scale, "Meters per 16-bit depth unit");
    render_tuple_cmd->add_option("--front-fov", rt.front_fov, "Front image horizontal fov (deg)");
    render_tuple_cmd->add_option("--back-fov", rt.back_fov, "Back image horizontal fov (deg)");
    render_tuple_cmd->add_option("--config", rt.config, "JSON with glass/lens/render/scene sections")
        ->check(CLI::ExistingFile);
    render_tuple_cmd->add_option("--threads", rt.threads, "Render threads (0: all)");
    render_tuple_cmd->add_flag("--no-previews", rt.no_previews, "Skip 8-bit PNG previews");

    std::string dataset_config;
    auto *dataset_cmd = app.add_subcommand("render-dataset", "Run a dataset job");
    dataset_cmd->add_option("--config", dataset_config, "Job configuration (JSON)")->required()->check(CLI::ExistingFile);

    std::string manifest_path;
    auto *validate_cmd = app.add_subcommand("validate", "Verify a manifest against the files on disk");
    validate_cmd->add_option("--manifest", manifest_path, "manifest.json")->required()->check(CLI::ExistingFile);

    std::string pred_dir, gt_dir, report_path, window = "gaussian11";
    auto *evaluate_cmd = app.add_subcommand("evaluate", "PSNR/SSIM of predictions against ground truth");
    evaluate_cmd->add_option("--pred", pred_dir, "Prediction directory")->required()->check(CLI::ExistingDirectory);
    evaluate_cmd->add_option("--gt", gt_dir, "Ground-truth directory")->required()->check(CLI::ExistingDirectory);
    evaluate_cmd->add_option("--report", report_path, "Report file (JSON)")->required();
    evaluate_cmd->add_option("--ssim-window", window, "gaussian11 or uniform8")
        ->check(CLI::IsMember({"gaussian11", "uniform8"}));

    CLI11_PARSE(app, argc, argv);

    try {
        if (*render_tuple_cmd)
            return render_tuple_command(rt);
        if (*dataset_cmd)
            return render_dataset_command(dataset_config);
        if (*validate_cmd)
            return validate_command(manifest_path);
        if (*evaluate_cmd)
            return evaluate_command(pred_dir, gt_dir, report_path, window);
    } catch (const std::exception &e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
