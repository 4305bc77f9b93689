#include "refsynth/config.hpp"

#include <cmath>
#include <set>
#include <stdexcept>
#include <string>

namespace refsynth {

using nlohmann::json;

namespace {

void reject_unknown(const json &j, const std::set<std::string> &known, const char *section)
{
    if (!j.is_object())
        throw std::invalid_argument(std::string("config: section '") + section + "' must be an object");
    for (const auto &item : j.items())
        if (!known.contains(item.key()))
            throw std::invalid_argument(std::string("config: unknown key '") + item.key() + "' in " + section);
}

template <typename T>
void read_if(const json &j, const char *key, T &value)
{
    if (j.contains(key))
        value = j.at(key).get<T>();
}

json color_to_json(const Color &c) { return json::array({c.r, c.g, c.b}); }

Color color_from_json(const json &j)
{
    if (j.is_number())
        return Color(j.get<double>());
    if (!j.is_array() || j.size() != 3)
        throw std::invalid_argument("config: expected a number or a 3-element array");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

std::string glass_mode_name(GlassMode m)
{
    switch (m) {
    case GlassMode::Real: return "Real";
    case GlassMode::Virtual: return "Virtual";
    case GlassMode::Absent: return "Absent";
    }
    return "Real";
}

GlassMode glass_mode_from(const std::string &s)
{
    if (s == "Real") return GlassMode::Real;
    if (s == "Virtual") return GlassMode::Virtual;
    if (s == "Absent") return GlassMode::Absent;
    throw std::invalid_argument("config: unknown glass mode '" + s + "'");
}

}  // namespace

void to_json(json &j, const GlassSpec &g)
{
    j = json{{"thickness", g.thickness},
             {"ior", g.ior},
             {"absorption", color_to_json(g.absorption)},
             {"distance_to_camera", g.distance_to_camera},
             {"mode", glass_mode_name(g.mode)}};
}

void from_json(const json &j, GlassSpec &g)
{
    reject_unknown(j, {"thickness", "ior", "absorption", "distance_to_camera", "mode"}, "glass");
    read_if(j, "thickness", g.thickness);
    read_if(j, "ior", g.ior);
    if (j.contains("absorption"))
        g.absorption = color_from_json(j.at("absorption"));
    read_if(j, "distance_to_camera", g.distance_to_camera);
    if (j.contains("mode"))
        g.mode = glass_mode_from(j.at("mode").get<std::string>());
}

void to_json(json &j, const LensSpec &l)
{
    j = json{{"focal_length", l.focal_length},
             {"aperture_radius", l.aperture_radius},
             {"focus_distance", l.focus_distance},
             {"mode", l.mode == LensMode::ThinLens ? "ThinLens" : "Pinhole"},
             {"film_width", l.film_width}};
}

void from_json(const json &j, LensSpec &l)
{
    reject_unknown(j, {"focal_length", "aperture_radius", "focus_distance", "mode", "film_width"}, "lens");
    read_if(j, "focal_length", l.focal_length);
    read_if(j, "aperture_radius", l.aperture_radius);
    read_if(j, "focus_distance", l.focus_distance);
    read_if(j, "film_width", l.film_width);
    if (j.contains("mode")) {
        const auto m = j.at("mode").get<std::string>();
        if (m == "ThinLens")
            l.mode = LensMode::ThinLens;
        else if (m == "Pinhole")
            l.mode = LensMode::Pinhole;
        else
            throw std::invalid_argument("config: unknown lens mode '" + m + "'");
    }
}

void to_json(json &j, const RenderSettings &s)
{
    j = json{{"spp", s.spp},
             {"resolution", json::array({s.width, s.height})},
             {"max_path_depth", s.max_path_depth},
             {"seed", s.seed},
             {"tile_size", s.tile_size},
             {"threads", s.threads},
             {"sampler", s.sampler == SamplerKind::LowDiscrepancy ? "LowDiscrepancy" : "Independent"}};
}

void from_json(const json &j, RenderSettings &s)
{
    reject_unknown(j, {"spp", "resolution", "max_path_depth", "seed", "tile_size", "threads", "sampler"},
                   "render");
    read_if(j, "spp", s.spp);
    if (j.contains("resolution")) {
        const auto &r = j.at("resolution");
        if (!r.is_array() || r.size() != 2)
            throw std::invalid_argument("config: resolution must be [width, height]");
        s.width = r[0].get<int>();
        s.height = r[1].get<int>();
    }
    read_if(j, "max_path_depth", s.max_path_depth);
    read_if(j, "seed", s.seed);
    read_if(j, "tile_size", s.tile_size);
    read_if(j, "threads", s.threads);
    if (j.contains("sampler")) {
        const auto k = j.at("sampler").get<std::string>();
        if (k == "LowDiscrepancy")
            s.sampler = SamplerKind::LowDiscrepancy;
        else if (k == "Independent")
            s.sampler = SamplerKind::Independent;
        else
            throw std::invalid_argument("config: unknown sampler '" + k + "'");
    }
}

void to_json(json &j, const CameraPose &c)
{
    j = json{{"position", json::array({c.position.x, c.position.y, c.position.z})},
             {"forward", json::array({c.forward.x, c.forward.y, c.forward.z})},
             {"up", json::array({c.up.x, c.up.y, c.up.z})}};
}

void to_json(json &j, const TupleMetadata &m)
{
    j = json{{"glass", m.glass},
             {"lens", m.lens},
             {"camera", m.camera},
             {"back_scene_distance", m.back_scene_distance},
             {"max_glass_orders", m.max_glass_orders},
             {"surface_albedo", m.surface_albedo},
             {"render", m.settings},
             {"film_hfov_deg", m.lens.hfov_deg()}};
}

void scene_params_from_json(const json &j, SceneParams &p)
{
    reject_unknown(j, {"back_scene_distance", "split_threshold", "max_glass_orders", "surface_albedo", "back_offset"},
                   "scene");
    read_if(j, "back_scene_distance", p.back_scene_distance);
    read_if(j, "split_threshold", p.split_threshold);
    read_if(j, "max_glass_orders", p.max_glass_orders);
    read_if(j, "surface_albedo", p.surface_albedo);
    if (j.contains("back_offset")) {
        const Color c = color_from_json(j.at("back_offset"));
        p.back_offset = {c.r, c.g, c.b};
    }
}

json scene_params_to_json(const SceneParams &p)
{
    return json{{"back_scene_distance", p.back_scene_distance},
                {"split_threshold", p.split_threshold},
                {"max_glass_orders", p.max_glass_orders},
                {"surface_albedo", p.surface_albedo},
                {"back_offset", json::array({p.back_offset.x, p.back_offset.y, p.back_offset.z})}};
}

namespace {

json finite_or_inf(double v)
{
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    return v;
}

}  // namespace

json metric_report_to_json(const MetricReport &report)
{
    const bool gaussian = report.ssim_options.window == SsimWindow::Gaussian11;
    json ssim_json{{"window", gaussian ? "gaussian11" : "uniform8"},
                   {"gaussian_sigma", gaussian ? 1.5 : 0.0},
                   {"k1", report.ssim_options.k1},
                   {"k2", report.ssim_options.k2},
                   {"dynamic_range", 1.0},
                   {"luma_weights", json::array({0.299, 0.587, 0.114})}};
    json images = json::array();
    for (const auto &s : report.images)
        images.push_back(json{{"name", s.name}, {"psnr", finite_or_inf(s.psnr)}, {"ssim", s.ssim}});
    return json{{"ssim_constants", ssim_json},
                {"images", images},
                {"mean_psnr", finite_or_inf(report.mean_psnr)},
                {"mean_ssim", report.mean_ssim},
                {"max_psnr", finite_or_inf(report.max_psnr)},
                {"max_ssim", report.max_ssim}};
}

}  // namespace refsynth
