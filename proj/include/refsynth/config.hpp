#pragma once

#include <json.hpp>

#include "refsynth/evaluation.hpp"
#include "refsynth/integrator.hpp"
#include "refsynth/optics.hpp"
#include "refsynth/scene.hpp"

namespace refsynth {

// JSON field names match the struct members. Missing keys keep their defaults; unknown keys
// are rejected so typos in config files surface early.

void to_json(nlohmann::json &j, const GlassSpec &g);
void from_json(const nlohmann::json &j, GlassSpec &g);
void to_json(nlohmann::json &j, const LensSpec &l);
void from_json(const nlohmann::json &j, LensSpec &l);
/// `resolution` is stored as [width, height].
void to_json(nlohmann::json &j, const RenderSettings &s);
void from_json(const nlohmann::json &j, RenderSettings &s);
void to_json(nlohmann::json &j, const CameraPose &c);
void to_json(nlohmann::json &j, const TupleMetadata &m);

/// Reads the `scene` section: back_scene_distance, split_threshold, max_glass_orders,
/// surface_albedo, back_offset. Glass and lens come from their own sections.
void scene_params_from_json(const nlohmann::json &j, SceneParams &p);
nlohmann::json scene_params_to_json(const SceneParams &p);

/// Evaluation report with the SSIM constants used. Infinite PSNR is written as the string "inf".
nlohmann::json metric_report_to_json(const MetricReport &report);

}  // namespace refsynth
