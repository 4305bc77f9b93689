#include "refsynth/scene.hpp"

#include <cmath>
#include <stdexcept>

namespace refsynth {

void SceneDescription::validate() const
{
    glass.validate();
    lens.validate();
    if (!front || !back)
        throw std::invalid_argument("SceneDescription: both meshes are required");
    const Vec3 forward = normalize(camera.forward);
    if (std::abs(forward.z - 1.0) > 1e-12)
        throw std::invalid_argument("SceneDescription: camera must look along the glass normal");
    for (const Vec3 &v : front->vertices)
        if (!(v.z > glass.far_plane()))
            throw std::invalid_argument("SceneDescription: front mesh must lie beyond the glass");
    for (const Vec3 &v : back->vertices)
        if (!(v.z < glass.near_plane()))
            throw std::invalid_argument("SceneDescription: back mesh must lie on the camera side");
}

double center_depth(const DepthImage &img)
{
    return img.depth.at(img.width() / 2, img.height() / 2);
}

namespace {

bool back_visible_in_mirror(const HeightfieldMesh &back, double mirror_plane, const Pinhole &film)
{
    for (const auto &tri : back.triangles) {
        for (auto vi : tri) {
            const Vec3 &v = back.vertices[vi];
            const Vec3 image(v.x, v.y, 2.0 * mirror_plane - v.z);
            if (image.z <= 0.0)
                continue;
            const Vec2 f = film.project(image);
            if (f.x >= 0.0 && f.x <= film.width && f.y >= 0.0 && f.y <= film.height)
                return true;
        }
    }
    return false;
}

}  // namespace

SceneDescription assemble_scene(const DepthImage &front, const DepthImage &back, const SceneParams &params)
{
    params.glass.validate();
    if (!(params.back_scene_distance >= 0.0))
        throw std::invalid_argument("assemble_scene: back_scene_distance must be >= 0");
    if (params.max_glass_orders < 0)
        throw std::invalid_argument("assemble_scene: max_glass_orders must be >= 0");
    if (params.surface_albedo < 0.0 || params.surface_albedo >= 1.0)
        throw std::invalid_argument("assemble_scene: surface_albedo must be in [0, 1)");

    SceneDescription scene;
    scene.glass = params.glass;
    scene.lens = params.lens;
    scene.back_scene_distance = params.back_scene_distance;
    scene.max_glass_orders = params.max_glass_orders;
    scene.surface_albedo = params.surface_albedo;

    scene.front = std::make_shared<const HeightfieldMesh>(build_heightfield(front, params.split_threshold));

    HeightfieldMesh back_mesh = build_heightfield(back, params.split_threshold);
    const double mirror_plane = params.glass.near_plane();
    for (Vec3 &v : back_mesh.vertices) {
        const double image_depth = v.z + params.back_scene_distance + 2.0 * mirror_plane;
        const double s = image_depth / v.z;
        v = Vec3(v.x * s + params.back_offset.x, v.y * s + params.back_offset.y,
                 2.0 * mirror_plane - image_depth + params.back_offset.z);
    }
    scene.back = std::make_shared<const HeightfieldMesh>(std::move(back_mesh));

    scene.lens.focus_distance = center_depth(front);
    scene.validate();

    const Pinhole film{256, 256, scene.lens.hfov_deg()};
    if (!back_visible_in_mirror(*scene.back, mirror_plane, film))
        throw std::invalid_argument("assemble_scene: back scene is not visible in the mirror view");
    return scene;
}

}  // namespace refsynth
