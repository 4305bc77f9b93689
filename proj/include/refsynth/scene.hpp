#pragma once

#include <memory>

#include "refsynth/heightfield.hpp"
#include "refsynth/optics.hpp"

namespace refsynth {

/// Camera position and orientation in world space. Scenes are built in the camera frame, so the
/// identity pose (origin, looking down +z, +y up) is the only one produced by assemble_scene.
struct CameraPose {
    Vec3 position{0.0, 0.0, 0.0};
    Vec3 forward{0.0, 0.0, 1.0};
    Vec3 up{0.0, 1.0, 0.0};
};

struct SceneParams {
    GlassSpec glass;
    LensSpec lens;
    double back_scene_distance = 1.5;  // meters behind the camera
    double split_threshold = kDefaultSplitThreshold;
    int max_glass_orders = kDefaultMaxOrders;
    double surface_albedo = 0.0;  // diffuse reflectance of the emitting surfaces
    Vec3 back_offset{0.0, 0.0, 0.0};  // lateral shift of the back scene, meters
};

/// One render job: the two textured meshes, the glass, the lens and the camera.
struct SceneDescription {
    std::shared_ptr<const HeightfieldMesh> front;
    std::shared_ptr<const HeightfieldMesh> back;
    GlassSpec glass;
    LensSpec lens;
    CameraPose camera;
    double back_scene_distance = 1.5;
    int max_glass_orders = kDefaultMaxOrders;
    double surface_albedo = 0.0;

    /// Throws std::invalid_argument unless the camera looks along the glass normal, the front mesh
    /// lies beyond the glass and the back mesh lies on the camera side of it.
    void validate() const;
};

/// Front depth at the center pixel (W/2, H/2); the thin lens focuses there.
double center_depth(const DepthImage &img);

/// Places the front scene behind the glass and the back scene behind the camera.
///
/// The front image is unprojected in place. The back image is unprojected, pushed back by
/// back_scene_distance and mirrored about the glass front face, so that its reflection fills the
/// camera frustum: a back pixel at depth d appears at optical distance d + back_scene_distance +
/// 2 * glass.distance_to_camera. lens.focus_distance is set to the front center depth. Throws
/// std::invalid_argument when the back mesh is invisible in the mirror view (evaluated for a film
/// with the lens field of view).
SceneDescription assemble_scene(const DepthImage &front, const DepthImage &back, const SceneParams &params);

}  // namespace refsynth
