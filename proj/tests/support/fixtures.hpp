#pragma once

#include <cstdint>
#include <functional>

#include "refsynth/heightfield.hpp"
#include "refsynth/integrator.hpp"
#include "refsynth/scene.hpp"

namespace refsynth::fixtures {

/// Horizontal fov of the default lens (55 mm on a 36 mm film).
double default_hfov();

/// Builds a DepthImage from per-pixel color and depth functions of the normalized pixel center
/// (u, v) in [0,1]^2.
DepthImage make_image(int width, int height, double hfov_deg, const std::function<Color(double, double)> &color,
                      const std::function<double(double, double)> &depth);

DepthImage constant_plane(int width, int height, double depth, Color color, double hfov_deg);

/// Colorful front scene: smooth gradients, a checker panel and a nearer box, center depth 2 m.
DepthImage front_scene(int size);
/// Back scene: stripes and blobs on a slanted wall, 1.5 to 4 m.
DepthImage back_scene(int size);
/// Back scene with a 16x16 checker and depth growing from 0.1 m (left) to 8 m (right).
DepthImage back_depth_ramp(int size);

/// The default scene at the given source resolution (default SceneParams).
SceneDescription default_scene(int size);

/// Deterministic xorshift stream for property tests.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed * 0x9e3779b97f4a7c15ull + 1) {}
    std::uint64_t next_u64();
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

private:
    std::uint64_t state_;
};

}  // namespace refsynth::fixtures
