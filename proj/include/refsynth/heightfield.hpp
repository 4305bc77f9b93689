#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <vector>

#include "refsynth/image.hpp"
#include "refsynth/vec3.hpp"

namespace refsynth {

/// Registered color + metric depth raster.
struct DepthImage {
    Image rgb;            // 3 channels, linear [0,1]
    Image depth;          // 1 channel, z-depth in meters, finite and > 0
    double hfov_deg = 0;  // horizontal field of view of the capturing pinhole

    int width() const { return rgb.width(); }
    int height() const { return rgb.height(); }

    /// Throws std::invalid_argument when an invariant is violated.
    void validate() const;
};

/// Pinhole model shared by unprojection, projection and the camera.
///
/// Film coordinates are continuous pixels: pixel (i, j) covers [i, i+1) x [j, j+1), row 0 at the
/// top. Camera space looks down +z with +y up.
struct Pinhole {
    int width = 0;
    int height = 0;
    double hfov_deg = 0;

    double tan_half_x() const;
    double tan_half_y() const { return tan_half_x() * height / width; }

    /// Camera-space direction with z = 1 through film position (fx, fy).
    Vec3 film_to_direction(double fx, double fy) const;
    /// Inverse of film_to_direction; `p.z` must be positive.
    Vec2 project(const Vec3 &p) const;
};

inline constexpr double kDefaultSplitThreshold = 0.5;

/// Displacement surface unprojected from a depth image, one vertex per pixel.
struct HeightfieldMesh {
    int grid_width = 0;
    int grid_height = 0;
    std::vector<Vec3> vertices;
    std::vector<Vec2> uvs;
    std::vector<std::array<std::uint32_t, 3>> triangles;
    std::shared_ptr<const Image> texture;

    std::uint32_t vertex_index(int i, int j) const
    {
        return static_cast<std::uint32_t>(j) * static_cast<std::uint32_t>(grid_width) +
               static_cast<std::uint32_t>(i);
    }
};

/// Unprojects every pixel of `img` through its pinhole at the pixel's depth and triangulates the
/// grid. A triangle is dropped when any of its edges joins depths that differ by more than
/// `split_threshold` meters. Each cell is split along the diagonal with the smaller depth jump.
HeightfieldMesh build_heightfield(const DepthImage &img, double split_threshold = kDefaultSplitThreshold);

/// Nearest-texel lookup; uv in [0,1]^2 with v = 0 at the top row.
Color sample_texture(const Image &texture, Vec2 uv);

}  // namespace refsynth
