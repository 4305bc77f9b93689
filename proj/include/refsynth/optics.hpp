#pragma once

#include <vector>

#include "refsynth/heightfield.hpp"
#include "refsynth/vec3.hpp"

namespace refsynth {

enum class GlassMode { Real, Virtual, Absent };

/// Planar glass slab perpendicular to the camera axis (+z), front face at distance_to_camera.
struct GlassSpec {
    double thickness = 0.010;
    double ior = 1.6;
    Color absorption{9.0, 7.0, 5.0};  // 1/m per channel
    double distance_to_camera = 0.30;
    GlassMode mode = GlassMode::Real;

    double near_plane() const { return distance_to_camera; }
    double far_plane() const { return distance_to_camera + thickness; }
    void validate() const;
};

enum class LensMode { ThinLens, Pinhole };

/// Camera optics. The horizontal field of view follows from focal_length and a 36 mm wide film.
struct LensSpec {
    double focal_length = 0.055;
    double aperture_radius = 0.00893;
    double focus_distance = 2.0;
    LensMode mode = LensMode::ThinLens;
    double film_width = 0.036;

    double hfov_deg() const;
    void validate() const;
};

inline constexpr int kDefaultMaxOrders = 4;

enum class SlabSide { Reflect, Transmit };

struct SlabExit {
    Ray ray;
    Color weight;
    double path_length_in_glass = 0;
    SlabSide side = SlabSide::Transmit;
    int order = 0;  // 0: front reflection / direct transmission
};

struct SlabInteraction {
    std::vector<SlabExit> exit_rays;

    Color total(SlabSide side) const;
};

/// Unpolarized Fresnel reflectance; eta = n_transmitted / n_incident. Returns 1 under total
/// internal reflection.
double fresnel_dielectric(double cos_theta_i, double eta);

/// exp(-absorption * distance) per channel.
Color beer_lambert(const Color &absorption, double distance);

/// Enumerates the ghost series of a Real slab.
///
/// Reflection side: front-surface reflection R, then orders k = 1..max_orders with weight
/// T^2 R^(2k-1). Transmission side: orders k = 0..max_orders with weight T^2 R^(2k). Every weight
/// includes Beer-Lambert attenuation over the order's in-glass path. Exit rays are parallel to the
/// incident (transmission) or mirrored (reflection) direction. Throws std::invalid_argument for rays
/// parallel to the slab, rays that never reach it, or glass not in Real mode.
SlabInteraction interact_slab(const Ray &ray, const GlassSpec &glass, int max_orders = kDefaultMaxOrders);
/// Same, appending into `out.exit_rays` after clearing it.
void interact_slab(const Ray &ray, const GlassSpec &glass, int max_orders, SlabInteraction &out);

/// Virtual slab: the direct-transmission ray or the front mirror ray, weight exactly 1.
SlabExit interact_virtual_slab(const Ray &ray, const GlassSpec &glass, SlabSide side);

/// Distance along `ray` to the slab face it enters, or +inf when it moves away from the slab.
double slab_entry_distance(const Ray &ray, const GlassSpec &glass);

struct Film {
    int width = 0;
    int height = 0;
    double hfov_deg = 0;

    Pinhole pinhole() const { return {width, height, hfov_deg}; }
};

/// Camera ray through continuous film position `film_position` (pixel (x, y) spans
/// [x, x+1) x [y, y+1)). The camera sits at the origin looking down +z. In ThinLens mode the
/// origin is `lens_sample` mapped onto the aperture disk and the ray passes through the pinhole
/// ray's point on the plane z = focus_distance.
Ray generate_camera_ray(const LensSpec &lens, Vec2 film_position, const Film &film, Vec2 lens_sample);

/// Thin-lens blur radius, measured on the focal plane, of a point at depth `depth`.
double circle_of_confusion_radius(const LensSpec &lens, double depth);

}  // namespace refsynth
